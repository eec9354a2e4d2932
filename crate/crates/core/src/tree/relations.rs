use std::cmp::Ordering;

use crate::geometry::{v_gap, x_overlap};
use crate::scalar::Scalar;
use crate::segmenter::{LabeledSpan, SpanLabel};

use super::cluster::cluster_header_refs;
use super::TreeParams;

/// Spans of one page together with the page-level facts the parent
/// predicates need.
pub struct LayoutContext<'a, T> {
    pub spans: Vec<&'a LabeledSpan<T>>,
    pub clusters: Vec<Option<u32>>,
    pub median_line_height: T,
    pub params: &'a TreeParams<T>,
}

impl<'a, T: Scalar> LayoutContext<'a, T> {
    pub fn new(spans: Vec<&'a LabeledSpan<T>>, params: &'a TreeParams<T>) -> Self {
        let clusters = cluster_header_refs(&spans, params);
        let median_line_height = median_line_height(&spans);
        Self { spans, clusters, median_line_height, params }
    }

    fn is_header(&self, i: usize) -> bool {
        self.spans[i].label == SpanLabel::Header
    }

    /// `h` covers enough of `x` horizontally to act on it.
    fn covers(&self, h: usize, x: usize) -> bool {
        let (hb, xb) = (&self.spans[h].bbox, &self.spans[x].bbox);
        x_overlap(hb, xb) >= self.params.min_x_overlap_frac * xb.width()
    }

    /// Header `c` may adopt the unparented span `n`: `n` starts below `c`,
    /// overlaps it horizontally or sits to its right, and is not a header of
    /// the same visual cluster.
    pub fn can_parent(&self, c: usize, n: usize) -> bool {
        let p = self.params;
        let (cb, nb) = (&self.spans[c].bbox, &self.spans[n].bbox);
        let below = nb.top > cb.top + p.align_tol;
        let admissible = self.covers(c, n) || nb.left >= cb.left - p.align_tol;
        let distinct = !self.is_header(n) || self.clusters[c] != self.clusters[n];
        self.is_header(c) && below && admissible && distinct
    }

    /// Closest header above `x` that covers it horizontally; `None` stands
    /// for the synthetic root.
    pub fn nearest_header_above(&self, x: usize) -> Option<usize> {
        let xb = &self.spans[x].bbox;
        (0..self.spans.len())
            .filter(|&h| h != x && self.is_header(h))
            .filter(|&h| self.spans[h].bbox.top + self.params.align_tol < xb.top && self.covers(h, x))
            .min_by(|&a, &b| {
                let da = xb.top - self.spans[a].bbox.bottom;
                let db = xb.top - self.spans[b].bbox.bottom;
                da.partial_cmp(&db).unwrap_or(Ordering::Equal).then(a.cmp(&b))
            })
    }

    /// Body `c` and the later body `b` belong to the same entry.
    pub fn same_entry(&self, c: usize, b: usize) -> bool {
        let (sc, sb) = (self.spans[c], self.spans[b]);
        if sc.page_index == sb.page_index && sc.group_index == sb.group_index {
            return true;
        }
        let p = self.params;
        let close = v_gap(&sc.bbox, &sb.bbox) <= p.gap_factor * self.median_line_height;
        let aligned = (sc.bbox.left - sb.bbox.left).abs() <= p.align_tol;
        close && aligned && self.nearest_header_above(c) == self.nearest_header_above(b) && !self.header_between(c, b)
    }

    fn header_between(&self, c: usize, b: usize) -> bool {
        let (cb, bb) = (&self.spans[c].bbox, &self.spans[b].bbox);
        let tol = self.params.align_tol;
        (0..self.spans.len()).any(|h| {
            let hb = &self.spans[h].bbox;
            self.is_header(h)
                && hb.top >= cb.bottom - tol
                && hb.bottom <= bb.top + tol
                && (self.covers(h, b) || self.covers(h, c))
        })
    }
}

/// Median over spans of `height / lines`; zero without spans.
pub fn median_line_height<T: Scalar>(spans: &[&LabeledSpan<T>]) -> T {
    let mut hs: Vec<T> = spans.iter().map(|s| s.bbox.height() / T::of_usize(s.lines.max(1))).collect();
    if hs.is_empty() {
        return T::zero();
    }
    hs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let m = hs.len() / 2;
    if hs.len() % 2 == 1 {
        hs[m]
    } else {
        (hs[m - 1] + hs[m]) / T::of(2.0)
    }
}
