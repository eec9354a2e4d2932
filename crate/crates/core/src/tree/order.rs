use std::cmp::Ordering;

use crate::geometry::{y_overlap, BBox};
use crate::scalar::Scalar;
use crate::segmenter::{LabeledSpan, SpanLabel};

use super::TreeParams;

/// Two boxes share a horizontal band when their vertical overlap is at least
/// `frac` of the shorter height. A zero-height box shares a band with any box
/// whose vertical extent contains it.
pub fn same_band<T: Scalar>(a: &BBox<T>, b: &BBox<T>, frac: T) -> bool {
    let shorter = a.height().min(b.height());
    let overlap = a.bottom.min(b.bottom) - a.top.max(b.top);
    if overlap < T::zero() {
        return false;
    }
    if shorter <= T::zero() {
        return true;
    }
    y_overlap(a, b) >= frac * shorter
}

/// Top-to-bottom, left-to-right reading sequence of the non-Neither spans,
/// as indices into `spans`.
///
/// Spans are swept in order of their top edge; a span joins the current band
/// when it shares a band with any member, otherwise it opens a new one. Within
/// a band spans are ordered by left edge. Reversing the result walks the page
/// from the bottom-right corner leftwards and upwards.
pub fn reading_sequence<T: Scalar>(spans: &[LabeledSpan<T>], p: &TreeParams<T>) -> Vec<usize> {
    let cmp = |a: T, b: T| a.partial_cmp(&b).unwrap_or(Ordering::Equal);
    let mut idx: Vec<usize> = (0..spans.len()).filter(|&i| spans[i].label != SpanLabel::Neither).collect();
    idx.sort_by(|&a, &b| {
        cmp(spans[a].bbox.top, spans[b].bbox.top)
            .then(cmp(spans[a].bbox.left, spans[b].bbox.left))
            .then(a.cmp(&b))
    });
    let mut bands: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        let joins = bands
            .last()
            .is_some_and(|band| band.iter().any(|&m| same_band(&spans[m].bbox, &spans[i].bbox, p.band_overlap_frac)));
        if joins {
            bands.last_mut().expect("checked").push(i);
        } else {
            bands.push(vec![i]);
        }
    }
    let mut out = Vec::with_capacity(spans.len());
    for mut band in bands {
        band.sort_by(|&a, &b| {
            cmp(spans[a].bbox.left, spans[b].bbox.left)
                .then(cmp(spans[a].bbox.top, spans[b].bbox.top))
                .then(a.cmp(&b))
        });
        out.extend(band);
    }
    out
}
