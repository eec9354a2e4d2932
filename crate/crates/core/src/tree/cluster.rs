use std::cmp::Ordering;

use crate::scalar::Scalar;
use crate::segmenter::{LabeledSpan, SpanLabel};

use super::TreeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CasingClass {
    AllCaps,
    Title,
    Other,
}

/// ALL-CAPS when every letter is upper case (and there are at least two),
/// Title when the first letter is upper case, Other otherwise.
pub fn casing_class(text: &str) -> CasingClass {
    let letters: Vec<char> = text.chars().filter(|c| c.is_alphabetic()).collect();
    match letters.first() {
        None => CasingClass::Other,
        Some(_) if letters.len() >= 2 && letters.iter().all(|c| !c.is_lowercase()) => CasingClass::AllCaps,
        Some(c) if c.is_uppercase() => CasingClass::Title,
        _ => CasingClass::Other,
    }
}

/// Visual clusters of the header spans.
///
/// Headers are first grouped by font size (single linkage over the sorted
/// sizes with gap `size_cluster_tol`), then split by
/// `(bold, italic, color, casing)`. Returns one entry per input span; ids
/// start at 1 and follow first occurrence in `spans`. Non-headers get `None`.
pub fn cluster_headers<T: Scalar>(spans: &[LabeledSpan<T>], p: &TreeParams<T>) -> Vec<Option<u32>> {
    cluster_header_refs(&spans.iter().collect::<Vec<_>>(), p)
}

pub(crate) fn cluster_header_refs<T: Scalar>(spans: &[&LabeledSpan<T>], p: &TreeParams<T>) -> Vec<Option<u32>> {
    let headers: Vec<usize> = (0..spans.len()).filter(|&i| spans[i].label == SpanLabel::Header).collect();
    let mut by_size = headers.clone();
    by_size.sort_by(|&a, &b| {
        let (x, y) = (spans[a].style_summary.font_size, spans[b].style_summary.font_size);
        x.partial_cmp(&y).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    let mut size_group = vec![0usize; spans.len()];
    let mut g = 0;
    for w in 0..by_size.len() {
        if w > 0 {
            let prev = spans[by_size[w - 1]].style_summary.font_size;
            let cur = spans[by_size[w]].style_summary.font_size;
            if cur - prev > p.size_cluster_tol {
                g += 1;
            }
        }
        size_group[by_size[w]] = g;
    }

    let mut keys: Vec<(usize, bool, bool, u32, CasingClass)> = Vec::new();
    let mut out = vec![None; spans.len()];
    for &i in &headers {
        let st = &spans[i].style_summary;
        let key = (size_group[i], st.bold, st.italic, st.color, casing_class(&spans[i].text));
        let id = match keys.iter().position(|k| *k == key) {
            Some(pos) => pos,
            None => {
                keys.push(key);
                keys.len() - 1
            }
        };
        out[i] = Some(id as u32 + 1);
    }
    out
}
