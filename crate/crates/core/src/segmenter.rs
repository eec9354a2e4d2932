//! Header / Body / Neither labelling of the text on a directory page.
//!
//! Each group is processed with a fixed cascade of rules. A rule consumes a
//! character range of the group text; later rules only see what is still
//! unlabelled. The rule that decided a span is kept in
//! [`LabeledSpan::fired_rule`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotator::{Annotation, AnnotationLabel, AnnotationSet};
use crate::geometry::BBox;
use crate::scalar::Scalar;
use crate::visual::{char_slice, layout_group_text, Group, GroupText, StyleInfo, VisualPage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpanLabel {
    Header,
    Body,
    Neither,
}

impl SpanLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Header => "Header",
            Self::Body => "Body",
            Self::Neither => "Neither",
        }
    }
}

impl fmt::Display for SpanLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The cascade branch that assigned a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    PageFurniture,
    EntityBody,
    EntityHeader,
    TrailingPunctuation,
    RoleOrAddressType,
    StyleColor,
    StyleEmphasis,
    StyleSize,
    StyleFamily,
    FallbackBody,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PageFurniture => "page_furniture",
            Self::EntityBody => "entity_body",
            Self::EntityHeader => "entity_header",
            Self::TrailingPunctuation => "trailing_punctuation",
            Self::RoleOrAddressType => "role_or_address_type",
            Self::StyleColor => "style_color",
            Self::StyleEmphasis => "style_emphasis",
            Self::StyleSize => "style_size",
            Self::StyleFamily => "style_family",
            Self::FallbackBody => "fallback_body",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSpan<T> {
    pub page_index: usize,
    pub group_index: usize,
    /// Character offsets into the group text.
    pub start: usize,
    pub end: usize,
    pub label: SpanLabel,
    pub text: String,
    /// Union of the boxes of the segments the span touches.
    pub bbox: BBox<T>,
    /// Number of visual lines the span touches.
    pub lines: usize,
    pub style_summary: StyleInfo<T>,
    pub fired_rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageStyleStats<T> {
    pub predominant_color: u32,
    pub majority_font_size: T,
    pub majority_font_family: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("page {page} has no text outside page headers and footers")]
pub struct EmptyPageError {
    pub page: usize,
}

/// Trailing tokens that end in `:` without introducing a header.
const FIELD_PREFIXES: [&str; 3] = ["tel:", "email:", "fax:"];

/// Font sizes are compared in half-point bins.
fn size_bin<T: Scalar>(size: T) -> i64 {
    (size.as_f64() * 2.0).round() as i64
}

fn bin_size<T: Scalar>(bin: i64) -> T {
    T::of(bin as f64 / 2.0)
}

/// Character-weighted modes of colour, font size and family over the page,
/// ignoring page headers and footers. Ties go to the smaller value.
pub fn page_style_stats<T: Scalar>(page_index: usize, page: &VisualPage<T>) -> Result<PageStyleStats<T>, EmptyPageError> {
    let mut colors: BTreeMap<u32, usize> = BTreeMap::new();
    let mut sizes: BTreeMap<i64, usize> = BTreeMap::new();
    let mut families: BTreeMap<&str, usize> = BTreeMap::new();
    for g in page.groups.iter().filter(|g| !g.is_furniture()) {
        for s in g.segments() {
            let n = s.text.chars().filter(|c| !c.is_whitespace()).count();
            if n == 0 {
                continue;
            }
            *colors.entry(s.style.color).or_default() += n;
            *sizes.entry(size_bin(s.style.font_size)).or_default() += n;
            *families.entry(s.style.font_family.as_str()).or_default() += n;
        }
    }
    fn mode<K: Copy>(m: &BTreeMap<K, usize>) -> Option<K> {
        let mut best: Option<(K, usize)> = None;
        for (k, c) in m {
            if best.is_none_or(|(_, bc)| *c > bc) {
                best = Some((*k, *c));
            }
        }
        best.map(|(k, _)| k)
    }
    let err = EmptyPageError { page: page_index };
    Ok(PageStyleStats {
        predominant_color: mode(&colors).ok_or(err.clone())?,
        majority_font_size: bin_size(mode(&sizes).ok_or(err.clone())?),
        majority_font_family: mode(&families).ok_or(err)?.to_string(),
    })
}

type Mark = Option<(SpanLabel, Rule)>;

/// Labels every character of every group on the page.
pub fn segment_page<T: Scalar>(page_index: usize, page: &VisualPage<T>, anns: &AnnotationSet) -> Result<Vec<LabeledSpan<T>>, EmptyPageError> {
    let stats = page_style_stats(page_index, page)?;
    let mut out = Vec::new();
    for (gi, g) in page.groups.iter().enumerate() {
        let gt = layout_group_text(g);
        let marks = label_group(g, &gt, anns.group(page_index, gi), &stats);
        out.extend(spans_from_marks(page_index, gi, g, &gt, &marks));
    }
    Ok(out)
}

fn label_group<T: Scalar>(g: &Group<T>, gt: &GroupText, anns: &[Annotation], stats: &PageStyleStats<T>) -> Vec<(SpanLabel, Rule)> {
    let n = gt.char_len();
    let mut marks: Vec<Mark> = vec![None; n];
    if n == 0 {
        return Vec::new();
    }
    if g.is_furniture() {
        return vec![(SpanLabel::Neither, Rule::PageFurniture); n];
    }

    let entity = anns
        .iter()
        .filter(|a| matches!(a.label, AnnotationLabel::Org | AnnotationLabel::Person))
        .min_by_key(|a| (a.start, std::cmp::Reverse(a.end)));
    if let Some(e) = entity {
        let followed = char_slice(&gt.text, e.end, n).chars().any(|c| !c.is_whitespace());
        if followed {
            marks[e.start..n].fill(Some((SpanLabel::Body, Rule::EntityBody)));
        } else {
            marks[e.start..e.end].fill(Some((SpanLabel::Header, Rule::EntityHeader)));
        }
    }

    for (s, e) in unlabeled_runs(&marks) {
        let piece = char_slice(&gt.text, s, e);
        if piece.trim().is_empty() {
            continue;
        }
        let decided = remaining_span_rule(g, gt, s, e, piece, anns, stats);
        marks[s..e].fill(Some(decided));
    }

    // Whitespace-only leftovers take the label of their left neighbour.
    let mut out = Vec::with_capacity(n);
    let first_set = marks.iter().flatten().next().copied().unwrap_or((SpanLabel::Body, Rule::FallbackBody));
    let mut prev = first_set;
    for m in marks {
        let m = m.unwrap_or(prev);
        out.push(m);
        prev = m;
    }
    out
}

fn remaining_span_rule<T: Scalar>(
    g: &Group<T>,
    gt: &GroupText,
    s: usize,
    e: usize,
    piece: &str,
    anns: &[Annotation],
    stats: &PageStyleStats<T>,
) -> (SpanLabel, Rule) {
    let trimmed = piece.trim();
    if trimmed.ends_with(':') || trimmed.ends_with('-') {
        let last = trimmed.split_whitespace().last().unwrap_or("").to_lowercase();
        if !FIELD_PREFIXES.contains(&last.as_str()) {
            return (SpanLabel::Header, Rule::TrailingPunctuation);
        }
    }
    if anns
        .iter()
        .any(|a| matches!(a.label, AnnotationLabel::Role | AnnotationLabel::AddressType) && a.start >= s && a.end <= e)
    {
        return (SpanLabel::Header, Rule::RoleOrAddressType);
    }
    if let Some(style) = dominant_style(g, gt, s, e) {
        if style.color != stats.predominant_color {
            return (SpanLabel::Header, Rule::StyleColor);
        }
        if style.bold || style.italic {
            return (SpanLabel::Header, Rule::StyleEmphasis);
        }
        if size_bin(style.font_size) > size_bin(stats.majority_font_size) {
            return (SpanLabel::Header, Rule::StyleSize);
        }
        if style.font_family != stats.majority_font_family {
            return (SpanLabel::Header, Rule::StyleFamily);
        }
    }
    (SpanLabel::Body, Rule::FallbackBody)
}

fn unlabeled_runs(marks: &[Mark]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, m) in marks.iter().enumerate() {
        match (m.is_none(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, marks.len()));
    }
    runs
}

/// Style covering the most characters of `[s, e)`; ties go to the earlier one.
fn dominant_style<'a, T: Scalar>(g: &'a Group<T>, gt: &GroupText, s: usize, e: usize) -> Option<&'a StyleInfo<T>> {
    let mut tally: Vec<(&StyleInfo<T>, usize)> = Vec::new();
    for slot in &gt.slots {
        let overlap = slot.end.min(e).saturating_sub(slot.start.max(s));
        if overlap == 0 {
            continue;
        }
        let style = &g.lines[slot.line].segments[slot.segment].style;
        match tally.iter_mut().find(|(st, _)| *st == style) {
            Some((_, c)) => *c += overlap,
            None => tally.push((style, overlap)),
        }
    }
    let mut best: Option<(&StyleInfo<T>, usize)> = None;
    for (st, c) in tally {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((st, c));
        }
    }
    best.map(|(st, _)| st)
}

fn spans_from_marks<T: Scalar>(page_index: usize, gi: usize, g: &Group<T>, gt: &GroupText, marks: &[(SpanLabel, Rule)]) -> Vec<LabeledSpan<T>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < marks.len() {
        let (label, rule) = marks[i];
        let mut j = i + 1;
        while j < marks.len() && marks[j].0 == label {
            j += 1;
        }
        out.push(make_span(page_index, gi, g, gt, i, j, label, rule));
        i = j;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn make_span<T: Scalar>(page_index: usize, gi: usize, g: &Group<T>, gt: &GroupText, s: usize, e: usize, label: SpanLabel, rule: Rule) -> LabeledSpan<T> {
    let touched: Vec<_> = gt.slots.iter().filter(|sl| sl.start < e && sl.end > s).collect();
    let bbox = BBox::union_all(touched.iter().map(|sl| &g.lines[sl.line].segments[sl.segment].bbox)).unwrap_or(g.bbox);
    let mut lines: Vec<usize> = touched.iter().map(|sl| sl.line).collect();
    lines.dedup();
    let style = dominant_style(g, gt, s, e)
        .cloned()
        .unwrap_or_else(|| g.lines[0].segments[0].style.clone());
    LabeledSpan {
        page_index,
        group_index: gi,
        start: s,
        end: e,
        label,
        text: char_slice(&gt.text, s, e).to_string(),
        bbox,
        lines: lines.len().max(1),
        style_summary: style,
        fired_rule: rule,
    }
}
