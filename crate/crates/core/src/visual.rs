//! The visual page model (pages, groups, lines, segments) and its JSON form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::BBox;
use crate::scalar::Scalar;

/// Slack allowed when checking that a container box equals the union of its
/// children. Upstream extractors round coordinates to two decimals.
pub const GEOMETRY_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleInfo<T> {
    pub font_family: String,
    pub font_size: T,
    pub bold: bool,
    pub italic: bool,
    /// 24-bit RGB.
    pub color: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub text: String,
    pub bbox: BBox<T>,
    pub style: StyleInfo<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line<T> {
    pub bbox: BBox<T>,
    pub segments: Vec<Segment<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group<T> {
    pub bbox: BBox<T>,
    pub is_page_header: bool,
    pub is_page_footer: bool,
    #[serde(default)]
    pub border_sides: u8,
    pub lines: Vec<Line<T>>,
}

impl<T> Group<T> {
    /// Page furniture (running header or footer).
    pub fn is_furniture(&self) -> bool {
        self.is_page_header || self.is_page_footer
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment<T>> {
        self.lines.iter().flat_map(|l| l.segments.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualPage<T> {
    pub width: T,
    pub height: T,
    #[serde(default)]
    pub table_regions: Vec<BBox<T>>,
    pub groups: Vec<Group<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
struct Document<T> {
    pages: Vec<VisualPage<T>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("geometry error on page {page}{}: {message}", group.map(|g| format!(", group {g}")).unwrap_or_default())]
    Geometry {
        page: usize,
        group: Option<usize>,
        message: String,
    },
}

fn schema(path: String, message: impl Into<String>) -> ParseError {
    ParseError::Schema { path, message: message.into() }
}

fn geometry(page: usize, group: Option<usize>, message: impl Into<String>) -> ParseError {
    ParseError::Geometry { page, group, message: message.into() }
}

/// Parses a visual JSON document. Segments are put in left-to-right order and
/// lines in top-to-bottom order before validation.
pub fn parse_document<T: Scalar>(bytes: &[u8]) -> Result<Vec<VisualPage<T>>, ParseError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: Document<T> = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })?;
    let mut pages = doc.pages;
    for (pi, page) in pages.iter_mut().enumerate() {
        normalize_page(page);
        validate_page(pi, page)?;
    }
    Ok(pages)
}

/// Serializes pages back into the visual JSON schema.
pub fn serialize_document<T: Scalar>(pages: &[VisualPage<T>]) -> String {
    #[derive(Serialize)]
    struct DocRef<'a, T> {
        pages: &'a [VisualPage<T>],
    }
    serde_json::to_string(&DocRef { pages }).expect("visual model serializes")
}

fn normalize_page<T: Scalar>(page: &mut VisualPage<T>) {
    let by = |a: T, b: T| a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal);
    for g in &mut page.groups {
        for l in &mut g.lines {
            l.segments.sort_by(|a, b| by(a.bbox.left, b.bbox.left));
        }
        g.lines.sort_by(|a, b| by(a.bbox.top, b.bbox.top));
    }
}

/// Checks every invariant of the model for one page.
pub fn validate_page<T: Scalar>(pi: usize, page: &VisualPage<T>) -> Result<(), ParseError> {
    let tol = T::of(GEOMETRY_TOLERANCE);
    if !(page.width.is_finite() && page.height.is_finite() && page.width > T::zero() && page.height > T::zero()) {
        return Err(geometry(pi, None, "page width and height must be positive and finite"));
    }
    let page_box = BBox::new(T::zero(), T::zero(), page.width, page.height);
    for (ti, region) in page.table_regions.iter().enumerate() {
        if !region.is_valid() {
            return Err(geometry(pi, None, format!("table region {ti} is not a valid box")));
        }
    }
    for (gi, g) in page.groups.iter().enumerate() {
        let gpath = format!("pages[{pi}].groups[{gi}]");
        if g.border_sides > 4 {
            return Err(schema(format!("{gpath}.border_sides"), "must be between 0 and 4"));
        }
        if g.lines.is_empty() {
            return Err(schema(format!("{gpath}.lines"), "group has no lines"));
        }
        if !g.bbox.is_valid() {
            return Err(geometry(pi, Some(gi), "group bbox is not a valid box"));
        }
        if !page_box.contains(&g.bbox, tol) {
            return Err(geometry(pi, Some(gi), "group bbox lies outside the page"));
        }
        for (li, line) in g.lines.iter().enumerate() {
            let lpath = format!("{gpath}.lines[{li}]");
            if line.segments.is_empty() {
                return Err(schema(format!("{lpath}.segments"), "line has no segments"));
            }
            for (si, seg) in line.segments.iter().enumerate() {
                let spath = format!("{lpath}.segments[{si}]");
                if seg.text.trim().is_empty() {
                    return Err(schema(format!("{spath}.text"), "segment text is empty"));
                }
                let fs = seg.style.font_size;
                if !(fs.is_finite() && fs > T::zero()) {
                    return Err(schema(format!("{spath}.style.font_size"), "font size must be positive"));
                }
                if seg.style.color > 0xFF_FFFF {
                    return Err(schema(format!("{spath}.style.color"), "color exceeds 24-bit RGB"));
                }
                if !seg.bbox.is_valid() {
                    return Err(geometry(pi, Some(gi), format!("line {li} segment {si} bbox is not a valid box")));
                }
            }
            if !line.bbox.is_valid() {
                return Err(geometry(pi, Some(gi), format!("line {li} bbox is not a valid box")));
            }
            let seg_union = BBox::union_all(line.segments.iter().map(|s| &s.bbox)).expect("non-empty");
            if !line.bbox.approx_eq(&seg_union, tol) {
                return Err(geometry(pi, Some(gi), format!("line {li} bbox is not the union of its segments")));
            }
        }
        let line_union = BBox::union_all(g.lines.iter().map(|l| &l.bbox)).expect("non-empty");
        if !g.bbox.approx_eq(&line_union, tol) {
            return Err(geometry(pi, Some(gi), "group bbox is not the union of its lines"));
        }
    }
    Ok(())
}

/// Where one segment's text sits inside the group text, in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentSlot {
    pub line: usize,
    pub segment: usize,
    pub start: usize,
    pub end: usize,
}

/// Group text together with the character range each segment occupies.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupText {
    pub text: String,
    pub slots: Vec<SegmentSlot>,
}

impl GroupText {
    pub fn char_len(&self) -> usize {
        self.slots.last().map_or(0, |s| s.end)
    }
}

/// Lines top-to-bottom, segments left-to-right, single-space separated.
pub fn group_text<T: Scalar>(g: &Group<T>) -> String {
    layout_group_text(g).text
}

pub fn layout_group_text<T: Scalar>(g: &Group<T>) -> GroupText {
    let by = |a: T, b: T| a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal);
    let mut lines: Vec<(usize, &Line<T>)> = g.lines.iter().enumerate().collect();
    lines.sort_by(|a, b| by(a.1.bbox.top, b.1.bbox.top));
    let mut text = String::new();
    let mut slots = Vec::new();
    let mut pos = 0usize;
    for (li, line) in lines {
        let mut segs: Vec<(usize, &Segment<T>)> = line.segments.iter().enumerate().collect();
        segs.sort_by(|a, b| by(a.1.bbox.left, b.1.bbox.left));
        for (si, seg) in segs {
            let piece = seg.text.split_whitespace().collect::<Vec<_>>().join(" ");
            if piece.is_empty() {
                continue;
            }
            if !text.is_empty() {
                text.push(' ');
                pos += 1;
            }
            let n = piece.chars().count();
            slots.push(SegmentSlot { line: li, segment: si, start: pos, end: pos + n });
            text.push_str(&piece);
            pos += n;
        }
    }
    GroupText { text, slots }
}

/// Converts a half-open character range of `text` into a byte range.
pub fn char_to_byte_range(text: &str, start: usize, end: usize) -> (usize, usize) {
    let mut bs = text.len();
    let mut be = text.len();
    for (ci, (bi, _)) in text.char_indices().enumerate() {
        if ci == start {
            bs = bi;
        }
        if ci == end {
            be = bi;
            break;
        }
    }
    (bs, be)
}

/// Slice of `text` between two character offsets.
pub fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let (bs, be) = char_to_byte_range(text, start, end);
    &text[bs..be]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn style() -> StyleInfo<f64> {
        StyleInfo { font_family: "Times".into(), font_size: 10.0, bold: false, italic: false, color: 0 }
    }

    fn seg(text: &str, l: f64, t: f64, r: f64, b: f64) -> Segment<f64> {
        Segment { text: text.into(), bbox: BBox::new(l, t, r, b), style: style() }
    }

    fn line(segments: Vec<Segment<f64>>) -> Line<f64> {
        let bbox = BBox::union_all(segments.iter().map(|s| &s.bbox)).unwrap();
        Line { bbox, segments }
    }

    fn group(lines: Vec<Line<f64>>) -> Group<f64> {
        let bbox = BBox::union_all(lines.iter().map(|l| &l.bbox)).unwrap();
        Group { bbox, is_page_header: false, is_page_footer: false, border_sides: 0, lines }
    }

    #[test]
    fn singleton_text() {
        let g = group(vec![line(vec![seg("DIRECTORY", 0.0, 0.0, 50.0, 10.0)])]);
        assert_eq!(group_text(&g), "DIRECTORY");
    }

    #[test]
    fn two_lines_join_with_space() {
        let g = group(vec![
            line(vec![seg("Deutsche Bank (Suisse) S.A.", 0.0, 0.0, 120.0, 10.0)]),
            line(vec![seg("4th Floor", 0.0, 12.0, 40.0, 22.0)]),
        ]);
        assert_eq!(group_text(&g), "Deutsche Bank (Suisse) S.A. 4th Floor");
    }

    #[test]
    fn swapped_segments_read_left_to_right() {
        let sorted = group(vec![line(vec![seg("Tel:", 0.0, 0.0, 20.0, 10.0), seg("+352 1234567", 25.0, 0.0, 90.0, 10.0)])]);
        let mut swapped = sorted.clone();
        swapped.lines[0].segments.reverse();
        assert_eq!(group_text(&swapped), group_text(&sorted));
        assert_eq!(group_text(&sorted), "Tel: +352 1234567");
    }

    #[test]
    fn slots_cover_segments() {
        let g = group(vec![line(vec![seg("Société", 0.0, 0.0, 30.0, 10.0), seg("Anonyme", 35.0, 0.0, 70.0, 10.0)])]);
        let gt = layout_group_text(&g);
        assert_eq!(gt.slots[0].start, 0);
        assert_eq!(gt.slots[0].end, 7);
        assert_eq!(gt.slots[1].start, 8);
        assert_eq!(char_slice(&gt.text, 8, 15), "Anonyme");
    }

    #[test]
    fn empty_document() {
        let pages: Vec<VisualPage<f64>> = parse_document(br#"{"pages":[]}"#).unwrap();
        assert!(pages.is_empty());
    }

    #[test]
    fn missing_field_reports_path() {
        let doc = br#"{"pages":[{"width":100,"height":100,"groups":[{"bbox":{"l":0,"t":0,"r":1,"b":1},"is_page_header":false,"is_page_footer":false,"lines":[{"bbox":{"l":0,"t":0,"r":1,"b":1},"segments":[{"text":"x","bbox":{"l":0,"t":0,"r":1,"b":1}}]}]}]}]}"#;
        let err = parse_document::<f64>(doc).unwrap_err();
        match err {
            ParseError::Schema { path, .. } => assert!(path.contains("segments[0]"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn defaults_and_unknown_fields() {
        let doc = br#"{"pages":[{"width":100,"height":100,"extra":1,"groups":[{"bbox":{"l":0,"t":0,"r":10,"b":10},"is_page_header":false,"is_page_footer":false,"lines":[{"bbox":{"l":0,"t":0,"r":10,"b":10},"segments":[{"text":"x","bbox":{"l":0,"t":0,"r":10,"b":10},"style":{"font_family":"A","font_size":9,"bold":false,"italic":false,"color":0}}]}]}]}]}"#;
        let pages = parse_document::<f64>(doc).unwrap();
        assert_eq!(pages[0].groups[0].border_sides, 0);
        assert!(pages[0].table_regions.is_empty());
    }

    #[test]
    fn group_outside_page_is_rejected() {
        let g = group(vec![line(vec![seg("x", 0.0, 0.0, 500.0, 10.0)])]);
        let page = VisualPage { width: 100.0, height: 100.0, table_regions: vec![], groups: vec![g] };
        let json = serialize_document(&[page]);
        let err = parse_document::<f64>(json.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::Geometry { page: 0, group: Some(0), .. }));
    }

    #[test]
    fn bad_color_is_schema_error() {
        let mut s = seg("x", 0.0, 0.0, 10.0, 10.0);
        s.style.color = 0x1_000_000;
        let page = VisualPage { width: 100.0, height: 100.0, table_regions: vec![], groups: vec![group(vec![line(vec![s])])] };
        let err = parse_document::<f64>(serialize_document(&[page]).as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::Schema { ref path, .. } if path.ends_with("style.color")));
    }
}
