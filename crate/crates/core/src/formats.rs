//! JSON files exchanged between pipeline stages: segmentation, trees, blocks,
//! classifications and gold annotations. Every file holds a `pages` list.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotator::{Annotation, AnnotationSet};
use crate::geometry::BBox;
use crate::metrics::SpanItem;
use crate::pipeline::PageClassification;
use crate::scalar::Scalar;
use crate::segmenter::{LabeledSpan, Rule, SpanLabel};
use crate::tree::{DirectoryBlock, NodeKind, ReadingTree, TreeLink};
use crate::visual::{char_slice, group_text, StyleInfo, VisualPage};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON at `{path}`: {message}")]
    Json { path: String, message: String },
    #[error("page {page}: {message}")]
    Invalid { page: usize, message: String },
}

/// Deserializes JSON, reporting the path of the offending field.
pub fn from_json<D: DeserializeOwned>(bytes: &[u8]) -> Result<D, FormatError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| FormatError::Json { path: e.path().to_string(), message: e.inner().to_string() })
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("output types always serialize")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pages<P> {
    pub pages: Vec<P>,
}

impl<P> Pages<P> {
    pub fn new(pages: Vec<P>) -> Self {
        Self { pages }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAnnotations {
    pub group: usize,
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageAnnotations {
    pub page: usize,
    pub groups: Vec<GroupAnnotations>,
}

impl PageAnnotations {
    /// Groups of `page` that carry at least one annotation, in group order.
    pub fn from_set(page: usize, set: &AnnotationSet) -> Self {
        let groups = set
            .iter()
            .filter(|((p, _), anns)| *p == page && !anns.is_empty())
            .map(|((_, g), anns)| GroupAnnotations { group: *g, annotations: anns.clone() })
            .collect();
        Self { page, groups }
    }
}

/// One labelled span as written by the segmentation stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanRecord<T> {
    pub group: usize,
    pub start: usize,
    pub end: usize,
    pub label: SpanLabel,
    pub fired_rule: Rule,
    pub bbox: BBox<T>,
    pub text: String,
    pub lines: usize,
    pub style: StyleInfo<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageSpans<T> {
    pub page: usize,
    pub spans: Vec<SpanRecord<T>>,
}

impl<T: Scalar> PageSpans<T> {
    pub fn from_spans(page: usize, spans: &[LabeledSpan<T>]) -> Self {
        let spans = spans
            .iter()
            .map(|s| SpanRecord {
                group: s.group_index,
                start: s.start,
                end: s.end,
                label: s.label,
                fired_rule: s.fired_rule,
                bbox: s.bbox,
                text: s.text.clone(),
                lines: s.lines,
                style: s.style_summary.clone(),
            })
            .collect();
        Self { page, spans }
    }

    pub fn to_spans(&self) -> Vec<LabeledSpan<T>> {
        self.spans
            .iter()
            .map(|r| LabeledSpan {
                page_index: self.page,
                group_index: r.group,
                start: r.start,
                end: r.end,
                label: r.label,
                text: r.text.clone(),
                bbox: r.bbox,
                lines: r.lines,
                style_summary: r.style.clone(),
                fired_rule: r.fired_rule,
            })
            .collect()
    }

    pub fn items(&self) -> Vec<SpanItem> {
        self.spans.iter().map(|r| SpanItem { group: r.group, start: r.start, end: r.end, label: r.label }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageTree<T> {
    pub page: usize,
    #[serde(flatten)]
    pub tree: ReadingTree<T>,
}

impl<T: Scalar> PageTree<T> {
    /// Rejects trees whose node lists do not satisfy the tree invariants.
    pub fn checked(self) -> Result<Self, FormatError> {
        let v = self.tree.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(FormatError::Invalid { page: self.page, message: v.join("; ") })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageBlocks {
    pub page: usize,
    pub blocks: Vec<DirectoryBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub page: usize,
    pub is_directory: bool,
    pub score: f64,
}

impl From<PageClassification> for ClassificationRecord {
    fn from(c: PageClassification) -> Self {
        Self { page: c.page, is_directory: c.prediction.is_directory, score: c.prediction.score }
    }
}

/// A manually labelled span; `parent` indexes another span of the same page,
/// `None` meaning the root. `text` may be omitted when the document is at hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSpan {
    pub group: usize,
    pub start: usize,
    pub end: usize,
    pub label: SpanLabel,
    #[serde(default)]
    pub parent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldPage {
    pub page: usize,
    pub is_directory: bool,
    #[serde(default)]
    pub spans: Vec<GoldSpan>,
}

impl GoldPage {
    pub fn items(&self) -> Vec<SpanItem> {
        self.spans.iter().map(|s| SpanItem { group: s.group, start: s.start, end: s.end, label: s.label }).collect()
    }

    /// The gold reading tree. Span texts come from the spans themselves or,
    /// failing that, from `doc`.
    pub fn tree<T: Scalar>(&self, doc: Option<&VisualPage<T>>) -> Result<ReadingTree<T>, FormatError> {
        let bad = |message: String| FormatError::Invalid { page: self.page, message };
        let scored: Vec<usize> = (0..self.spans.len()).filter(|&i| self.spans[i].label != SpanLabel::Neither).collect();
        let mut slot = vec![None; self.spans.len()];
        for (k, &i) in scored.iter().enumerate() {
            slot[i] = Some(k);
        }
        let mut links = Vec::with_capacity(scored.len());
        for &i in &scored {
            let s = &self.spans[i];
            let text = match (&s.text, doc) {
                (Some(t), _) => t.clone(),
                (None, Some(page)) => {
                    let g = page.groups.get(s.group).ok_or_else(|| bad(format!("span {i} refers to missing group {}", s.group)))?;
                    let text = group_text(g);
                    if s.start > s.end || s.end > text.chars().count() {
                        return Err(bad(format!("span {i} range {}..{} exceeds group text", s.start, s.end)));
                    }
                    char_slice(&text, s.start, s.end).to_string()
                }
                (None, None) => return Err(bad(format!("span {i} has no text and no document was given"))),
            };
            let parent = match s.parent {
                None => None,
                Some(p) => Some(
                    slot.get(p).copied().flatten().ok_or_else(|| bad(format!("span {i} has parent {p}, which is not a header or body span")))?,
                ),
            };
            let kind = if s.label == SpanLabel::Header { NodeKind::Header } else { NodeKind::Body };
            links.push(TreeLink { kind, text, parent, cluster: None, bbox: None });
        }
        let tree = ReadingTree::from_links(links).map_err(bad)?;
        let v = tree.violations();
        if v.is_empty() {
            Ok(tree)
        } else {
            Err(bad(v.join("; ")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldFile {
    pub pages: Vec<GoldPage>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold(spans: Vec<GoldSpan>) -> GoldPage {
        GoldPage { page: 0, is_directory: true, spans }
    }

    fn span(label: SpanLabel, parent: Option<usize>, text: &str) -> GoldSpan {
        GoldSpan { group: 0, start: 0, end: 0, label, parent, text: Some(text.into()) }
    }

    #[test]
    fn gold_tree_from_parents() {
        let g = gold(vec![
            span(SpanLabel::Header, None, "DIRECTORY"),
            span(SpanLabel::Neither, None, "Page 1"),
            span(SpanLabel::Header, Some(0), "Auditor"),
            span(SpanLabel::Body, Some(2), "KPMG"),
        ]);
        let t: ReadingTree<f64> = g.tree(None).unwrap();
        let blocks = crate::tree::directory_blocks(&t);
        assert_eq!(blocks, vec![DirectoryBlock { headers: vec!["DIRECTORY".into(), "Auditor".into()], body: "KPMG".into() }]);
    }

    #[test]
    fn gold_parent_on_neither_rejected() {
        let g = gold(vec![span(SpanLabel::Neither, None, "x"), span(SpanLabel::Body, Some(0), "y")]);
        assert!(g.tree::<f64>(None).is_err());
    }

    #[test]
    fn gold_tree_must_be_valid() {
        let g = gold(vec![span(SpanLabel::Body, None, "x"), span(SpanLabel::Header, Some(0), "y")]);
        assert!(g.tree::<f64>(None).is_err());
    }

    #[test]
    fn json_errors_carry_path() {
        let err = from_json::<GoldFile>(br#"{"pages":[{"page":0,"is_directory":"yes"}]}"#).unwrap_err();
        match err {
            FormatError::Json { path, .. } => assert_eq!(path, "pages[0].is_directory"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn page_tree_round_trip() {
        let t = PageTree { page: 3, tree: ReadingTree::<f64>::root_only() };
        let back: PageTree<f64> = from_json(to_json(&t).as_bytes()).unwrap();
        assert_eq!(back, t);
        assert!(to_json(&t).contains("\"nodes\""));
    }
}
