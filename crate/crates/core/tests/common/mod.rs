#![allow(dead_code)]

use dirtree::annotator::{annotate, Gazetteer, RuleAnnotator};
use dirtree::geometry::BBox;
use dirtree::segmenter::{segment_page, LabeledSpan, Rule, SpanLabel};
use dirtree::visual::{parse_document, StyleInfo, VisualPage};

pub const FIG1A: &[u8] = include_bytes!("../fixtures/fig1a.json");

pub fn fig1a_page() -> VisualPage<f64> {
    parse_document::<f64>(FIG1A).expect("fixture parses").remove(0)
}

pub fn fig1a_spans() -> Vec<LabeledSpan<f64>> {
    let page = fig1a_page();
    let ann = RuleAnnotator::new(&Gazetteer::builtin());
    let anns = annotate(0, &page, &ann);
    segment_page(0, &page, &anns).expect("fixture has text")
}

pub fn style(size: f64, bold: bool, italic: bool) -> StyleInfo<f64> {
    StyleInfo { font_family: "Times".into(), font_size: size, bold, italic, color: 0 }
}

/// A span in its own group with the given box (left, top, right, bottom).
pub fn span(group: usize, label: SpanLabel, text: &str, b: [f64; 4], st: StyleInfo<f64>) -> LabeledSpan<f64> {
    let lines = (((b[3] - b[1]) + 2.0) / 12.0).round().max(1.0) as usize;
    LabeledSpan {
        page_index: 0,
        group_index: group,
        start: 0,
        end: text.chars().count(),
        label,
        text: text.into(),
        bbox: BBox::new(b[0], b[1], b[2], b[3]),
        lines,
        style_summary: st,
        fired_rule: if label == SpanLabel::Header { Rule::StyleEmphasis } else { Rule::FallbackBody },
    }
}

pub fn header(group: usize, text: &str, b: [f64; 4]) -> LabeledSpan<f64> {
    span(group, SpanLabel::Header, text, b, style(10.0, true, false))
}

pub fn body(group: usize, text: &str, b: [f64; 4]) -> LabeledSpan<f64> {
    span(group, SpanLabel::Body, text, b, style(10.0, false, false))
}

/// The six blocks the worked example yields, as (header stack, body).
pub fn expected_fig1a_blocks() -> Vec<(Vec<&'static str>, &'static str)> {
    let legal = "Legal Counsel to the Fund and Master Fund";
    vec![
        (
            vec!["DIRECTORY", "Registered Office of the Fund"],
            "Deutsche Bank (Suisse) S.A. 2 Boulevard Konrad Adenauer, L – 1115 Luxemburg, Grand Duchy of Luxembourg",
        ),
        (
            vec!["DIRECTORY", "Administrator of the Fund"],
            "Deutsche Bank (Suisse) S.A. 4th Floor Bahnhofquai 9/11, CH-8023 Zurich, Switzerland",
        ),
        (
            vec!["DIRECTORY", "Auditor of the Fund"],
            "KPMG Luxembourg Société Coopérative 39, Avenue John F. Kennedy, L–1855 Luxembourg, Grand Duchy of Luxembourg",
        ),
        (
            vec!["DIRECTORY", legal, "(as per Hong Kong Legal Matters)"],
            "RAM (LUX) SYSTEMATIC FUNDS 14, boulevard Royal L-2449 LUXEMBOURG",
        ),
        (
            vec!["DIRECTORY", legal, "(as per Singapore Legal Matters)"],
            "BANQUE DE LUXEMBOURG Société anonyme (public limited company) 14, boulevard Royal L-2449 LUXEMBOURG",
        ),
        (
            vec!["DIRECTORY", legal, "(as per Cayman Legal Matters)"],
            "Oddo Asset Management SA 12, boulevard de la Madeleine 75440 Paris Cedex 09 France",
        ),
    ]
}

/// Start of each span's text in the walkthrough order (bottom-right first).
pub const WALKTHROUGH_PREFIXES: [&str; 7] = [
    "Oddo Asset Management",
    "(as per Cayman",
    "BANQUE DE LUXEMBOURG",
    "RAM (LUX)",
    "(as per Singapore",
    "(as per Hong Kong",
    "Legal Counsel to the Fund",
];
