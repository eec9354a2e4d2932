//! Seeded generators for synthetic pages, labelled spans and feature tables,
//! used by the fuzz and classifier tests and by the `synth` CLI command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::{FeatureVector, N_FEATURES};
use crate::forest::{Dataset, Sample};
use crate::geometry::BBox;
use crate::scalar::Scalar;
use crate::segmenter::{LabeledSpan, Rule, SpanLabel};
use crate::visual::{Group, Line, Segment, StyleInfo, VisualPage};

/// The generator every synthetic corpus is drawn from.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "the", "Fund", "of", "and", "Registered", "Office", "Auditor", "Administrator", "Custodian", "Investment", "Manager", "Legal", "Counsel",
    "Deutsche", "Bank", "S.A.", "Ltd", "KPMG", "Luxembourg", "Zurich", "Paris", "boulevard", "Royal", "Avenue", "14,", "39,", "L-2449", "75440",
    "Tel:", "+352 26 26 26 1", "info@example.com", "EUR 100", "12/03/2019", "Directors", "Prospectus", "shares", "class", "net", "asset", "value",
    "-", ":", "(as", "per", "Matters)", "DIRECTORY", "Société", "anonyme", "Grand", "Duchy",
];

const FAMILIES: &[&str] = &["Times", "Helvetica"];
const SIZES: &[f64] = &[8.0, 9.0, 10.0, 10.4, 11.0, 12.0, 14.0, 16.0];
const COLORS: &[u32] = &[0x000000, 0x000000, 0x000000, 0x1F3864, 0xC00000];

fn random_style<T: Scalar, R: Rng>(rng: &mut R) -> StyleInfo<T> {
    StyleInfo {
        font_family: FAMILIES.choose(rng).expect("non-empty").to_string(),
        font_size: T::of(*SIZES.choose(rng).expect("non-empty")),
        bold: rng.gen_bool(0.3),
        italic: rng.gen_bool(0.15),
        color: *COLORS.choose(rng).expect("non-empty"),
    }
}

fn random_words<R: Rng>(rng: &mut R, max: usize) -> String {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| *WORDS.choose(rng).expect("non-empty")).collect::<Vec<_>>().join(" ")
}

/// A random list of labelled spans as the tree builder consumes them. Boxes
/// often snap to two columns and a line grid so that alignment-driven
/// relations actually occur.
pub fn random_span_page<T: Scalar, R: Rng>(rng: &mut R, max_spans: usize) -> Vec<LabeledSpan<T>> {
    let n = rng.gen_range(0..=max_spans);
    (0..n)
        .map(|i| {
            let label = match rng.gen_range(0..20) {
                0..=6 => SpanLabel::Header,
                7..=16 => SpanLabel::Body,
                _ => SpanLabel::Neither,
            };
            let lines = rng.gen_range(1..=4);
            let (left, top) = if rng.gen_bool(0.7) {
                (*[50.0, 315.0].choose(rng).expect("non-empty") + rng.gen_range(0..3) as f64, 40.0 + 12.0 * rng.gen_range(0..60) as f64)
            } else {
                (rng.gen_range(0.0..500.0), rng.gen_range(0.0..780.0))
            };
            let width = rng.gen_range(20.0..300.0);
            let height = 12.0 * lines as f64 - 2.0;
            let text = random_words(rng, 8);
            let fired_rule = match label {
                SpanLabel::Header => Rule::StyleSize,
                SpanLabel::Body => Rule::FallbackBody,
                SpanLabel::Neither => Rule::PageFurniture,
            };
            LabeledSpan {
                page_index: 0,
                group_index: i,
                start: 0,
                end: text.chars().count(),
                label,
                bbox: BBox::new(T::of(left), T::of(top), T::of(left + width), T::of(top + height)),
                lines,
                style_summary: random_style(rng),
                fired_rule,
                text,
            }
        })
        .collect()
}

/// A random page that satisfies every visual-model invariant: segments sit
/// side by side on a line, lines stack inside a group, groups stack down the
/// page inside its bounds.
pub fn random_visual_page<T: Scalar, R: Rng>(rng: &mut R, max_groups: usize) -> VisualPage<T> {
    let (width, height) = (595.0, 842.0);
    let n = rng.gen_range(1..=max_groups);
    let mut groups = Vec::with_capacity(n);
    let mut top = 30.0;
    for gi in 0..n {
        let left = rng.gen_range(20.0..200.0);
        let n_lines = rng.gen_range(1..=4);
        let furniture = gi == 0 && rng.gen_bool(0.3);
        let mut lines = Vec::with_capacity(n_lines);
        let mut y = top;
        for _ in 0..n_lines {
            let n_segs = rng.gen_range(1..=3);
            let mut x = left;
            let mut segments = Vec::with_capacity(n_segs);
            let mut line_h: f64 = 0.0;
            for _ in 0..n_segs {
                let style: StyleInfo<T> = random_style(rng);
                let size = style.font_size.as_f64();
                let text = random_words(rng, 4);
                let w = (text.chars().count() as f64 * size * 0.5).min(width - 20.0 - x).max(1.0);
                if x + w > width - 10.0 {
                    break;
                }
                line_h = line_h.max(size);
                segments.push(Segment { text, bbox: BBox::new(T::of(x), T::of(y), T::of(x + w), T::of(y + size)), style });
                x += w + rng.gen_range(2.0..20.0);
            }
            if segments.is_empty() {
                continue;
            }
            for s in &mut segments {
                s.bbox.bottom = T::of(y + line_h);
            }
            let bbox = BBox::union_all(segments.iter().map(|s| &s.bbox)).expect("non-empty");
            lines.push(Line { bbox, segments });
            y += line_h + 2.0;
        }
        if lines.is_empty() {
            continue;
        }
        let bbox = BBox::union_all(lines.iter().map(|l| &l.bbox)).expect("non-empty");
        if bbox.bottom.as_f64() > height - 10.0 {
            break;
        }
        top = bbox.bottom.as_f64() + rng.gen_range(4.0..30.0);
        groups.push(Group {
            bbox,
            is_page_header: furniture,
            is_page_footer: false,
            border_sides: if rng.gen_bool(0.1) { 4 } else { 0 },
            lines,
        });
    }
    let table_regions = if rng.gen_bool(0.2) {
        vec![BBox::new(T::of(40.0), T::of(300.0), T::of(500.0), T::of(500.0))]
    } else {
        Vec::new()
    };
    VisualPage { width: T::of(width), height: T::of(height), table_regions, groups }
}

fn int<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64
}

fn positive_row<R: Rng>(rng: &mut R) -> [f64; N_FEATURES] {
    let groups = int(rng, 8, 40);
    let orgs = int(rng, 3, 12).min(groups);
    let roles = int(rng, 2, 10).min(groups);
    [
        int(rng, 0, 2),
        int(rng, 0, 2),
        int(rng, 0, 4),
        int(rng, 0, 8),
        int(rng, 0, 2),
        groups,
        rng.gen_range(0.0..0.2),
        int(rng, 2, 12),
        int(rng, 60, 400),
        int(rng, 3, 14),
        int(rng, 0, 3),
        orgs,
        roles,
        (orgs / groups).max(0.2),
        (roles / groups).max(0.1),
    ]
}

fn negative_row<R: Rng>(rng: &mut R) -> [f64; N_FEATURES] {
    [
        int(rng, 0, 15),
        int(rng, 0, 15),
        int(rng, 0, 1),
        int(rng, 0, 2),
        int(rng, 0, 1),
        int(rng, 5, 60),
        rng.gen_range(0.0..0.6),
        int(rng, 0, 1),
        int(rng, 200, 900),
        int(rng, 0, 2),
        int(rng, 0, 8),
        int(rng, 0, 2),
        int(rng, 0, 1),
        rng.gen_range(0.0..0.1),
        rng.gen_range(0.0..0.05),
    ]
}

/// Page-feature table in which directory pages are separated from the rest
/// by a margin on the address, organisation and role counts. Rows are in
/// random order.
pub fn feature_dataset<T: Scalar, R: Rng>(rng: &mut R, n_pos: usize, n_neg: usize) -> Dataset<T> {
    let mut rows = Vec::with_capacity(n_pos + n_neg);
    for _ in 0..n_pos {
        let r = positive_row(rng);
        rows.push(Sample { features: FeatureVector(r.map(T::of)), is_directory: true });
    }
    for _ in 0..n_neg {
        let r = negative_row(rng);
        rows.push(Sample { features: FeatureVector(r.map(T::of)), is_directory: false });
    }
    rows.shuffle(rng);
    Dataset::new(rows)
}
