mod common;

use common::*;
use dirtree::metrics::normalize_text;
use dirtree::segmenter::SpanLabel;
use dirtree::tree::{
    body_chains, build_tree, cluster_headers, directory_blocks, reading_sequence, same_band, LayoutContext, NodeId, NodeKind, ReadingTree,
    TreeParams,
};

fn params() -> TreeParams<f64> {
    TreeParams::default()
}

#[test]
fn distinct_styles_give_two_clusters() {
    let spans = vec![
        span(0, SpanLabel::Header, "Auditor", [50.0, 50.0, 150.0, 62.0], style(12.0, true, false)),
        span(1, SpanLabel::Header, "Custodian", [50.0, 100.0, 150.0, 110.0], style(10.0, false, true)),
    ];
    assert_eq!(cluster_headers(&spans, &params()), vec![Some(1), Some(2)]);
}

#[test]
fn near_sizes_share_a_cluster() {
    let spans = vec![
        span(0, SpanLabel::Header, "Auditor", [50.0, 50.0, 150.0, 60.0], style(10.0, true, false)),
        span(1, SpanLabel::Body, "KPMG", [50.0, 70.0, 150.0, 80.0], style(10.0, false, false)),
        span(2, SpanLabel::Header, "Custodian", [50.0, 100.0, 150.0, 110.0], style(10.4, true, false)),
    ];
    assert_eq!(cluster_headers(&spans, &params()), vec![Some(1), None, Some(1)]);
}

#[test]
fn size_chain_links_by_single_linkage() {
    // 10.0, 10.4 and 10.8 are linked through 10.4 even though 10.0 and 10.8 differ by 0.8.
    let sizes = [10.0, 10.8, 10.4, 12.0];
    let spans: Vec<_> = sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| span(i, SpanLabel::Header, "Auditor", [50.0, 20.0 * i as f64, 150.0, 20.0 * i as f64 + 10.0], style(s, true, false)))
        .collect();
    assert_eq!(cluster_headers(&spans, &params()), vec![Some(1), Some(1), Some(1), Some(2)]);
}

#[test]
fn fig1a_panel_header_and_jurisdiction_headers_differ() {
    let spans = fig1a_spans();
    let clusters = cluster_headers(&spans, &params());
    let find = |p: &str| clusters[spans.iter().position(|s| s.text.starts_with(p)).unwrap()];
    assert_ne!(find("Legal Counsel"), find("(as per Hong Kong"));
    assert_eq!(find("(as per Hong Kong"), find("(as per Cayman"));
}

#[test]
fn sixty_percent_overlap_shares_band() {
    // Heights 10; overlap 6.
    let a = body(0, "left", [50.0, 100.0, 100.0, 110.0]);
    let b = body(1, "right", [200.0, 104.0, 260.0, 114.0]);
    assert!(same_band(&a.bbox, &b.bbox, 0.5));
    assert_eq!(reading_sequence(&[b.clone(), a.clone()], &params()), vec![1, 0]);
    let c = body(2, "lower", [200.0, 106.0, 260.0, 116.0]);
    assert!(!same_band(&a.bbox, &c.bbox, 0.5));
}

#[test]
fn singleton_sequence_and_neither_excluded() {
    let spans = vec![
        span(0, SpanLabel::Neither, "Page 1", [50.0, 10.0, 100.0, 20.0], style(8.0, false, false)),
        body(1, "x", [50.0, 100.0, 100.0, 110.0]),
    ];
    assert_eq!(reading_sequence(&spans, &params()), vec![1]);
}

#[test]
fn fig1a_reversed_walkthrough() {
    let spans = fig1a_spans();
    let seq = reading_sequence(&spans, &params());
    let rev: Vec<&str> = seq.iter().rev().map(|&i| spans[i].text.as_str()).collect();
    for (k, prefix) in WALKTHROUGH_PREFIXES.iter().enumerate() {
        assert!(rev[k].starts_with(prefix), "position {k}: {:?}", rev[k]);
    }
    assert_eq!(*rev.last().unwrap(), "DIRECTORY");
}

#[test]
fn can_parent_cases() {
    let p = params();
    let panel = span(0, SpanLabel::Header, "Legal Counsel", [140.0, 275.0, 435.0, 285.0], style(10.0, true, false));
    // Overlap with [50, 290]: 150 of 240 (62%), left edge well left of the header.
    let left_body = body(1, "RAM", [50.0, 318.0, 290.0, 352.0]);
    // 40% overlap: [80, 180] vs header from 140 → 40 of 100.
    let narrow = body(2, "narrow", [80.0, 400.0, 180.0, 410.0]);
    let above = body(3, "above", [140.0, 200.0, 300.0, 210.0]);
    let same_a = header(4, "Auditor of the Fund", [50.0, 500.0, 200.0, 510.0]);
    let same_b = header(5, "Custodian of the Fund", [50.0, 540.0, 200.0, 550.0]);
    let spans = [&panel, &left_body, &narrow, &above, &same_a, &same_b];
    let ctx = LayoutContext::new(spans.to_vec(), &p);
    assert!(ctx.can_parent(0, 1));
    assert!(ctx.can_parent(0, 2));
    assert!(!ctx.can_parent(0, 3));
    assert_eq!(ctx.clusters[4], ctx.clusters[5]);
    assert!(!ctx.can_parent(4, 5));
    // A body never parents through this predicate.
    assert!(!ctx.can_parent(1, 2));
}

#[test]
fn same_entry_cases() {
    let p = params();
    let h = header(0, "Auditor", [50.0, 100.0, 200.0, 110.0]);
    // Line height 10; the second body starts 12 below the first ends (1.2 line heights).
    let b1 = body(1, "KPMG", [50.0, 118.0, 250.0, 128.0]);
    let b2 = body(2, "Luxembourg", [52.0, 140.0, 250.0, 150.0]);
    let far = body(3, "Far away", [50.0, 200.0, 250.0, 210.0]);
    let other_col = body(4, "Other column", [315.0, 140.0, 500.0, 150.0]);
    let mut split = body(5, "same group", [50.0, 400.0, 250.0, 410.0]);
    split.group_index = 1;
    let spans = [&h, &b1, &b2, &far, &other_col, &split];
    let ctx = LayoutContext::new(spans.to_vec(), &p);
    assert_eq!(ctx.median_line_height, 10.0);
    assert!(ctx.same_entry(1, 2));
    assert!(!ctx.same_entry(2, 3));
    assert!(!ctx.same_entry(1, 4));
    assert!(ctx.same_entry(1, 5));
}

#[test]
fn header_between_bodies_blocks_chaining() {
    let p = params();
    let b1 = body(0, "First", [50.0, 100.0, 250.0, 110.0]);
    let h = header(1, "Custodian", [50.0, 112.0, 200.0, 120.0]);
    let b2 = body(2, "Second", [50.0, 124.0, 250.0, 134.0]);
    let ctx = LayoutContext::new(vec![&b1, &h, &b2], &p);
    assert!(!ctx.same_entry(0, 2));
}

#[test]
fn empty_spans_give_root_only() {
    let t = build_tree::<f64>(&[], &params());
    assert_eq!(t, ReadingTree::root_only());
    assert!(directory_blocks(&t).is_empty());
}

#[test]
fn single_body_hangs_off_root() {
    let t = build_tree(&[body(0, "x", [50.0, 100.0, 150.0, 110.0])], &params());
    assert_eq!(t.nodes.len(), 2);
    assert_eq!(t.nodes[0].children, vec![NodeId(1)]);
    assert!(t.violations().is_empty());
}

#[test]
fn two_headerless_bodies() {
    // Far apart: both under the root.
    let t = build_tree(&[body(0, "x", [50.0, 100.0, 150.0, 110.0]), body(1, "y", [50.0, 300.0, 150.0, 310.0])], &params());
    assert_eq!(t.nodes[0].children, vec![NodeId(1), NodeId(2)]);
    // Adjacent and aligned: chained.
    let t = build_tree(&[body(0, "x", [50.0, 100.0, 150.0, 110.0]), body(1, "y", [50.0, 112.0, 150.0, 122.0])], &params());
    assert_eq!(t.nodes[0].children, vec![NodeId(1)]);
    assert_eq!(t.nodes[1].children, vec![NodeId(2)]);
    let blocks = directory_blocks(&t);
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0].body, "x y");
    assert!(blocks[0].headers.is_empty());
}

#[test]
fn childless_header_moves_to_root() {
    let spans = vec![header(0, "Directors", [50.0, 100.0, 150.0, 110.0]), header(1, "Decorative", [50.0, 300.0, 150.0, 310.0])];
    let mut spans = spans;
    spans[1].style_summary = style(14.0, true, false);
    let t = build_tree(&spans, &params());
    assert!(t.violations().is_empty(), "{:?}", t.violations());
    assert_eq!(t.nodes[0].children, vec![NodeId(1), NodeId(2)]);
    assert!(directory_blocks(&t).is_empty());
}

fn fig1a_tree() -> ReadingTree<f64> {
    build_tree(&fig1a_spans(), &params())
}

#[test]
fn fig1a_tree_shape() {
    let t = fig1a_tree();
    assert!(t.violations().is_empty(), "{:?}", t.violations());
    let by_text = |p: &str| t.nodes.iter().find(|n| n.text.starts_with(p)).unwrap();
    let dir = by_text("DIRECTORY");
    assert_eq!(dir.parent, Some(NodeId::ROOT));
    assert_eq!(t.nodes[0].children, vec![dir.id]);
    let legal = by_text("Legal Counsel to the Fund");
    assert_eq!(legal.parent, Some(dir.id));
    let kids: Vec<&str> = legal.children.iter().map(|c| t.node(*c).text.as_str()).collect();
    assert_eq!(kids, vec!["(as per Hong Kong Legal Matters)", "(as per Singapore Legal Matters)", "(as per Cayman Legal Matters)"]);
    for c in &legal.children {
        let n = t.node(*c);
        assert_eq!(n.kind, NodeKind::Header);
        assert_eq!(n.children.len(), 1);
        assert_eq!(t.node(n.children[0]).kind, NodeKind::Body);
    }
}

#[test]
fn fig1a_blocks_match_worked_example() {
    let blocks = directory_blocks(&fig1a_tree());
    let got: Vec<(Vec<String>, String)> =
        blocks.iter().map(|b| (b.headers.iter().map(|h| normalize_text(h)).collect(), normalize_text(&b.body))).collect();
    let want: Vec<(Vec<String>, String)> =
        expected_fig1a_blocks().into_iter().map(|(h, b)| (h.into_iter().map(String::from).collect(), b.to_string())).collect();
    assert_eq!(got, want);
}

#[test]
fn fig1a_parent_locality() {
    let spans = fig1a_spans();
    let p = params();
    let seq = reading_sequence(&spans, &p);
    let t = build_tree(&spans, &p);
    let ctx = LayoutContext::new(seq.iter().map(|&i| &spans[i]).collect(), &p);
    for n in &t.nodes[1..] {
        let parent = n.parent.unwrap();
        if parent != NodeId::ROOT && t.node(parent).kind == NodeKind::Header {
            assert!(ctx.can_parent(parent.0 - 1, n.id.0 - 1), "{}", n.text);
        }
    }
}

#[test]
fn fig1a_deleting_a_body_keeps_unrelated_parents() {
    let spans = fig1a_spans();
    let p = params();
    let full = build_tree(&spans, &p);
    let parent_text = |t: &ReadingTree<f64>, text: &str| {
        let n = t.nodes.iter().find(|n| n.text == text).unwrap();
        t.node(n.parent.unwrap()).text.clone()
    };
    for chain in body_chains(&full) {
        let removed: Vec<&str> = chain.iter().map(|id| full.node(*id).text.as_str()).collect();
        let ancestors: Vec<&str> = full.path_to(chain[0]).iter().map(|id| full.node(*id).text.as_str()).collect();
        let kept: Vec<_> = spans.iter().filter(|s| !removed.contains(&s.text.as_str())).cloned().collect();
        let t = build_tree(&kept, &p);
        assert!(t.violations().is_empty());
        for n in &full.nodes[1..] {
            if removed.contains(&n.text.as_str()) || ancestors.contains(&n.text.as_str()) {
                continue;
            }
            assert_eq!(parent_text(&full, &n.text), parent_text(&t, &n.text), "{}", n.text);
        }
    }
}

#[test]
fn tree_serialization_is_deterministic() {
    let a = serde_json::to_string(&fig1a_tree()).unwrap();
    let b = serde_json::to_string(&fig1a_tree()).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("{\"nodes\":[{\"id\":0,\"label\":\"Root\""));
}

#[test]
fn params_validation() {
    assert!(params().validate().is_ok());
    let bad = TreeParams { band_overlap_frac: 1.5, ..params() };
    assert!(bad.validate().is_err());
    let bad = TreeParams { align_tol: 0.0, ..params() };
    assert!(bad.validate().is_err());
}
