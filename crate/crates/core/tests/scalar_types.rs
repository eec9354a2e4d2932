mod common;

use common::{expected_fig1a_blocks, FIG1A};
use dirtree::annotator::{annotate, Gazetteer, RuleAnnotator};
use dirtree::pipeline::parse_directory_page;
use dirtree::visual::parse_document;
use dirtree::{ReadingTree32, TreeParams, VisualPage32};

fn blocks_for<T: dirtree::Scalar>(page: &dirtree::visual::VisualPage<T>) -> Vec<(Vec<String>, String)> {
    let anns = annotate(0, page, &RuleAnnotator::new(&Gazetteer::builtin()));
    let parse = parse_directory_page(0, page, &anns, &dirtree::tree::TreeParams::<T>::default()).unwrap();
    parse.blocks.into_iter().map(|b| (b.headers, b.body)).collect()
}

#[test]
fn single_precision_matches_double() {
    let p32: VisualPage32 = parse_document::<f32>(FIG1A).unwrap().remove(0);
    let p64 = parse_document::<f64>(FIG1A).unwrap().remove(0);
    let want: Vec<(Vec<String>, String)> =
        expected_fig1a_blocks().into_iter().map(|(h, b)| (h.into_iter().map(String::from).collect(), b.to_string())).collect();
    assert_eq!(blocks_for(&p32), want);
    assert_eq!(blocks_for(&p64), want);
}

#[test]
fn single_precision_tree_has_same_shape() {
    let page: VisualPage32 = parse_document::<f32>(FIG1A).unwrap().remove(0);
    let anns = annotate(0, &page, &RuleAnnotator::new(&Gazetteer::builtin()));
    let tree: ReadingTree32 = parse_directory_page(0, &page, &anns, &Default::default()).unwrap().tree;
    let wide = parse_directory_page(0, &common::fig1a_page(), &anns, &TreeParams::default()).unwrap().tree;
    assert!(tree.violations().is_empty());
    let narrow: Vec<_> = tree.nodes.iter().map(|n| n.parent).collect();
    let wide: Vec<_> = wide.nodes.iter().map(|n| n.parent).collect();
    assert_eq!(narrow, wide);
}
