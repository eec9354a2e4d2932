//! Evaluation of the three stages against gold annotations.
//!
//! Every score is computed from integer counts, so it can be read out in any
//! [`Fraction`] type, exact rationals included. Scores across pages are
//! micro-averaged: counts are summed first.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Fraction, Scalar};
use crate::segmenter::SpanLabel;
use crate::tree::{directory_blocks, DirectoryBlock, ReadingTree};

/// Parent text used in the body/parent metric for bodies hanging off the root.
pub const ROOT_MARKER: &str = "<ROOT>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("page sets differ: only predicted {only_pred:?}, only gold {only_gold:?}")]
    PageSetMismatch { only_pred: Vec<usize>, only_gold: Vec<usize> },
    #[error("page {0} occurs more than once")]
    DuplicatePage(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, fp, fn_ }
    }

    pub fn prf<R: Fraction>(self) -> Prf<R> {
        Prf::from_counts(self)
    }
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts::new(self.tp + o.tp, self.fp + o.fp, self.fn_ + o.fn_)
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Self {
        iter.fold(Counts::default(), Add::add)
    }
}

/// Precision, recall and F1 with the counts they came from. Any 0/0 is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf<R> {
    pub precision: R,
    pub recall: R,
    pub f1: R,
    pub counts: Counts,
}

fn ratio<R: Fraction>(num: u64, den: u64) -> R {
    if den == 0 {
        R::zero()
    } else {
        R::from_count(num) / R::from_count(den)
    }
}

impl<R: Fraction> Prf<R> {
    pub fn from_counts(c: Counts) -> Self {
        let precision: R = ratio(c.tp, c.tp + c.fp);
        let recall: R = ratio(c.tp, c.tp + c.fn_);
        let sum = precision + recall;
        let f1 = if sum == R::zero() { R::zero() } else { (R::one() + R::one()) * precision * recall / sum };
        Self { precision, recall, f1, counts: c }
    }

    pub fn to_f64(&self) -> Prf<f64> {
        Prf { precision: self.precision.approx(), recall: self.recall.approx(), f1: self.f1.approx(), counts: self.counts }
    }
}

impl Serialize for Prf<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            precision: f64,
            recall: f64,
            f1: f64,
            tp: u64,
            fp: u64,
            #[serde(rename = "fn")]
            fn_: u64,
        }
        Wire {
            precision: self.precision,
            recall: self.recall,
            f1: self.f1,
            tp: self.counts.tp,
            fp: self.counts.fp,
            fn_: self.counts.fn_,
        }
        .serialize(s)
    }
}

/// Size of the multiset intersection of two item lists.
fn multiset_overlap<K: std::hash::Hash + Eq>(a: impl IntoIterator<Item = K>, b: impl IntoIterator<Item = K>) -> u64 {
    let mut bag: HashMap<K, u64> = HashMap::new();
    for k in a {
        *bag.entry(k).or_default() += 1;
    }
    let mut hit = 0;
    for k in b {
        if let Some(n) = bag.get_mut(&k) {
            if *n > 0 {
                *n -= 1;
                hit += 1;
            }
        }
    }
    hit
}

fn multiset_counts<K: std::hash::Hash + Eq>(pred: Vec<K>, gold: Vec<K>) -> Counts {
    let (np, ng) = (pred.len() as u64, gold.len() as u64);
    let tp = multiset_overlap(pred, gold);
    Counts::new(tp, np - tp, ng - tp)
}

fn page_map<V>(items: impl IntoIterator<Item = (usize, V)>) -> Result<BTreeMap<usize, V>, MetricsError> {
    let mut out = BTreeMap::new();
    for (page, v) in items {
        if out.insert(page, v).is_some() {
            return Err(MetricsError::DuplicatePage(page));
        }
    }
    Ok(out)
}

fn same_pages<A, B>(pred: &BTreeMap<usize, A>, gold: &BTreeMap<usize, B>) -> Result<(), MetricsError> {
    let only_pred: Vec<usize> = pred.keys().filter(|k| !gold.contains_key(k)).copied().collect();
    let only_gold: Vec<usize> = gold.keys().filter(|k| !pred.contains_key(k)).copied().collect();
    if only_pred.is_empty() && only_gold.is_empty() {
        Ok(())
    } else {
        Err(MetricsError::PageSetMismatch { only_pred, only_gold })
    }
}

/// Pairs predicted and gold values page by page, failing unless both cover
/// exactly the same pages.
pub fn align_pages<A, B>(
    pred: impl IntoIterator<Item = (usize, A)>,
    gold: impl IntoIterator<Item = (usize, B)>,
) -> Result<Vec<(usize, A, B)>, MetricsError> {
    let pred = page_map(pred)?;
    let mut gold = page_map(gold)?;
    same_pages(&pred, &gold)?;
    Ok(pred.into_iter().map(|(k, a)| (k, a, gold.remove(&k).expect("checked above"))).collect())
}

/// Per-page counts of the directory-page classifier (positive = directory).
pub fn classifier_counts(pred: bool, gold: bool) -> Counts {
    match (pred, gold) {
        (true, true) => Counts::new(1, 0, 0),
        (true, false) => Counts::new(0, 1, 0),
        (false, true) => Counts::new(0, 0, 1),
        (false, false) => Counts::default(),
    }
}

/// `preds` and `golds` are `(page, is_directory)` pairs.
pub fn eval_classifier<R: Fraction>(preds: &[(usize, bool)], golds: &[(usize, bool)]) -> Result<Prf<R>, MetricsError> {
    let pages = align_pages(preds.iter().copied(), golds.iter().copied())?;
    Ok(pages.into_iter().map(|(_, p, g)| classifier_counts(p, g)).sum::<Counts>().prf())
}

/// One scored segmentation item: character range within a group plus label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpanItem {
    pub group: usize,
    pub start: usize,
    pub end: usize,
    pub label: SpanLabel,
}

/// Exact-match counts over Header and Body items of one page.
pub fn segmentation_counts(pred: &[SpanItem], gold: &[SpanItem]) -> Counts {
    let scored = |s: &[SpanItem]| s.iter().filter(|i| i.label != SpanLabel::Neither).copied().collect::<BTreeSet<_>>();
    let (p, g) = (scored(pred), scored(gold));
    let tp = p.intersection(&g).count() as u64;
    Counts::new(tp, p.len() as u64 - tp, g.len() as u64 - tp)
}

pub fn eval_segmentation<R: Fraction>(
    pred: &[(usize, Vec<SpanItem>)],
    gold: &[(usize, Vec<SpanItem>)],
) -> Result<Prf<R>, MetricsError> {
    let pages = align_pages(pred.iter().map(|(k, v)| (*k, v)), gold.iter().map(|(k, v)| (*k, v)))?;
    Ok(pages.into_iter().map(|(_, p, g)| segmentation_counts(p, g)).sum::<Counts>().prf())
}

/// Collapses whitespace runs to one space and trims.
pub fn normalize_text(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn normalized_blocks(blocks: &[DirectoryBlock]) -> Vec<DirectoryBlock> {
    blocks
        .iter()
        .map(|b| DirectoryBlock { headers: b.headers.iter().map(|h| normalize_text(h)).collect(), body: normalize_text(&b.body) })
        .collect()
}

/// Counts of the three tree metrics on one page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TreeCounts {
    /// Whole blocks: header stack and body.
    pub block: Counts,
    /// Body with its immediate parent.
    pub parent: Counts,
    /// Nodes at aligned block positions.
    pub nodes: Counts,
}

impl Add for TreeCounts {
    type Output = TreeCounts;
    fn add(self, o: TreeCounts) -> TreeCounts {
        TreeCounts { block: self.block + o.block, parent: self.parent + o.parent, nodes: self.nodes + o.nodes }
    }
}

impl std::iter::Sum for TreeCounts {
    fn sum<I: Iterator<Item = TreeCounts>>(iter: I) -> Self {
        iter.fold(TreeCounts::default(), Add::add)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeScores<R> {
    pub block: Prf<R>,
    pub parent: Prf<R>,
    pub nodes: Prf<R>,
}

impl TreeCounts {
    pub fn scores<R: Fraction>(self) -> TreeScores<R> {
        TreeScores { block: self.block.prf(), parent: self.parent.prf(), nodes: self.nodes.prf() }
    }
}

fn block_nodes(b: &DirectoryBlock) -> Vec<&str> {
    b.headers.iter().map(String::as_str).chain(std::iter::once(b.body.as_str())).collect()
}

/// Greedy alignment of predicted to gold blocks: repeatedly take the unused
/// pair with the largest node overlap, ties going to the earlier gold block
/// and then the earlier predicted block. Pairs without overlap stay unaligned.
pub fn align_blocks(pred: &[DirectoryBlock], gold: &[DirectoryBlock]) -> Vec<(usize, usize)> {
    let mut cand: Vec<(u64, usize, usize)> = Vec::new();
    for (i, p) in pred.iter().enumerate() {
        for (j, g) in gold.iter().enumerate() {
            let ov = multiset_overlap(block_nodes(p), block_nodes(g));
            if ov > 0 {
                cand.push((ov, j, i));
            }
        }
    }
    cand.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let (mut used_p, mut used_g) = (vec![false; pred.len()], vec![false; gold.len()]);
    let mut out = Vec::new();
    for (_, j, i) in cand {
        if !used_p[i] && !used_g[j] {
            used_p[i] = true;
            used_g[j] = true;
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out
}

/// Tree metric counts computed from the directory blocks of both trees.
pub fn tree_counts_from_blocks(pred: &[DirectoryBlock], gold: &[DirectoryBlock]) -> TreeCounts {
    let pred = normalized_blocks(pred);
    let gold = normalized_blocks(gold);

    let block = multiset_counts(pred.clone(), gold.clone());

    let pair = |b: &DirectoryBlock| (b.body.clone(), b.headers.last().cloned().unwrap_or_else(|| ROOT_MARKER.to_string()));
    let parent = multiset_counts(pred.iter().map(pair).collect(), gold.iter().map(pair).collect());

    let total = |bs: &[DirectoryBlock]| bs.iter().map(|b| b.headers.len() as u64 + 1).sum::<u64>();
    let tp: u64 = align_blocks(&pred, &gold)
        .into_iter()
        .map(|(i, j)| block_nodes(&pred[i]).iter().zip(block_nodes(&gold[j])).filter(|(a, b)| **a == *b).count() as u64)
        .sum();
    let nodes = Counts::new(tp, total(&pred) - tp, total(&gold) - tp);

    TreeCounts { block, parent, nodes }
}

pub fn tree_counts<T: Scalar>(pred: &ReadingTree<T>, gold: &ReadingTree<T>) -> TreeCounts {
    tree_counts_from_blocks(&directory_blocks(pred), &directory_blocks(gold))
}

pub fn eval_tree<R: Fraction, T: Scalar>(pred: &ReadingTree<T>, gold: &ReadingTree<T>) -> TreeScores<R> {
    tree_counts(pred, gold).scores()
}

pub fn eval_tree_pages<R: Fraction, T: Scalar>(
    pred: &[(usize, ReadingTree<T>)],
    gold: &[(usize, ReadingTree<T>)],
) -> Result<TreeScores<R>, MetricsError> {
    let pages = align_pages(pred.iter().map(|(k, v)| (*k, v)), gold.iter().map(|(k, v)| (*k, v)))?;
    Ok(pages.into_iter().map(|(_, p, g)| tree_counts(p, g)).sum::<TreeCounts>().scores())
}

/// Evaluation report: micro-averaged scores plus a per-page breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub stage: String,
    pub scores: BTreeMap<String, Prf<f64>>,
    pub pages: Vec<PageReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageReport {
    pub page: usize,
    pub scores: BTreeMap<String, Prf<f64>>,
}

impl Report {
    /// Builds a report from per-page counts of named metrics.
    pub fn from_page_counts(stage: &str, pages: Vec<(usize, Vec<(&str, Counts)>)>) -> Self {
        let mut totals: BTreeMap<String, Counts> = BTreeMap::new();
        let mut out = Vec::new();
        for (page, metrics) in pages {
            let mut scores = BTreeMap::new();
            for (name, c) in metrics {
                *totals.entry(name.to_string()).or_default() += c;
                scores.insert(name.to_string(), c.prf::<f64>());
            }
            out.push(PageReport { page, scores });
        }
        Report { stage: stage.to_string(), scores: totals.into_iter().map(|(k, c)| (k, c.prf())).collect(), pages: out }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stage: {}", self.stage)?;
        writeln!(f, "{:<12} {:>9} {:>9} {:>9} {:>6} {:>6} {:>6}", "metric", "precision", "recall", "f1", "tp", "fp", "fn")?;
        for (name, p) in &self.scores {
            writeln!(
                f,
                "{:<12} {:>9.3} {:>9.3} {:>9.3} {:>6} {:>6} {:>6}",
                name, p.precision, p.recall, p.f1, p.counts.tp, p.counts.fp, p.counts.fn_
            )?;
        }
        Ok(())
    }
}
