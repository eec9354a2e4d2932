//! A single CART classification tree grown on Gini impurity.

use std::cmp::Ordering;

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Sample;
use crate::features::N_FEATURES;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNode<T> {
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: T, left: usize, right: usize },
    /// `[negatives, positives]` of the training rows reaching this leaf.
    Leaf { counts: [u32; 2] },
}

/// Tree stored as a flat arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<T> {
    pub nodes: Vec<TreeNode<T>>,
}

impl<T: Scalar> DecisionTree<T> {
    pub fn leaf(counts: [u32; 2]) -> Self {
        Self { nodes: vec![TreeNode::Leaf { counts }] }
    }

    pub fn leaf_for(&self, x: &[T]) -> [u32; 2] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { counts } => return *counts,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Positive fraction of the leaf reached by `x`.
    pub fn score(&self, x: &[T]) -> f64 {
        let [neg, pos] = self.leaf_for(x);
        let total = neg + pos;
        if total == 0 {
            0.0
        } else {
            pos as f64 / total as f64
        }
    }

    pub fn depth(&self) -> usize {
        fn go<T>(nodes: &[TreeNode<T>], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Checks arena consistency: every child index in range and visited once.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(at) = stack.pop() {
            if at >= self.nodes.len() || seen[at] {
                return false;
            }
            seen[at] = true;
            if let TreeNode::Split { feature, left, right, .. } = &self.nodes[at] {
                if *feature >= N_FEATURES {
                    return false;
                }
                stack.push(*left);
                stack.push(*right);
            }
        }
        seen.into_iter().all(|s| s)
    }
}

pub(crate) struct GrowParams {
    pub max_depth: Option<usize>,
    pub n_split_features: usize,
    pub min_samples_leaf: usize,
}

/// Sum of squared class counts over size, i.e. `n * (1 - gini)` for one side.
/// Kept as an exact fraction so equal-impurity splits compare equal.
#[derive(Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn of(counts: [u64; 2]) -> (u128, u128) {
        let n = (counts[0] + counts[1]) as u128;
        ((counts[0] as u128).pow(2) + (counts[1] as u128).pow(2), n)
    }

    /// Purity of a split with children `l` and `r`: `A/nl + B/nr`.
    fn split(l: [u64; 2], r: [u64; 2]) -> Self {
        let (a, nl) = Self::of(l);
        let (b, nr) = Self::of(r);
        Self { num: a * nr + b * nl, den: nl * nr }
    }

    fn node(c: [u64; 2]) -> Self {
        let (a, n) = Self::of(c);
        Self { num: a, den: n }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

struct BestSplit<T> {
    feature: usize,
    threshold: T,
    purity: Purity,
    left: Vec<usize>,
    right: Vec<usize>,
}

pub(crate) struct Grower<'a, T> {
    rows: &'a [Sample<T>],
    params: GrowParams,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<TreeNode<T>>,
    /// Total impurity decrease per feature, unnormalised.
    pub importance: [f64; N_FEATURES],
}

impl<'a, T: Scalar> Grower<'a, T> {
    pub fn new(rows: &'a [Sample<T>], params: GrowParams, rng: &'a mut ChaCha8Rng) -> Self {
        Self { rows, params, rng, nodes: Vec::new(), importance: [0.0; N_FEATURES] }
    }

    /// Grows a tree over the rows at `sample` (indices may repeat).
    pub fn grow(mut self, sample: Vec<usize>) -> (DecisionTree<T>, [f64; N_FEATURES]) {
        let total = sample.len().max(1) as f64;
        self.grow_node(sample, 0, total);
        (DecisionTree { nodes: self.nodes }, self.importance)
    }

    fn counts(&self, idx: &[usize]) -> [u64; 2] {
        let pos = idx.iter().filter(|&&i| self.rows[i].is_directory).count() as u64;
        [idx.len() as u64 - pos, pos]
    }

    fn grow_node(&mut self, idx: Vec<usize>, depth: usize, total: f64) -> usize {
        let at = self.nodes.len();
        let counts = self.counts(&idx);
        self.nodes.push(TreeNode::Leaf { counts: [counts[0] as u32, counts[1] as u32] });

        let pure = counts[0] == 0 || counts[1] == 0;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || idx.len() < 2 * self.params.min_samples_leaf {
            return at;
        }
        let Some(best) = self.best_split(&idx, counts) else { return at };

        let parent = Purity::node(counts);
        self.importance[best.feature] += (best.purity.value() - parent.value()) / total;
        let left = self.grow_node(best.left, depth + 1, total);
        let right = self.grow_node(best.right, depth + 1, total);
        self.nodes[at] = TreeNode::Split { feature: best.feature, threshold: best.threshold, left, right };
        at
    }

    fn best_split(&mut self, idx: &[usize], counts: [u64; 2]) -> Option<BestSplit<T>> {
        let mut features = index::sample(self.rng, N_FEATURES, self.params.n_split_features).into_vec();
        features.sort_unstable();
        let min_leaf = self.params.min_samples_leaf;
        let parent = Purity::node(counts);
        let mut best: Option<(usize, T, Purity)> = None;

        let mut order: Vec<usize> = idx.to_vec();
        for &f in &features {
            let value = |i: usize| self.rows[i].features.0[f];
            order.sort_by(|&a, &b| value(a).partial_cmp(&value(b)).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
            let mut left = [0u64; 2];
            for k in 0..order.len() - 1 {
                left[self.rows[order[k]].is_directory as usize] += 1;
                let (lo, hi) = (value(order[k]), value(order[k + 1]));
                if lo >= hi {
                    continue;
                }
                let n_left = k + 1;
                if n_left < min_leaf || order.len() - n_left < min_leaf {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let purity = Purity::split(left, right);
                // Strictly better only: ties keep the lower feature, then the lower threshold.
                if best.as_ref().is_none_or(|(_, _, p)| purity.cmp(p) == Ordering::Greater) {
                    let mut threshold = (lo + hi) / T::of(2.0);
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some((f, threshold, purity));
                }
            }
        }
        let (feature, threshold, purity) = best?;
        if purity.cmp(&parent) != Ordering::Greater {
            return None;
        }
        let (left, right) = idx.iter().partition(|&&i| self.rows[i].features.0[feature] <= threshold);
        Some(BestSplit { feature, threshold, purity, left, right })
    }
}
