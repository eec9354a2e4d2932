//! Random-forest directory-page classifier.
//!
//! Trees are CART classifiers grown on bootstrap samples with a random subset
//! of features considered at each split. Everything is seeded, and each tree
//! derives its own generator from `seed + tree_index`, so training in
//! parallel gives the same model as training sequentially.

mod dataset;
mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dataset::{resample, Dataset, Sample};
pub use tree::{DecisionTree, TreeNode};

use crate::features::{FeatureVector, FEATURE_NAMES, N_FEATURES};
use crate::scalar::Scalar;
use tree::{GrowParams, Grower};

pub const MODEL_VERSION: u32 = 1;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum ForestError {
    #[error("training data has no `{class}` samples")]
    EmptyClass { class: &'static str },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestHyperparams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub max_features_fraction: f64,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl Default for ForestHyperparams {
    fn default() -> Self {
        Self { n_trees: 20, max_depth: None, max_features_fraction: 0.8, min_samples_leaf: 2, seed: 0 }
    }
}

impl ForestHyperparams {
    pub fn validate(&self) -> Result<(), ForestError> {
        let bad = |m: &str| Err(ForestError::InvalidHyperparams(m.to_string()));
        if self.n_trees == 0 {
            return bad("n_trees must be positive");
        }
        if self.max_depth == Some(0) {
            return bad("max_depth must be positive when set");
        }
        if !(self.max_features_fraction > 0.0 && self.max_features_fraction <= 1.0) {
            return bad("max_features_fraction must lie in (0, 1]");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be positive");
        }
        Ok(())
    }

    /// Number of features drawn at each split: `ceil(fraction * 15)`.
    pub fn split_features(&self) -> usize {
        ((self.max_features_fraction * N_FEATURES as f64).ceil() as usize).clamp(1, N_FEATURES)
    }
}

/// SplitMix64 finaliser; decorrelates consecutive per-tree seeds.
pub fn mix_seed(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel<T> {
    pub version: u32,
    pub hyperparams: ForestHyperparams,
    pub feature_order: Vec<String>,
    pub importances: Vec<f64>,
    pub trees: Vec<DecisionTree<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub is_directory: bool,
    pub score: f64,
}

pub fn train<T: Scalar>(data: &Dataset<T>, hp: &ForestHyperparams) -> Result<ForestModel<T>, ForestError> {
    hp.validate()?;
    data.ensure_both_classes()?;
    let params = || GrowParams {
        max_depth: hp.max_depth,
        n_split_features: hp.split_features(),
        min_samples_leaf: hp.min_samples_leaf,
    };
    let n = data.len();
    let grown: Vec<(DecisionTree<T>, [f64; N_FEATURES])> = (0..hp.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(hp.seed.wrapping_add(t as u64)));
            let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            Grower::new(&data.rows, params(), &mut rng).grow(sample)
        })
        .collect();

    let mut importances = [0.0f64; N_FEATURES];
    let mut trees = Vec::with_capacity(grown.len());
    for (tree, imp) in grown {
        let s: f64 = imp.iter().sum();
        if s > 0.0 {
            for (acc, v) in importances.iter_mut().zip(imp) {
                *acc += v / s;
            }
        }
        trees.push(tree);
    }
    Ok(ForestModel {
        version: MODEL_VERSION,
        hyperparams: hp.clone(),
        feature_order: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        importances: normalize_importances(importances).to_vec(),
        trees,
    })
}

/// Grows a single tree on every row of `data`, without bootstrapping. Only
/// feature sampling uses the seed. Returns the tree and its normalised
/// importances.
pub fn grow_tree<T: Scalar>(data: &Dataset<T>, hp: &ForestHyperparams) -> Result<(DecisionTree<T>, [f64; N_FEATURES]), ForestError> {
    hp.validate()?;
    data.ensure_both_classes()?;
    let params = GrowParams { max_depth: hp.max_depth, n_split_features: hp.split_features(), min_samples_leaf: hp.min_samples_leaf };
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(hp.seed));
    let (tree, imp) = Grower::new(&data.rows, params, &mut rng).grow((0..data.len()).collect());
    Ok((tree, normalize_importances(imp)))
}

/// Scales to sum 1; a forest that never split gets a uniform vector.
fn normalize_importances(raw: [f64; N_FEATURES]) -> [f64; N_FEATURES] {
    let s: f64 = raw.iter().sum();
    if s > 0.0 {
        raw.map(|v| v / s)
    } else {
        [1.0 / N_FEATURES as f64; N_FEATURES]
    }
}

impl<T: Scalar> ForestModel<T> {
    /// Builds a model around hand-made trees (importances uniform).
    pub fn from_trees(trees: Vec<DecisionTree<T>>) -> Self {
        let hyperparams = ForestHyperparams { n_trees: trees.len(), ..Default::default() };
        Self {
            version: MODEL_VERSION,
            hyperparams,
            feature_order: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            importances: normalize_importances([0.0; N_FEATURES]).to_vec(),
            trees,
        }
    }

    /// Mean positive-leaf fraction across trees.
    pub fn score(&self, x: &FeatureVector<T>) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        self.trees.iter().map(|t| t.score(x.as_slice())).sum::<f64>() / self.trees.len() as f64
    }

    pub fn predict(&self, x: &FeatureVector<T>) -> Prediction {
        self.predict_with_threshold(x, DEFAULT_THRESHOLD)
    }

    /// Label is positive when `score >= threshold`.
    pub fn predict_with_threshold(&self, x: &FeatureVector<T>, threshold: f64) -> Prediction {
        let score = self.score(x);
        Prediction { is_directory: score >= threshold, score }
    }

    pub fn importances(&self) -> &[f64] {
        &self.importances
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, ForestError> {
        let m: Self = serde_json::from_slice(bytes)?;
        if m.version != MODEL_VERSION {
            return Err(ForestError::Format(format!("unsupported model version {}", m.version)));
        }
        if m.feature_order.iter().map(String::as_str).ne(FEATURE_NAMES.iter().copied()) {
            return Err(ForestError::Format("model feature order does not match this build".into()));
        }
        if m.importances.len() != N_FEATURES {
            return Err(ForestError::Format("model must carry 15 importances".into()));
        }
        if let Some(t) = m.trees.iter().position(|t| !t.is_well_formed()) {
            return Err(ForestError::Format(format!("tree {t} is malformed")));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(x: f64, col: usize) -> FeatureVector<f64> {
        let mut v = [0.0; N_FEATURES];
        v[col] = x;
        FeatureVector(v)
    }

    fn one_d(points: &[(f64, bool)], col: usize) -> Dataset<f64> {
        Dataset::new(points.iter().map(|&(x, y)| Sample { features: fv(x, col), is_directory: y }).collect())
    }

    #[test]
    fn pure_leaf_scores_one() {
        let m = ForestModel::from_trees(vec![DecisionTree::<f64>::leaf([0, 3])]);
        assert_eq!(m.score(&fv(0.0, 0)), 1.0);
    }

    #[test]
    fn tie_resolves_to_directory() {
        let m = ForestModel::from_trees(vec![DecisionTree::<f64>::leaf([0, 3]), DecisionTree::leaf([5, 0])]);
        let p = m.predict(&fv(0.0, 0));
        assert_eq!(p.score, 0.5);
        assert!(p.is_directory);
    }

    #[test]
    fn identical_rows_give_single_leaf() {
        let d = one_d(&[(1.0, true), (1.0, false), (1.0, true)], 0);
        let hp = ForestHyperparams { n_trees: 1, min_samples_leaf: 1, max_features_fraction: 1.0, ..Default::default() };
        let m = train(&d, &hp).unwrap();
        assert_eq!(m.trees[0].nodes.len(), 1);
        assert!(matches!(m.trees[0].nodes[0], TreeNode::Leaf { .. }));
    }

    #[test]
    fn only_informative_feature_gets_importance() {
        let d = one_d(&[(0.0, false), (1.0, false), (5.0, true), (6.0, true), (7.0, true), (0.5, false)], 9);
        let hp = ForestHyperparams { n_trees: 5, min_samples_leaf: 1, max_features_fraction: 1.0, seed: 3, ..Default::default() };
        let m = train(&d, &hp).unwrap();
        assert!((m.importances[9] - 1.0).abs() < 1e-12);
        assert!(m.importances.iter().enumerate().all(|(i, v)| i == 9 || *v == 0.0));
    }

    #[test]
    fn hyperparams_validation() {
        assert!(ForestHyperparams { n_trees: 0, ..Default::default() }.validate().is_err());
        assert!(ForestHyperparams { max_features_fraction: 0.0, ..Default::default() }.validate().is_err());
        assert!(ForestHyperparams { max_depth: Some(0), ..Default::default() }.validate().is_err());
        assert_eq!(ForestHyperparams::default().split_features(), 12);
    }

    #[test]
    fn model_json_rejects_wrong_version() {
        let m = ForestModel::from_trees(vec![DecisionTree::<f64>::leaf([1, 1])]);
        let json = m.to_json().replace("\"version\":1", "\"version\":9");
        assert!(ForestModel::<f64>::from_json(json.as_bytes()).is_err());
    }
}
