//! Parsing of directory pages: page classification, header/body
//! segmentation, reading-tree construction and directory-block emission,
//! plus the evaluation harness for each stage.
//!
//! Everything geometric or statistical is generic over a [`Scalar`]
//! (`f32` or `f64`); scores are generic over a [`Fraction`], which includes
//! exact rationals. The aliases below fix the common choices.

pub mod annotator;
pub mod features;
pub mod forest;
pub mod formats;
pub mod geometry;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod segmenter;
pub mod synth;
pub mod tree;
pub mod visual;

pub use num_rational::Rational64;
pub use scalar::{Fraction, Scalar};

pub type BBox = geometry::BBox<f64>;
pub type VisualPage = visual::VisualPage<f64>;
pub type LabeledSpan = segmenter::LabeledSpan<f64>;
pub type FeatureVector = features::FeatureVector<f64>;
pub type Dataset = forest::Dataset<f64>;
pub type ForestModel = forest::ForestModel<f64>;
pub type ReadingTree = tree::ReadingTree<f64>;
pub type TreeParams = tree::TreeParams<f64>;
pub type Prf = metrics::Prf<f64>;
/// Scores as exact rationals.
pub type ExactPrf = metrics::Prf<Rational64>;

pub type BBox32 = geometry::BBox<f32>;
pub type VisualPage32 = visual::VisualPage<f32>;
pub type ReadingTree32 = tree::ReadingTree<f32>;
pub type ForestModel32 = forest::ForestModel<f32>;
