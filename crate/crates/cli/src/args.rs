use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirtree::pipeline::PageSelection;

#[derive(Debug, Parser)]
#[command(name = "dirtree", version, about = "Parse directory pages into header/body reading trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a visual JSON document against the schema and geometry rules.
    Validate { doc: PathBuf },
    /// Write entity and pattern annotations per group.
    Annotate {
        doc: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the 15 page features.
    Features {
        doc: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also write a training CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Gold file supplying page labels for the CSV.
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Label every page in the CSV as directory (true) or not (false).
        #[arg(long)]
        label: Option<bool>,
    },
    /// Write a synthetic training CSV.
    Synth {
        #[arg(long)]
        pos: usize,
        #[arg(long)]
        neg: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Resample a feature CSV and train the page classifier.
    Train {
        #[arg(long)]
        csv: PathBuf,
        /// Positive rows after resampling (default: as in the CSV).
        #[arg(long)]
        pos: Option<usize>,
        /// Negative rows after resampling (default: as in the CSV).
        #[arg(long)]
        neg: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        trees: usize,
        /// Maximum depth; unlimited when omitted.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 0.8)]
        max_features: f64,
        #[arg(long, default_value_t = 2)]
        min_leaf: usize,
    },
    /// Label each page as directory or not.
    Classify {
        doc: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Label header, body and other spans on the selected pages.
    Segment {
        doc: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        select: Select,
    },
    /// Build reading trees, from the document or from `segment` output.
    Tree {
        doc: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        select: Select,
        /// Spans written by `segment`, used instead of segmenting `doc`.
        #[arg(long)]
        spans: Option<PathBuf>,
    },
    /// Emit directory blocks, from the document or from `tree` output.
    Blocks {
        doc: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        select: Select,
        /// Trees written by `tree`, used instead of processing `doc`.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Score predictions against gold annotations.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, value_enum)]
        stage: Stage,
        /// Document providing span texts for gold trees.
        #[arg(long)]
        doc: Option<PathBuf>,
        /// Report file; the table still goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Gazetteer JSON (built-in lists when omitted).
    #[arg(long)]
    pub gazetteer: Option<PathBuf>,
    /// Classifier model JSON.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Decision threshold on the classifier score.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Select {
    /// `auto` (classifier-positive pages), `all`, or a comma-separated list.
    #[arg(long, default_value = "auto")]
    pub pages: PageSelection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Classifier,
    Segmentation,
    Tree,
}
