use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dirtree::annotator::{Gazetteer, RuleAnnotator};
use dirtree::features::FeatureVector;
use dirtree::forest::{self, resample, Dataset, ForestHyperparams, ForestModel, Sample, DEFAULT_THRESHOLD};
use dirtree::formats::{from_json, to_json, ClassificationRecord, GoldFile, PageAnnotations, PageBlocks, PageSpans, PageTree, Pages};
use dirtree::metrics::{align_pages, classifier_counts, segmentation_counts, tree_counts, Counts, Report};
use dirtree::pipeline::{PageSelection, Pipeline};
use dirtree::synth;
use dirtree::tree::{build_tree, directory_blocks, ReadingTree, TreeParams};
use dirtree::visual::{parse_document, VisualPage};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Command, Common, Select, Stage};
use crate::config::PipelineConfig;

/// An internal consistency check failed; reported with exit code 2.
#[derive(Debug)]
pub struct Invariant(pub String);

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "internal invariant violated: {}", self.0)
    }
}

impl std::error::Error for Invariant {}

pub fn execute(cmd: Command, cfg: &PipelineConfig) -> Result<()> {
    match cmd {
        Command::Validate { doc } => {
            let pages = load_doc(&doc)?;
            say(&format!("{}: valid, {} page(s)\n", doc.display(), pages.len()))?;
            Ok(())
        }
        Command::Annotate { doc, common } => {
            let pages = load_doc(&doc)?;
            let env = Env::new(cfg, &common, false)?;
            let run = env.pipeline().analyze(&pages);
            let out: Vec<PageAnnotations> = run.iter().map(|a| PageAnnotations::from_set(a.page, &a.annotations)).collect();
            emit(cfg, &common.out, "annotations.json", &to_json(&Pages::new(out)))
        }
        Command::Features { doc, common, csv, gold, label } => features(cfg, &doc, &common, csv, gold, label),
        Command::Synth { pos, neg, seed, csv } => {
            let data: Dataset<f64> = synth::feature_dataset(&mut synth::seeded(seed), pos, neg);
            write_csv(cfg, &csv, &data)
        }
        Command::Train { csv, pos, neg, seed, out, trees, depth, max_features, min_leaf } => {
            let file = fs::File::open(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let data: Dataset<f64> = Dataset::from_csv(file).with_context(|| format!("parsing {}", csv.display()))?;
            let (have_pos, have_neg) = data.class_counts();
            let data = resample(&data, pos.unwrap_or(have_pos), neg.unwrap_or(have_neg), seed)?;
            let hp = ForestHyperparams { n_trees: trees, max_depth: depth, max_features_fraction: max_features, min_samples_leaf: min_leaf, seed };
            let model = forest::train(&data, &hp)?;
            emit(cfg, &Some(out), "model.json", &model.to_json())
        }
        Command::Classify { doc, common } => {
            let pages = load_doc(&doc)?;
            let env = Env::new(cfg, &common, true)?;
            let p = env.pipeline();
            let out: Vec<ClassificationRecord> = p.classify(&p.analyze(&pages))?.into_iter().map(Into::into).collect();
            emit(cfg, &common.out, "classify.json", &to_json(&Pages::new(out)))
        }
        Command::Segment { doc, common, select } => {
            let pages = load_doc(&doc)?;
            let env = Env::new(cfg, &common, needs_model(&select))?;
            let run = env.pipeline().run(&pages, &select.pages)?;
            let out: Vec<PageSpans<f64>> = run.parses.iter().map(|p| PageSpans::from_spans(p.page, &p.spans)).collect();
            emit(cfg, &common.out, "segment.json", &to_json(&Pages::new(out)))
        }
        Command::Tree { doc, common, select, spans } => {
            let trees = match (spans, doc) {
                (Some(path), _) => {
                    let spans: Pages<PageSpans<f64>> = load_json(&path)?;
                    let params = cfg.tree_params.clone();
                    spans.pages.par_iter().map(|p| PageTree { page: p.page, tree: build_tree(&p.to_spans(), &params) }).collect()
                }
                (None, Some(doc)) => {
                    let pages = load_doc(&doc)?;
                    let env = Env::new(cfg, &common, needs_model(&select))?;
                    let run = env.pipeline().run(&pages, &select.pages)?;
                    run.parses.into_iter().map(|p| PageTree { page: p.page, tree: p.tree }).collect::<Vec<_>>()
                }
                (None, None) => bail!("either a document or --spans is required"),
            };
            for t in &trees {
                check_tree(t.page, &t.tree)?;
            }
            emit(cfg, &common.out, "tree.json", &to_json(&Pages::new(trees)))
        }
        Command::Blocks { doc, common, select, tree } => {
            let blocks: Vec<PageBlocks> = match (tree, doc) {
                (Some(path), _) => {
                    let trees: Pages<PageTree<f64>> = load_json(&path)?;
                    let mut out = Vec::with_capacity(trees.pages.len());
                    for t in trees.pages {
                        let t = t.checked()?;
                        out.push(PageBlocks { page: t.page, blocks: directory_blocks(&t.tree) });
                    }
                    out
                }
                (None, Some(doc)) => {
                    let pages = load_doc(&doc)?;
                    let env = Env::new(cfg, &common, needs_model(&select))?;
                    let run = env.pipeline().run(&pages, &select.pages)?;
                    let mut out = Vec::with_capacity(run.parses.len());
                    for p in run.parses {
                        check_tree(p.page, &p.tree)?;
                        out.push(PageBlocks { page: p.page, blocks: p.blocks });
                    }
                    out
                }
                (None, None) => bail!("either a document or --tree is required"),
            };
            emit(cfg, &common.out, "blocks.json", &to_json(&Pages::new(blocks)))
        }
        Command::Eval { pred, gold, stage, doc, out } => eval(cfg, &pred, &gold, stage, doc.as_deref(), &out),
    }
}

fn needs_model(select: &Select) -> bool {
    select.pages == PageSelection::Auto
}

fn check_tree(page: usize, tree: &ReadingTree<f64>) -> Result<()> {
    let v = tree.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(Invariant(format!("tree of page {page}: {}", v.join("; "))).into())
    }
}

/// Resources resolved from flags first, then the configuration.
struct Env {
    annotator: RuleAnnotator,
    model: Option<ForestModel<f64>>,
    threshold: f64,
    params: TreeParams<f64>,
}

impl Env {
    fn new(cfg: &PipelineConfig, common: &Common, need_model: bool) -> Result<Self> {
        let gazetteer = match common.gazetteer.as_ref().or(cfg.gazetteer.as_ref()) {
            Some(path) => {
                let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
                Gazetteer::from_json(&bytes).and_then(Gazetteer::validated).with_context(|| format!("parsing {}", path.display()))?
            }
            None => Gazetteer::builtin(),
        };
        let model = match common.model.as_ref().or(cfg.model.as_ref()) {
            Some(path) => {
                let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
                Some(ForestModel::from_json(&bytes).with_context(|| format!("parsing {}", path.display()))?)
            }
            None if need_model => bail!("a classifier model is required (--model or the config `model` field)"),
            None => None,
        };
        let threshold = common.threshold.or(cfg.threshold).unwrap_or(DEFAULT_THRESHOLD);
        if !(0.0..=1.0).contains(&threshold) {
            bail!("threshold must lie in [0, 1], got {threshold}");
        }
        Ok(Self { annotator: RuleAnnotator::new(&gazetteer), model, threshold, params: cfg.tree_params.clone() })
    }

    fn pipeline(&self) -> Pipeline<'_, f64> {
        Pipeline { annotator: &self.annotator, model: self.model.as_ref(), threshold: self.threshold, params: self.params.clone() }
    }
}

fn load_doc(path: &Path) -> Result<Vec<VisualPage<f64>>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_document(&bytes).with_context(|| format!("{} is not a valid visual document", path.display()))
}

fn load_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    from_json(&bytes).with_context(|| format!("parsing {}", path.display()))
}

/// Where output goes: `--out` (under the configured output directory when
/// relative), else a default file name in the output directory, else stdout.
fn target(cfg: &PipelineConfig, out: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    match (out, &cfg.output_dir) {
        (Some(o), Some(dir)) if o.is_relative() => Some(dir.join(o)),
        (Some(o), _) => Some(o.clone()),
        (None, Some(dir)) => Some(dir.join(default_name)),
        (None, None) => None,
    }
}

fn emit(cfg: &PipelineConfig, out: &Option<PathBuf>, default_name: &str, text: &str) -> Result<()> {
    match target(cfg, out, default_name) {
        Some(path) => write_file(&path, text.as_bytes()),
        None => {
            say(&format!("{text}\n"))
        }
    }
}

/// Writes to standard output; a closed pipe (`| head`) is not an error.
fn say(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing to standard output"),
        _ => Ok(()),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn write_csv(cfg: &PipelineConfig, csv: &Path, data: &Dataset<f64>) -> Result<()> {
    let path = target(cfg, &Some(csv.to_path_buf()), "features.csv").expect("explicit path");
    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    write_file(&path, &buf)
}

#[derive(Serialize)]
struct FeatureRecord {
    page: usize,
    features: FeatureVector<f64>,
}

fn features(cfg: &PipelineConfig, doc: &Path, common: &Common, csv: Option<PathBuf>, gold: Option<PathBuf>, label: Option<bool>) -> Result<()> {
    let pages = load_doc(doc)?;
    let env = Env::new(cfg, common, false)?;
    let analyses = env.pipeline().analyze(&pages);
    if let Some(csv) = csv {
        let labels: BTreeMap<usize, bool> = match (gold, label) {
            (Some(g), _) => load_json::<GoldFile>(&g)?.pages.into_iter().map(|p| (p.page, p.is_directory)).collect(),
            (None, Some(l)) => (0..pages.len()).map(|p| (p, l)).collect(),
            (None, None) => bail!("--csv needs page labels from --gold or --label"),
        };
        let mut rows = Vec::with_capacity(analyses.len());
        for a in &analyses {
            let Some(&is_directory) = labels.get(&a.page) else { bail!("no label for page {}", a.page) };
            rows.push(Sample { features: a.features, is_directory });
        }
        write_csv(cfg, &csv, &Dataset::new(rows))?;
    }
    let out: Vec<FeatureRecord> = analyses.into_iter().map(|a| FeatureRecord { page: a.page, features: a.features }).collect();
    emit(cfg, &common.out, "features.json", &to_json(&Pages::new(out)))
}

const TREE_METRICS: [&str; 3] = ["dir_block", "body_parent", "nodes"];

fn eval(cfg: &PipelineConfig, pred: &Path, gold: &Path, stage: Stage, doc: Option<&Path>, out: &Option<PathBuf>) -> Result<()> {
    let gold: GoldFile = load_json(gold)?;
    let report = match stage {
        Stage::Classifier => {
            let pred: Pages<ClassificationRecord> = load_json(pred)?;
            let pages = align_pages(pred.pages.iter().map(|p| (p.page, p.is_directory)), gold.pages.iter().map(|g| (g.page, g.is_directory)))?;
            Report::from_page_counts("classifier", pages.into_iter().map(|(k, p, g)| (k, vec![("page", classifier_counts(p, g))])).collect())
        }
        Stage::Segmentation => {
            let pred: Pages<PageSpans<f64>> = load_json(pred)?;
            let pages = align_pages(
                pred.pages.iter().map(|p| (p.page, p.items())),
                gold.pages.iter().filter(|g| g.is_directory).map(|g| (g.page, g.items())),
            )?;
            Report::from_page_counts("segmentation", pages.into_iter().map(|(k, p, g)| (k, vec![("span", segmentation_counts(&p, &g))])).collect())
        }
        Stage::Tree => {
            let pred: Pages<PageTree<f64>> = load_json(pred)?;
            let doc_pages = doc.map(load_doc).transpose()?;
            let mut gold_trees = Vec::new();
            for g in gold.pages.iter().filter(|g| g.is_directory) {
                let page = doc_pages.as_ref().and_then(|d| d.get(g.page));
                gold_trees.push((g.page, g.tree(page)?));
            }
            let mut pred_trees = Vec::new();
            for p in pred.pages {
                let p = p.checked()?;
                pred_trees.push((p.page, p.tree));
            }
            let pages = align_pages(pred_trees, gold_trees)?;
            let rows = pages
                .into_iter()
                .map(|(k, p, g)| {
                    let c = tree_counts(&p, &g);
                    let named: Vec<(&str, Counts)> = TREE_METRICS.into_iter().zip([c.block, c.parent, c.nodes]).collect();
                    (k, named)
                })
                .collect();
            Report::from_page_counts("tree", rows)
        }
    };
    say(&report.to_string())?;
    let json = to_json(&report);
    match target(cfg, out, "report.json") {
        Some(path) => write_file(&path, json.as_bytes()),
        None => {
            say(&format!("{json}\n"))?;
            Ok(())
        }
    }
}
