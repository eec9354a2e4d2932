use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dirtree::tree::TreeParams;
use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "DIRTREE_CONFIG";

/// Settings shared by the pipeline commands. Command-line flags take
/// precedence over every field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub gazetteer: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub tree_params: TreeParams<f64>,
    pub threshold: Option<f64>,
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Reads the file named by `DIRTREE_CONFIG`, or the defaults when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = dirtree::formats::from_json(&bytes).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.check().with_context(|| format!("config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        for p in [&self.gazetteer, &self.model].into_iter().flatten() {
            if !p.is_file() {
                bail!("referenced file {} does not exist", p.display());
            }
        }
        if let Some(t) = self.threshold {
            if !(0.0..=1.0).contains(&t) {
                bail!("threshold must lie in [0, 1], got {t}");
            }
        }
        self.tree_params.validate().map_err(anyhow::Error::msg)
    }
}
