#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

#[path = "../../../core/tests/common/mod.rs"]
pub mod fixtures;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_dirtree")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

/// Runs the binary with no configuration file in effect.
pub fn dirtree(args: &[&str]) -> Output {
    Command::new(bin()).args(args).env_remove("DIRTREE_CONFIG").output().expect("binary runs")
}

pub fn ok(args: &[&str]) -> Vec<u8> {
    let out = dirtree(args);
    assert!(out.status.success(), "dirtree {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// Trains a model on a synthetic, margin-separated feature table.
pub fn train_model(dir: &Path, seed: u64) -> PathBuf {
    let csv = dir.join("pool.csv");
    let model = dir.join(format!("model-{seed}.json"));
    ok(&["synth", "--pos", "83", "--neg", "800", "--seed", "11", "--csv", p(&csv)]);
    ok(&["train", "--csv", p(&csv), "--pos", "83", "--neg", "800", "--seed", &seed.to_string(), "--out", p(&model)]);
    model
}
