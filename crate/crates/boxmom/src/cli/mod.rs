//! Batch experiment driver behind the `boxmom` binary: strict JSON configs
//! in, deterministic CSV/JSON artifacts plus a hashed manifest out.

pub mod config;
pub mod experiments;
pub mod manifest;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{run_experiment, RunOptions};

use crate::error::Result;
use std::fs;
use std::path::PathBuf;

/// Loads the config, runs the experiment, writes artifacts and the manifest.
pub fn run(kind: ExperimentKind, config_path: &PathBuf, opts: &RunOptions) -> Result<()> {
    let text = fs::read_to_string(config_path)?;
    let cfg = ExperimentConfig::parse(&text)?;
    let files = run_experiment(&cfg, kind, opts)?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    manifest::write_manifest(&opts.out_dir, &kind.to_string(), &text, seed, &files)?;
    Ok(())
}
