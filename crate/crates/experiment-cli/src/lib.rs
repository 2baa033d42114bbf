//! Experiment runner: TOML configs in, CSV, SVG and a digest manifest out.
//!
//! Every numeric artifact depends only on the config and its seeds, so the
//! same config reproduces the same bytes at any thread count.

pub mod analysis;
pub mod config;
pub mod manifest;
pub mod run;
pub mod svg;

use std::path::Path;

pub use analysis::{min_formula_mean, pooled_brownianity, zero_set_dimension, MinFormulaStats};
pub use config::{parse_config, replicate_seed, Command, ExperimentConfig, ModelSpec};
pub use manifest::{digest, write_manifest, Artifact, Manifest};
pub use run::{run_experiment, RunOutcome};
pub use svg::{render_svg, Layer, SvgInput, SvgStyle};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{context}: {message}")]
    Engine { context: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    pub fn engine(context: impl Into<String>, e: impl std::fmt::Display) -> Self {
        CliError::Engine { context: context.into(), message: e.to_string() }
    }
}
