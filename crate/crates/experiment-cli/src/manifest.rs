use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use model_core::EnvironmentDescriptor;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const MANIFEST_SCHEMA: &str = "manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory.
    pub path: String,
    /// Versioned column set or binary layout.
    pub schema: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool: String,
    pub tool_version: String,
    pub config: Option<ExperimentConfig>,
    pub environments: Vec<EnvironmentDescriptor>,
    /// Scalar results; `None` when undefined for this run (for example an empty mean).
    pub summaries: BTreeMap<String, Option<f64>>,
    pub artifacts: Vec<Artifact>,
    pub wall_clock_seconds: f64,
}

impl Manifest {
    pub fn new(config: Option<ExperimentConfig>) -> Self {
        Self {
            schema: MANIFEST_SCHEMA.into(),
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config,
            environments: Vec::new(),
            summaries: BTreeMap::new(),
            artifacts: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Paths whose file is missing or whose digest no longer matches.
    pub fn verify_digests(&self, dir: &Path) -> Vec<String> {
        self.artifacts
            .iter()
            .filter(|a| fs::read(dir.join(&a.path)).map_or(true, |b| digest(&b) != a.sha256))
            .map(|a| a.path.clone())
            .collect()
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` under `dir` and records it.
pub fn write_artifact(dir: &Path, manifest: &mut Manifest, path: &str, schema: &str, bytes: &[u8]) -> Result<(), CliError> {
    let full = dir.join(path);
    if let Some(parent) = full.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(&full, bytes).map_err(|e| CliError::io(&full, e))?;
    manifest.artifacts.push(Artifact {
        path: path.to_string(),
        schema: schema.to_string(),
        sha256: digest(bytes),
        bytes: bytes.len() as u64,
    });
    Ok(())
}

/// Writes `manifest.json` into `dir`, with artifacts sorted by path.
pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<std::path::PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut m = manifest.clone();
    m.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, m.to_json()).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
