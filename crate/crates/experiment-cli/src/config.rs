use std::path::PathBuf;

use model_core::Law;
use passage_engine::Side;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_SCHEMA: &str = "experiment-config/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Sample,
    Gap,
    Classify,
    Busemann,
    Dim,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Gap => "gap",
            Command::Classify => "classify",
            Command::Busemann => "busemann",
            Command::Dim => "dim",
            Command::Verify => "verify",
        }
    }
}

fn one() -> usize {
    1
}

fn geometric_half() -> Law {
    Law::Geometric { p: 0.5 }
}

/// Seed policy and output location shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub command: Command,
    pub seed: u64,
    /// Independent environments; replicate `r` uses `replicate_seed(seed, r)`.
    #[serde(default = "one")]
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Poisson { rate: f64 },
    Lattice { law: Law },
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Poisson { rate: 2.0 }
    }
}

/// Passage values from the origin to `(0, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleParams {
    pub model: ModelSpec,
    pub times: Vec<f64>,
}

impl Default for SampleParams {
    fn default() -> Self {
        Self { model: ModelSpec::default(), times: vec![10.0, 20.0, 40.0] }
    }
}

/// A `width x width` lattice sheet with ends `horizon` steps after the starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GapParams {
    pub law: Law,
    pub width: usize,
    /// Defaults to `2 * width`, the least horizon with a fully defined sheet.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl Default for GapParams {
    fn default() -> Self {
        Self { law: geometric_half(), width: 16, horizon: None }
    }
}

impl GapParams {
    pub fn horizon(&self) -> usize {
        self.horizon.unwrap_or(2 * self.width)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyParams {
    pub law: Law,
    pub width: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// Interior grid points per replicate field.
    pub points: usize,
    pub radii: Vec<f64>,
    /// Excursions shorter than this fraction of the time span are closed for the coarse type.
    pub coarse_fraction: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            law: geometric_half(),
            width: 16,
            horizon: None,
            points: 64,
            radii: gap_lab_radii(),
            coarse_fraction: network_classifier::DEFAULT_COARSE_FRACTION,
        }
    }
}

fn gap_lab_radii() -> Vec<f64> {
    network_classifier::DEFAULT_RADII.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanParams {
    pub window: [f64; 2],
    pub steps: usize,
    /// Jump threshold in `(mid - base)^{2/3}` units.
    pub threshold: f64,
    /// Exceptional directions kept for the gap diagnostics.
    pub keep: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self { window: [-0.5, 0.5], steps: 20, threshold: 0.5, keep: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BusemannParams {
    pub model: ModelSpec,
    /// Time of the line holding the starts.
    pub base: f64,
    /// First horizon; the second is twice as far.
    pub horizon: f64,
    pub thetas: Vec<f64>,
    pub side: Side,
    /// Starts run over `[-reach, reach]` in steps of `step`.
    pub reach: f64,
    pub step: f64,
    pub delta: f64,
    pub radii: Vec<f64>,
    pub scan: ScanParams,
}

impl Default for BusemannParams {
    fn default() -> Self {
        Self {
            model: ModelSpec::Lattice { law: geometric_half() },
            base: 32.0,
            horizon: 64.0,
            thetas: vec![-0.2, 0.0, 0.2],
            side: Side::Left,
            reach: 32.0,
            step: 2.0,
            delta: 0.01,
            radii: gap_lab_radii(),
            scan: ScanParams::default(),
        }
    }
}

/// Zero-set dimension and slice Brownianity of lattice sheets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimParams {
    pub law: Law,
    pub width: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl Default for DimParams {
    fn default() -> Self {
        Self { law: geometric_half(), width: 64, horizon: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    pub lattice: usize,
    pub cloud: usize,
    pub max_side: usize,
    pub max_points: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        let b = oracle::BatchSpec::default();
        Self { lattice: b.lattice, cloud: b.cloud, max_side: b.max_side, max_points: b.max_points }
    }
}

/// One experiment: the `[experiment]` table plus at most one table per command.
///
/// Tables for other commands are allowed and ignored, so one file can hold
/// several set-ups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub busemann: Option<BusemannParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<DimParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyParams>,
}

fn invalid(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config { path: path.to_string(), message: message.into() }
}

fn check_law(path: &str, law: &Law) -> Result<(), CliError> {
    match law {
        Law::Geometric { p } | Law::Bernoulli { p } if !(*p > 0.0 && *p <= 1.0) => {
            Err(invalid(&format!("{path}.p"), format!("{p} is not in (0, 1]")))
        }
        _ => Ok(()),
    }
}

fn check_model(path: &str, m: &ModelSpec) -> Result<(), CliError> {
    match m {
        ModelSpec::Poisson { rate } if !(*rate > 0.0 && rate.is_finite()) => {
            Err(invalid(&format!("{path}.rate"), format!("{rate} is not positive")))
        }
        ModelSpec::Lattice { law } => check_law(&format!("{path}.law"), law),
        _ => Ok(()),
    }
}

fn check_radii(path: &str, radii: &[f64]) -> Result<(), CliError> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(invalid(path, "needs at least one positive radius"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(command: Command, seed: u64) -> Self {
        Self {
            experiment: ExperimentSection { command, seed, replicates: 1, out: None, threads: None },
            sample: None,
            gap: None,
            classify: None,
            busemann: None,
            dim: None,
            verify: None,
        }
    }

    pub fn command(&self) -> Command {
        self.experiment.command
    }

    pub fn sample(&self) -> SampleParams {
        self.sample.clone().unwrap_or_default()
    }

    pub fn gap(&self) -> GapParams {
        self.gap.clone().unwrap_or_default()
    }

    pub fn classify(&self) -> ClassifyParams {
        self.classify.clone().unwrap_or_default()
    }

    pub fn busemann(&self) -> BusemannParams {
        self.busemann.clone().unwrap_or_default()
    }

    pub fn dim(&self) -> DimParams {
        self.dim.clone().unwrap_or_default()
    }

    pub fn verify(&self) -> VerifyParams {
        self.verify.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.experiment.replicates == 0 {
            return Err(invalid("experiment.replicates", "must be at least 1"));
        }
        if self.experiment.threads == Some(0) {
            return Err(invalid("experiment.threads", "must be at least 1"));
        }
        if let Some(s) = &self.sample {
            check_model("sample.model", &s.model)?;
            if s.times.is_empty() || s.times.iter().any(|t| !(*t > 0.0)) {
                return Err(invalid("sample.times", "needs positive times"));
            }
            if matches!(s.model, ModelSpec::Lattice { .. }) && s.times.iter().any(|t| t.fract() != 0.0 || t % 2.0 != 0.0) {
                return Err(invalid("sample.times", "lattice times must be even integers"));
            }
        }
        for (path, law, width) in [
            ("gap", self.gap.as_ref().map(|g| &g.law), self.gap.as_ref().map(|g| g.width)),
            ("classify", self.classify.as_ref().map(|g| &g.law), self.classify.as_ref().map(|g| g.width)),
            ("dim", self.dim.as_ref().map(|g| &g.law), self.dim.as_ref().map(|g| g.width)),
        ] {
            if let Some(law) = law {
                check_law(&format!("{path}.law"), law)?;
            }
            if width == Some(0) {
                return Err(invalid(&format!("{path}.width"), "must be at least 1"));
            }
        }
        if let Some(c) = &self.classify {
            check_radii("classify.radii", &c.radii)?;
            if !(0.0..=1.0).contains(&c.coarse_fraction) {
                return Err(invalid("classify.coarse_fraction", "must lie in [0, 1]"));
            }
        }
        if let Some(b) = &self.busemann {
            check_model("busemann.model", &b.model)?;
            check_radii("busemann.radii", &b.radii)?;
            if !(b.horizon > 0.0) {
                return Err(invalid("busemann.horizon", "must be positive"));
            }
            if !(b.step > 0.0) || !(b.reach >= 0.0) {
                return Err(invalid("busemann.step", "needs step > 0 and reach >= 0"));
            }
            if b.reach > b.base {
                return Err(invalid("busemann.reach", "starts must lie within the base line's cone"));
            }
            if let Some(t) = b.thetas.iter().find(|t| !(t.abs() < 1.0)) {
                return Err(invalid("busemann.thetas", format!("{t} is outside (-1, 1)")));
            }
            let [lo, hi] = b.scan.window;
            if !(lo < hi && lo > -1.0 && hi < 1.0) || b.scan.steps == 0 {
                return Err(invalid("busemann.scan.window", "needs -1 < lo < hi < 1 and steps >= 1"));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses and validates a TOML config; errors name the offending key path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = toml::de::Deserializer::parse(text).map_err(|e| invalid("", e.to_string()))?;
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        invalid(if path == "." { "" } else { &path }, e.inner().message().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Seed of replicate `r`.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    model_core::rng::Stream::new(seed, 3, r as u64).next_u64()
}
