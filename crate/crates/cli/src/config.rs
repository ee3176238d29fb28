//! Per-command configuration documents.
//!
//! Every config is a JSON object with no unknown fields. A manifest written
//! by an earlier run (`{"command": ..., "config": ...}`) is accepted in place
//! of the bare config.

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use univpi::complex::{Flavor, MAX_SUPPORTED_DIM};
use univpi::density::{sample_binomial_stream, sample_poisson_stream, DensityModel, PointCloud, Process};
use univpi::harness::ExperimentConfig;

/// Built-in point sets for smoke tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixture {
    /// Equilateral triangle with unit sides.
    Triangle,
    /// Unit square.
    Square,
    /// Four collinear points with gaps 1, 2, 3.
    Path,
}

impl Fixture {
    pub fn cloud(self) -> PointCloud {
        let pts: Vec<Vec<f64>> = match self {
            Fixture::Triangle => vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]],
            Fixture::Square => vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            Fixture::Path => vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0], vec![6.0, 0.0]],
        };
        PointCloud::from_points(2, &pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Fixture(Fixture),
    Points { d: usize, points: Vec<Vec<f64>> },
    Sample { density: DensityModel, process: Process },
}

impl Source {
    fn validate(&self) -> Result<()> {
        match self {
            Source::Fixture(_) => {}
            Source::Points { d, points } => {
                if *d == 0 {
                    bail!("points: d must be at least 1");
                }
                if let Some(p) = points.iter().find(|p| p.len() != *d || p.iter().any(|x| !x.is_finite())) {
                    bail!("points: {p:?} is not a finite point in dimension {d}");
                }
            }
            Source::Sample { density, process } => {
                density.validate()?;
                match *process {
                    Process::Binomial { .. } => {}
                    Process::Poisson { nu } if nu >= 0.0 && nu.is_finite() => {}
                    Process::Poisson { nu } => bail!("poisson nu = {nu} must be finite and nonnegative"),
                    Process::Fixed => bail!("a sampled source needs a binomial or poisson process"),
                }
            }
        }
        Ok(())
    }

    pub fn cloud(&self, seed: u64) -> univpi::Result<PointCloud> {
        match self {
            Source::Fixture(f) => Ok(f.cloud()),
            Source::Points { d, points } => Ok(PointCloud::from_points(*d, points)),
            Source::Sample { density, process } => match *process {
                Process::Binomial { n } => sample_binomial_stream(density, n, seed, 0),
                Process::Poisson { nu } => sample_poisson_stream(density, nu, seed, 0),
                Process::Fixed => unreachable!("rejected by validation"),
            },
        }
    }

    /// Intensity used to rescale radii: `n`, `ν`, or the point count.
    pub fn intensity(&self, cloud: &PointCloud) -> f64 {
        match self {
            Source::Sample { process, .. } => process.intensity(cloud.len()),
            _ => cloud.len() as f64,
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k >= MAX_SUPPORTED_DIM {
        bail!("k must be in 1..={}", MAX_SUPPORTED_DIM - 1);
    }
    Ok(())
}

fn check_r_max(r: Option<f64>) -> Result<()> {
    match r {
        Some(r) if !(r >= 0.0) => bail!("r_max = {r} must be nonnegative"),
        _ => Ok(()),
    }
}

pub trait Validate {
    fn validate(&self) -> Result<()>;
    /// Applies `--seed`.
    fn reseed(&mut self, seed: u64);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub source: Source,
    #[serde(default)]
    pub seed: u64,
}

impl Validate for SampleConfig {
    fn validate(&self) -> Result<()> {
        self.source.validate()
    }
    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

fn default_max_dim() -> usize {
    2
}

/// Shared by `complex` and `pdgm`. A missing `r_max` builds the full filtration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationConfig {
    pub source: Source,
    #[serde(default)]
    pub seed: u64,
    pub flavor: Flavor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

impl Validate for FiltrationConfig {
    fn validate(&self) -> Result<()> {
        self.source.validate()?;
        check_r_max(self.r_max)?;
        if self.max_dim == 0 || self.max_dim > MAX_SUPPORTED_DIM {
            bail!("max_dim must be in 1..={MAX_SUPPORTED_DIM}");
        }
        Ok(())
    }
    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiConfig {
    pub source: Source,
    #[serde(default)]
    pub seed: u64,
    pub flavor: Flavor,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

impl Validate for PiConfig {
    fn validate(&self) -> Result<()> {
        self.source.validate()?;
        check_k(self.k)?;
        check_r_max(self.r_max)
    }
    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

/// Critical faces up to `r_max`, or the counting curve on `lambdas` when
/// that grid is given (radii rescaled by `nu`, default the source intensity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalConfig {
    pub source: Source,
    #[serde(default)]
    pub seed: u64,
    pub flavor: Flavor,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambdas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default)]
    pub sign_split: bool,
}

impl Validate for CriticalConfig {
    fn validate(&self) -> Result<()> {
        self.source.validate()?;
        check_k(self.k)?;
        check_r_max(self.r_max)?;
        if !self.lambdas.is_empty() {
            if self.r_max.is_some() {
                bail!("give either r_max or lambdas, not both");
            }
            if self.lambdas.windows(2).any(|w| !(w[0] < w[1])) || !(self.lambdas[0] > 0.0) {
                bail!("lambdas must be positive and increasing");
            }
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu.is_finite()) {
                bail!("nu = {nu} must be positive");
            }
        }
        Ok(())
    }
    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryCurve {
    pub density: DensityModel,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub d: usize,
    pub k: usize,
    pub flavor: Flavor,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<TheoryCurve>,
}

fn default_samples() -> usize {
    univpi::theory::EstimateOptions::default().samples
}

fn default_m_max() -> usize {
    univpi::theory::DEFAULT_M_MAX
}

impl Validate for ConstantsConfig {
    fn validate(&self) -> Result<()> {
        if self.d < 2 {
            bail!("d must be at least 2");
        }
        check_k(self.k)?;
        if self.k > self.d {
            bail!("k = {} exceeds d = {}", self.k, self.d);
        }
        if self.samples == 0 {
            bail!("samples must be positive");
        }
        if let Some(c) = &self.curve {
            c.density.validate()?;
            if c.density.d != self.d {
                bail!("curve density has d = {}, config d = {}", c.density.d, self.d);
            }
            if c.lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
                bail!("curve lambdas must be finite and nonnegative");
            }
        }
        Ok(())
    }
    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnnConfig {
    pub source: Source,
    #[serde(default)]
    pub seed: u64,
    pub k_param: usize,
}

impl Validate for KnnConfig {
    fn validate(&self) -> Result<()> {
        self.source.validate()?;
        if self.k_param == 0 {
            bail!("k_param must be positive");
        }
        Ok(())
    }
    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
    }
}

/// `--seed s` replaces the seed list by `s, s+1, ...` of the same length.
impl Validate for ExperimentConfig {
    fn validate(&self) -> Result<()> {
        Ok(ExperimentConfig::validate(self)?)
    }
    fn reseed(&mut self, seed: u64) {
        self.seeds = (0..self.seeds.len() as u64).map(|i| seed.wrapping_add(i)).collect();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub experiment: ExperimentConfig,
    pub split_m: usize,
    /// Sizes for the additivity defect.
    pub sizes: Vec<f64>,
    /// Sizes for the `Π(R)/n` convergence table; skipped when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convergence_sizes: Vec<f64>,
}

impl Validate for ProbeConfig {
    fn validate(&self) -> Result<()> {
        ExperimentConfig::validate(&self.experiment)?;
        if self.split_m == 0 {
            bail!("split_m must be positive");
        }
        for s in self.sizes.iter().chain(&self.convergence_sizes) {
            if !(*s > 1.0 && s.is_finite()) {
                bail!("size {s} must exceed 1");
            }
        }
        Ok(())
    }
    fn reseed(&mut self, seed: u64) {
        self.experiment.reseed(seed);
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, T> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a T,
    pub outputs: Vec<String>,
}

/// Parses `text` as a config for `command`, unwrapping a manifest if needed.
pub fn parse<T: DeserializeOwned>(command: &str, text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text).context("config is not valid JSON")?;
    let is_manifest = value.get("command").is_some() && value.get("config").is_some();
    if is_manifest {
        let from = value["command"].as_str().unwrap_or_default();
        if from != command {
            bail!("manifest was written by `{from}`, not `{command}`");
        }
        value = value["config"].take();
    }
    serde_json::from_value(value).context("invalid config")
}
