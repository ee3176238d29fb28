//! Experiment orchestration: universality runs, convergence studies, and
//! framework-condition probes.
//!
//! Every trial is keyed by `(density index, seed)`: the cloud is drawn from
//! stream `density index` of generator `seed`, so results do not depend on
//! scheduling. Trials run in parallel and are merged in key order.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{build, Flavor, MAX_SUPPORTED_DIM};
use crate::density::{
    rmax_policy, sample_binomial_stream, sample_poisson_stream, DensityKind, DensityModel, PointCloud, Process,
    ProcessKind,
};
use crate::error::{Error, Result};
use crate::par::map_indexed;
use crate::persistence::{pi_count_alpha, pi_measure, reduce_with, Algorithm, PiMeasure};
use crate::stats::{ks_critical_1e3, ks_two_sample, mean_sd};

/// How the death-radius cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RmaxSpec {
    /// Per-density policy from the density's type tag and the given law.
    Policy {
        law: ProcessKind,
    },
    Explicit(f64),
}

impl Default for RmaxSpec {
    fn default() -> Self {
        RmaxSpec::Policy { law: ProcessKind::Poisson }
    }
}

fn default_alpha_grid() -> Vec<f64> {
    vec![1.0, 1.1, 1.25, 1.5, 2.0, 3.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub k: usize,
    pub flavor: Flavor,
    pub process: Process,
    pub densities: Vec<DensityModel>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub r_max: RmaxSpec,
    #[serde(default = "default_alpha_grid")]
    pub alpha_grid: Vec<f64>,
    /// Output directory; the CLI's `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameter(s));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if self.k == 0 || self.k + 1 > MAX_SUPPORTED_DIM {
            return bad(format!("k must be in 1..={}", MAX_SUPPORTED_DIM - 1));
        }
        match self.process {
            Process::Binomial { n } if n < 2 => return bad(format!("binomial n = {n} must be at least 2")),
            Process::Poisson { nu } if !(nu > 1.0 && nu.is_finite()) => {
                return bad(format!("poisson nu = {nu} must exceed 1"))
            }
            Process::Fixed => return bad("process must be binomial or poisson".into()),
            _ => {}
        }
        if self.densities.is_empty() {
            return bad("at least one density is required".into());
        }
        for m in &self.densities {
            if m.d != self.d {
                return bad(format!("density {} has d = {}, config d = {}", m.label(), m.d, self.d));
            }
            m.validate()?;
        }
        let labels: BTreeSet<String> = self.densities.iter().map(DensityModel::label).collect();
        if labels.len() != self.densities.len() {
            return bad("density labels must be distinct (set `name`)".into());
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.seeds.iter().collect::<BTreeSet<_>>().len() != self.seeds.len() {
            return bad("seeds must be distinct".into());
        }
        if let RmaxSpec::Explicit(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("explicit r_max = {r} must be positive"));
            }
        }
        if self.alpha_grid.iter().any(|a| !(*a >= 1.0)) {
            return bad("alpha grid values must be >= 1".into());
        }
        Ok(())
    }

    /// `n` (binomial) or `ν` (Poisson).
    pub fn size(&self) -> f64 {
        self.process.intensity(0)
    }

    pub fn with_size(&self, size: f64) -> Self {
        let mut c = self.clone();
        c.process = match self.process {
            Process::Binomial { .. } => Process::Binomial { n: size.round() as usize },
            _ => Process::Poisson { nu: size },
        };
        c
    }

    /// The cutoff used for `model`.
    pub fn r_max_for(&self, model: &DensityModel) -> Result<f64> {
        match self.r_max {
            RmaxSpec::Explicit(r) => Ok(r),
            RmaxSpec::Policy { law } => Ok(rmax_policy(law, self.size(), self.d, self.k, model.type_tag())?.r_max),
        }
    }
}

/// Draws the cloud for trial `(density index, seed)`.
pub fn trial_cloud(config: &ExperimentConfig, density: usize, seed: u64) -> Result<PointCloud> {
    let model = &config.densities[density];
    match config.process {
        Process::Binomial { n } => sample_binomial_stream(model, n, seed, density as u64),
        Process::Poisson { nu } => sample_poisson_stream(model, nu, seed, density as u64),
        Process::Fixed => Err(Error::InvalidParameter("fixed process in experiment".into())),
    }
}

/// π-values of a cloud in degree `k` with deaths at most `r_max`.
pub fn pi_values_of(cloud: &PointCloud, flavor: Flavor, k: usize, r_max: f64) -> Result<PiMeasure> {
    let fc = build(cloud, flavor, r_max, k + 1)?;
    let red = reduce_with(&fc, Algorithm::Cohomology);
    Ok(pi_measure(&red.diagrams, k, r_max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub seed: u64,
    pub points: usize,
    pub pi_count: usize,
    /// `Π_k(R)` divided by `n` (or `ν`).
    pub pi_mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    /// Mean of `Π_k(α) / n` over seeds.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub label: String,
    pub r_max: f64,
    pub trials: Vec<TrialSummary>,
    pub pooled_count: usize,
    pub pi_mass_mean: f64,
    pub pi_mass_sd: f64,
    pub alpha_profile: Vec<AlphaPoint>,
    /// Pooled π-values, ascending; written to CSV, not to the report.
    #[serde(skip)]
    pub pooled: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsEntry {
    pub a: String,
    pub b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub d: usize,
    pub k: usize,
    pub flavor: Flavor,
    pub densities: Vec<DensitySummary>,
    pub pairwise: Vec<KsEntry>,
    pub pass: bool,
    /// Some trial failed; its density's pool is incomplete.
    pub partial: bool,
}

struct Trial {
    seed: u64,
    points: usize,
    measure: Result<PiMeasure>,
}

pub fn run_universality(config: &ExperimentConfig) -> Result<UniversalityReport> {
    config.validate()?;
    let size = config.size();
    let r_maxes: Vec<f64> = config.densities.iter().map(|m| config.r_max_for(m)).collect::<Result<_>>()?;
    let ns = config.seeds.len();
    let trials = map_indexed(config.densities.len() * ns, |t| {
        let (di, seed) = (t / ns, config.seeds[t % ns]);
        match trial_cloud(config, di, seed) {
            Ok(cloud) => {
                Trial { seed, points: cloud.len(), measure: pi_values_of(&cloud, config.flavor, config.k, r_maxes[di]) }
            }
            Err(e) => Trial { seed, points: 0, measure: Err(e) },
        }
    });
    let mut partial = false;
    let mut densities = Vec::new();
    for (di, chunk) in trials.chunks(ns).enumerate() {
        let mut pooled = Vec::new();
        let mut summaries = Vec::new();
        let mut masses = Vec::new();
        let mut alpha_sums = vec![0.0; config.alpha_grid.len()];
        for t in chunk {
            match &t.measure {
                Ok(m) => {
                    pooled.extend_from_slice(&m.pi_values);
                    masses.push(m.total() as f64 / size);
                    for (s, &a) in alpha_sums.iter_mut().zip(&config.alpha_grid) {
                        *s += pi_count_alpha(m, a) as f64 / size;
                    }
                    summaries.push(TrialSummary {
                        seed: t.seed,
                        points: t.points,
                        pi_count: m.total(),
                        pi_mass: m.total() as f64 / size,
                        error: None,
                    });
                }
                Err(e) => {
                    partial = true;
                    summaries.push(TrialSummary {
                        seed: t.seed,
                        points: t.points,
                        pi_count: 0,
                        pi_mass: f64::NAN,
                        error: Some(e.to_string()),
                    });
                }
            }
        }
        pooled.sort_by(f64::total_cmp);
        let (mean, sd) = mean_sd(&masses);
        let ok = masses.len().max(1) as f64;
        densities.push(DensitySummary {
            label: config.densities[di].label(),
            r_max: r_maxes[di],
            trials: summaries,
            pooled_count: pooled.len(),
            pi_mass_mean: mean,
            pi_mass_sd: sd,
            alpha_profile: config
                .alpha_grid
                .iter()
                .zip(&alpha_sums)
                .map(|(&alpha, s)| AlphaPoint { alpha, mass: s / ok })
                .collect(),
            pooled,
        });
    }
    let mut pairwise = Vec::new();
    for i in 0..densities.len() {
        for j in i + 1..densities.len() {
            let (a, b) = (&densities[i], &densities[j]);
            let (statistic, critical) = if a.pooled.is_empty() || b.pooled.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                (ks_two_sample(&a.pooled, &b.pooled)?, ks_critical_1e3(a.pooled.len(), b.pooled.len()))
            };
            pairwise.push(KsEntry {
                a: a.label.clone(),
                b: b.label.clone(),
                n_a: a.pooled.len(),
                n_b: b.pooled.len(),
                statistic,
                critical,
                pass: statistic <= critical,
            });
        }
    }
    let pass = !partial && pairwise.iter().all(|e| e.pass);
    Ok(UniversalityReport { d: config.d, k: config.k, flavor: config.flavor, densities, pairwise, pass, partial })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes `pi_values_<label>.csv`, `report.json`, and `figure1.svg` to `dir`.
pub fn write_universality(report: &UniversalityReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for ds in &report.densities {
        let m = PiMeasure { dim: report.k, r_max: ds.r_max, pi_values: ds.pooled.clone() };
        let mut w = create(&dir.join(format!("pi_values_{}.csv", ds.label)))?;
        m.write_csv(&mut w, true)?;
        w.flush()?;
    }
    write_json(report, &dir.join("report.json"))?;
    fs::write(dir.join("figure1.svg"), tail_plot_svg(report))?;
    Ok(())
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log survival curves `P(π > x)` of the pooled π-values, one per density.
pub fn tail_plot_svg(report: &UniversalityReport) -> String {
    let (w, h, pad) = (640.0, 420.0, 56.0);
    let max_pi =
        report.densities.iter().filter_map(|d| d.pooled.last().copied()).fold(1.0f64, f64::max).max(1.0 + 1e-9);
    let min_surv = report
        .densities
        .iter()
        .filter(|d| !d.pooled.is_empty())
        .map(|d| 1.0 / d.pooled.len() as f64)
        .fold(1.0f64, f64::min)
        .min(0.1);
    let x_hi = max_pi.log10();
    let y_lo = min_surv.log10();
    let sx = |x: f64| pad + (x.log10() / x_hi) * (w - 2.0 * pad);
    let sy = |s: f64| pad + (s.log10() / y_lo) * (h - 2.0 * pad);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">π (log scale, 1 to {max_pi:.3})</text>"#,
        w / 2.0,
        h - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">P(π &gt; x) (log scale)</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (i, ds) in report.densities.iter().enumerate() {
        let n = ds.pooled.len();
        if n < 2 {
            continue;
        }
        let step = (n / 400).max(1);
        let mut pts = String::new();
        for j in (0..n - 1).step_by(step) {
            let surv = (n - j - 1) as f64 / n as f64;
            let _ = write!(pts, "{:.2},{:.2} ", sx(ds.pooled[j]), sy(surv));
        }
        let color = COLORS[i % COLORS.len()];
        let _ =
            writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.trim_end());
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{color}">{} (n = {n})</text>"#,
            w - pad - 180.0,
            pad + 18.0 + 16.0 * i as f64,
            ds.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub size: f64,
    pub mean: f64,
    pub sd: f64,
    pub seeds: usize,
}

/// `Π_k(R)/n` (mean and sd over seeds) for each size, using the first density.
pub fn convergence_study(config: &ExperimentConfig, sizes: &[f64]) -> Result<Vec<ConvergenceRow>> {
    config.validate()?;
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sizes must be increasing".into()));
    }
    let mut rows = Vec::new();
    for &size in sizes {
        let c = config.with_size(size);
        c.validate()?;
        let r_max = c.r_max_for(&c.densities[0])?;
        let masses = map_indexed(c.seeds.len(), |s| -> Result<f64> {
            let cloud = trial_cloud(&c, 0, c.seeds[s])?;
            Ok(pi_values_of(&cloud, c.flavor, c.k, r_max)?.total() as f64 / size)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let (mean, sd) = mean_sd(&masses);
        rows.push(ConvergenceRow { size, mean, sd, seeds: masses.len() });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityRow {
    pub size: f64,
    pub defect_mean: f64,
    pub defect_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameworkReport {
    /// Every seed's π multiset agrees after translating by `translation`.
    pub translation_identical: bool,
    pub translation: Vec<f64>,
    /// Every seed's π multiset agrees after scaling by `scale`.
    pub scale_identical: bool,
    pub scale: f64,
    /// Largest relative π difference seen in either check.
    pub max_rel_diff: f64,
    pub split_m: usize,
    pub additivity: Vec<AdditivityRow>,
}

/// Relative tolerance for comparing π multisets of congruent clouds; the
/// coordinates themselves are rounded differently.
pub const CONGRUENT_REL_TOL: f64 = 1e-9;

fn multiset_diff(a: &[f64], b: &[f64]) -> Option<f64> {
    (a.len() == b.len()).then(|| a.iter().zip(b).map(|(x, y)| (x - y).abs() / x.abs().max(1.0)).fold(0.0, f64::max))
}

/// Translation and scale invariance of the π multiset, and the additivity
/// defect `|Π(P) - Σ_i Π(P ∩ Q_i)| / ν` over an `m^d` split of the unit cube at
/// each size.
pub fn framework_condition_probe(config: &ExperimentConfig, split_m: usize, sizes: &[f64]) -> Result<FrameworkReport> {
    config.validate()?;
    if config.densities[0].kind != DensityKind::UniformCube {
        return Err(Error::Unsupported("framework probe needs the uniform cube as its first density".into()));
    }
    if split_m == 0 {
        return Err(Error::InvalidParameter("split_m must be positive".into()));
    }
    let d = config.d;
    let translation: Vec<f64> = (0..d).map(|a| if a % 2 == 0 { 17.0 } else { -3.0 }).collect();
    let scale = 10.0;
    let r_max = config.r_max_for(&config.densities[0])?;
    let (flavor, k) = (config.flavor, config.k);
    let checks = map_indexed(config.seeds.len(), |s| -> Result<(Option<f64>, Option<f64>)> {
        let cloud = trial_cloud(config, 0, config.seeds[s])?;
        let base = pi_values_of(&cloud, flavor, k, r_max)?.pi_values;
        let moved = pi_values_of(&cloud.translated(&translation), flavor, k, r_max)?.pi_values;
        let scaled = pi_values_of(&cloud.scaled(scale), flavor, k, scale * r_max)?.pi_values;
        Ok((multiset_diff(&base, &moved), multiset_diff(&base, &scaled)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ok = |x: &Option<f64>| x.is_some_and(|v| v <= CONGRUENT_REL_TOL);
    let max_rel_diff = checks.iter().flat_map(|(a, b)| [a, b]).map(|x| x.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let mut additivity = Vec::new();
    for &size in sizes {
        let c = config.with_size(size);
        c.validate()?;
        let r = c.r_max_for(&c.densities[0])?;
        let defects = map_indexed(c.seeds.len(), |s| -> Result<f64> {
            let cloud = trial_cloud(&c, 0, c.seeds[s])?;
            let whole = pi_values_of(&cloud, flavor, k, r)?.total() as f64;
            let mut cells: Vec<Vec<usize>> = vec![Vec::new(); split_m.pow(d as u32)];
            for i in 0..cloud.len() {
                let idx = cloud
                    .point(i)
                    .iter()
                    .fold(0usize, |acc, &v| acc * split_m + ((v * split_m as f64).floor() as usize).min(split_m - 1));
                cells[idx].push(i);
            }
            let mut parts = 0.0;
            for cell in &cells {
                if !cell.is_empty() {
                    parts += pi_values_of(&cloud.subset(cell), flavor, k, r)?.total() as f64;
                }
            }
            Ok((whole - parts).abs() / size)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let (defect_mean, defect_sd) = mean_sd(&defects);
        additivity.push(AdditivityRow { size, defect_mean, defect_sd });
    }
    Ok(FrameworkReport {
        translation_identical: checks.iter().all(|(a, _)| ok(a)),
        translation,
        scale_identical: checks.iter().all(|(_, b)| ok(b)),
        scale,
        max_rel_diff,
        split_m,
        additivity,
    })
}
