//! Limit constants and limit curves for critical-face counts.
//!
//! Čech: `F_k^◇(λ; f) = C ∫ f(c) γ_k(ω_d f(c) λ) dc` with
//! `C = V_{d,k} Γ_{d,k} (k!)^{d-k+1} / (d ω_d^k (k+1)!)` and `γ_k` the lower
//! incomplete gamma function. Rips: `F_k^◇(λ; f) = ω_d/(2κ_d) ∫ f γ^R_k(λ f κ_d)`
//! where `γ^R_k(z) = Σ_m β*_{k-2}(m) P(m+1, z)` and `β*` is the expected
//! reduced Betti number of a Rips complex on `m` uniform points of the lens.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Gamma};
use statrs::function::gamma::gamma_lr;

use crate::complex::{link_from_vertices, Flavor};
use crate::critical::reduced_betti;
use crate::density::{DensityKind, DensityModel, PointCloud};
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, lens_volume, sphere_area};
use crate::grid::Metric;
use crate::par::map_indexed;
use crate::quad::integrate;
use crate::rng;
use crate::stats::mean_sd;

/// Independent Monte Carlo batches behind every reported standard error.
pub const BATCHES: usize = 20;

/// Relative tolerance of the quadrature over the density.
pub const CURVE_REL_TOL: f64 = 1e-6;

/// Default truncation point of the Rips series.
pub const DEFAULT_M_MAX: usize = 64;

/// A tail estimate above this fraction of the partial sum raises the
/// truncation warning.
pub const TAIL_WARN_FRACTION: f64 = 0.01;

/// `Γ_{d,k} = Π_{i=d-k+1}^{d} σ_i / Π_{i=1}^{k} σ_i` with `σ_i = |S^{i-1}|`.
///
/// This normalization makes the Blaschke–Petkantschin change of variables
/// measure-preserving; `Γ_{d,d} = 1` and `Γ_{2,1} = π`.
pub fn grassmannian_volume(d: usize, k: usize) -> Result<f64> {
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("grassmannian needs 1 <= k <= d (d = {d}, k = {k})")));
    }
    let num: f64 = (d - k + 1..=d).map(sphere_area).product();
    let den: f64 = (1..=k).map(sphere_area).product();
    Ok(num / den)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `V_{d,k} = ∫_{(S^{k-1})^{k+1}} h(θ) V_simp(θ)^{d-k+1} dθ`, where `h` says the
/// origin lies in the open simplex spanned by `θ` and `V_simp` is its
/// `k`-volume. Returns `(estimate, stderr)`.
///
/// For `k = 1` the sphere is `{-1, 1}` with counting measure and the integral
/// is the finite sum over the four sign patterns: `2^{d+1}`, stderr 0.
pub fn vdk_estimate(d: usize, k: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("V_(d,k) needs 1 <= k <= d (d = {d}, k = {k})")));
    }
    if k == 1 {
        let mut v = 0.0;
        for a in [-1.0f64, 1.0] {
            for b in [-1.0f64, 1.0] {
                if a != b {
                    v += (a - b).abs().powi(d as i32);
                }
            }
        }
        return Ok((v, 0.0));
    }
    if samples < BATCHES {
        return Err(Error::InvalidParameter(format!("need at least {BATCHES} samples")));
    }
    let per = samples / BATCHES;
    let expo = (d - k + 1) as i32;
    let means = map_indexed(BATCHES, |b| {
        let mut r = rng::stream(seed, b as u64);
        let mut acc = 0.0;
        let mut theta = vec![vec![0.0; k]; k + 1];
        for _ in 0..per {
            for t in theta.iter_mut() {
                unit_vector(&mut r, t);
            }
            if let Some(vol) = simplex_volume_if_origin_inside(&theta) {
                acc += vol.powi(expo);
            }
        }
        acc / per as f64
    });
    let total = sphere_area(k).powi(k as i32 + 1);
    let (m, sd) = mean_sd(&means);
    Ok((total * m, total * sd / (BATCHES as f64).sqrt()))
}

fn unit_vector(r: &mut rng::Rng, out: &mut [f64]) {
    loop {
        let mut n = 0.0;
        for v in out.iter_mut() {
            *v = r.sample(StandardNormal);
            n += *v * *v;
        }
        if n > 1e-300 {
            let s = n.sqrt();
            out.iter_mut().for_each(|v| *v /= s);
            return;
        }
    }
}

/// `k`-volume of the simplex on `k + 1` points of `R^k` when the origin has
/// strictly positive barycentric coordinates, else `None`.
fn simplex_volume_if_origin_inside(theta: &[Vec<f64>]) -> Option<f64> {
    let k = theta.len() - 1;
    // Rows: coordinates then the affine row; columns: vertices; rhs (0, .., 0, 1).
    let mut a = vec![vec![0.0; k + 2]; k + 1];
    for i in 0..k {
        for (j, t) in theta.iter().enumerate() {
            a[i][j] = t[i];
        }
    }
    for j in 0..=k {
        a[k][j] = 1.0;
    }
    a[k][k + 1] = 1.0;
    let mut det = 1.0;
    for c in 0..=k {
        let p = (c..=k).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in 0..=k {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for j in c..k + 2 {
                        a[r][j] -= f * a[c][j];
                    }
                }
            }
        }
    }
    let inside = (0..=k).all(|i| a[i][k + 1] / a[i][i] > 0.0);
    // |det [θ_j; 1]| equals |det [θ_j - θ_0]|.
    inside.then(|| det.abs() / factorial(k))
}

/// `γ_k(z) = ∫_0^z t^{k-1} e^{-t} dt`.
pub fn lower_incomplete_gamma(k: usize, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z.is_infinite() {
        return factorial(k - 1);
    }
    factorial(k - 1) * gamma_lr(k as f64, z)
}

/// `V_{d,k} Γ_{d,k} (k!)^{d-k+1} / (d ω_d^k (k+1)!)`.
fn cech_prefactor(d: usize, k: usize, v_dk: f64) -> Result<f64> {
    let g = grassmannian_volume(d, k)?;
    Ok(v_dk * g * factorial(k).powi((d - k + 1) as i32) / (d as f64 * ball_volume(d).powi(k as i32) * factorial(k + 1)))
}

/// `F_k^*` for Čech, from an estimate of `V_{d,k}`.
pub fn cech_limit_const(d: usize, k: usize, v_dk: f64) -> Result<f64> {
    Ok(cech_prefactor(d, k, v_dk)? * factorial(k - 1))
}

/// `E_f[g(f(X))]` for a density model and a bounded function `g`.
///
/// Cube-supported models are exact sums; radial models integrate over the
/// radial quantile `u ∈ (0, 1)`.
pub fn density_expectation<G: Fn(f64) -> f64>(model: &DensityModel, g: G) -> Result<f64> {
    model.validate()?;
    let d = model.d;
    let dd = d as f64;
    let radial = |r: f64| {
        let mut x = vec![0.0; d];
        x[0] = r;
        model.eval(&x)
    };
    // Guard the quantile endpoints, where the inverse CDFs diverge.
    let eps = 1e-12;
    let over_u = |q: &dyn Fn(f64) -> f64| integrate(|u| g(radial(q(u))), eps, 1.0 - eps, CURVE_REL_TOL);
    match &model.kind {
        DensityKind::UniformCube => Ok(g(1.0)),
        DensityKind::PiecewiseConstant { m, weights } => {
            let cells = (*m as f64).powi(d as i32);
            Ok(weights.iter().filter(|&&c| c > 0.0).map(|&c| c * g(c * cells)).sum())
        }
        DensityKind::AnnulusBeta { inner, outer, shape } => {
            let b = Beta::new(*shape, *shape).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            over_u(&|u| inner + (outer - inner) * b.inverse_cdf(u))
        }
        DensityKind::RadialExp { alpha } => {
            let gm = Gamma::new(dd / alpha, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            over_u(&|u| gm.inverse_cdf(u).powf(1.0 / alpha))
        }
        DensityKind::PowerLaw { alpha } => {
            let a = dd / alpha;
            let b = Beta::new(a, 1.0 - a).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            over_u(&|u| {
                let v = b.inverse_cdf(u);
                (v / (1.0 - v)).powf(1.0 / alpha)
            })
        }
        DensityKind::Gaussian { .. } => {
            // f depends on the Mahalanobis norm only; |L^{-1}x|^2 ~ χ²_d.
            let chi = ChiSquared::new(dd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let peak = model.eval(&vec![0.0; d]);
            let f_of_q = move |q: f64| peak * (-0.5 * q).exp();
            integrate(|u| g(f_of_q(chi.inverse_cdf(u))), eps, 1.0 - eps, CURVE_REL_TOL)
        }
    }
}

/// `F_k^◇(λ; f)` for Čech.
pub fn cech_limit_curve(lambda: f64, model: &DensityModel, k: usize, v_dk: f64) -> Result<f64> {
    let d = model.d;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let c = cech_prefactor(d, k, v_dk)?;
    let w = ball_volume(d);
    Ok(c * density_expectation(model, |f| lower_incomplete_gamma(k, w * f * lambda))?)
}

/// Samples `m` uniform points of the lens `B_1(0) ∩ B_1(e_1)` in `R^d`.
fn lens_sample(r: &mut rng::Rng, d: usize, m: usize, out: &mut Vec<f64>) {
    let half = 0.75f64.sqrt();
    out.clear();
    while out.len() < m * d {
        let x0: f64 = r.random();
        let rest: Vec<f64> = (1..d).map(|_| (2.0 * r.random::<f64>() - 1.0) * half).collect();
        let s: f64 = rest.iter().map(|v| v * v).sum();
        if x0 * x0 + s <= 1.0 && (x0 - 1.0) * (x0 - 1.0) + s <= 1.0 {
            out.push(x0);
            out.extend_from_slice(&rest);
        }
    }
}

/// Monte Carlo `β*_{k-2}(m)`: the mean reduced Betti number `β̃_{k-2}` of the
/// Rips complex at radius 1 on `m` uniform points of the unit lens.
pub fn beta_star(m: usize, d: usize, k: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if k < 2 || m < 2 * (k - 1) {
        return Err(Error::InvalidParameter(format!("beta_star needs k >= 2 and m >= 2(k-1) (k = {k}, m = {m})")));
    }
    if d == 0 || samples < BATCHES {
        return Err(Error::InvalidParameter(format!("beta_star needs d >= 1 and at least {BATCHES} samples")));
    }
    let per = samples / BATCHES;
    let verts: Vec<u32> = (0..m as u32).collect();
    let means = map_indexed(BATCHES, |b| {
        let mut r = rng::stream(seed, ((m as u64) << 32) | b as u64);
        let mut coords = Vec::with_capacity(m * d);
        let mut acc = 0usize;
        for _ in 0..per {
            lens_sample(&mut r, d, m, &mut coords);
            let cloud = PointCloud::from_flat(d, std::mem::take(&mut coords));
            let link = link_from_vertices(&cloud, &verts, 1.0, k - 1, Metric::Euclidean);
            acc += reduced_betti(&link, k - 2)[k - 1];
            coords = cloud.coords;
        }
        acc as f64 / per as f64
    });
    let (mean, sd) = mean_sd(&means);
    Ok((mean, sd / (BATCHES as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaStarEntry {
    pub m: usize,
    pub value: f64,
    pub stderr: f64,
}

/// Truncated Rips series with its tail estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipsSeries {
    pub f_star: f64,
    pub f_star_stderr: f64,
    pub table: Vec<BetaStarEntry>,
    pub tail_estimate: f64,
    pub truncation_warning: bool,
}

/// Geometric fit of the last few nonzero terms; infinite when they do not
/// decay.
fn tail_heuristic(terms: &[f64]) -> f64 {
    let last = terms.len().saturating_sub(5);
    let tail = &terms[last..];
    if tail.iter().all(|&t| t == 0.0) {
        return 0.0;
    }
    let ratios: Vec<f64> = tail.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect();
    if ratios.is_empty() {
        return 0.0;
    }
    let q = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let t = *tail.last().unwrap();
    if q < 1.0 {
        t * q / (1.0 - q)
    } else {
        f64::INFINITY
    }
}

/// `F_k^*` for Rips. `k = 1` is exact, `ω_d / (2κ_d)`. For `k >= 2` the series
/// `ω_d/(2κ_d) Σ_{m=2(k-1)}^{m_max} β*_{k-2}(m)` is truncated and the geometric
/// tail estimate is reported; the warning flag is set when it exceeds 1% of
/// the partial sum.
pub fn rips_limit_const(d: usize, k: usize, m_max: usize, samples: usize, seed: u64) -> Result<RipsSeries> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidParameter("rips constant needs d, k >= 1".into()));
    }
    let pre = ball_volume(d) / (2.0 * lens_volume(d));
    if k == 1 {
        return Ok(RipsSeries {
            f_star: pre,
            f_star_stderr: 0.0,
            table: Vec::new(),
            tail_estimate: 0.0,
            truncation_warning: false,
        });
    }
    let m0 = 2 * (k - 1);
    if m_max < m0 {
        return Err(Error::InvalidParameter(format!("m_max must be >= {m0}")));
    }
    let mut table = Vec::new();
    for m in m0..=m_max {
        let (value, stderr) = beta_star(m, d, k, samples, seed)?;
        table.push(BetaStarEntry { m, value, stderr });
    }
    let terms: Vec<f64> = table.iter().map(|e| e.value).collect();
    let partial: f64 = terms.iter().sum();
    let var: f64 = table.iter().map(|e| e.stderr * e.stderr).sum();
    let tail = tail_heuristic(&terms);
    Ok(RipsSeries {
        f_star: pre * partial,
        f_star_stderr: pre * var.sqrt(),
        table,
        tail_estimate: pre * tail,
        truncation_warning: tail > TAIL_WARN_FRACTION * partial,
    })
}

/// `γ^R_k(z)`: `1 - e^{-z}` for `k = 1`, else `Σ_m β*(m) P(m + 1, z)`.
pub fn rips_gamma(k: usize, table: &[BetaStarEntry], z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if k == 1 {
        return -(-z).exp_m1();
    }
    table.iter().map(|e| e.value * if z.is_infinite() { 1.0 } else { gamma_lr(e.m as f64 + 1.0, z) }).sum()
}

/// `F_k^◇(λ; f)` for Rips from a `β*` table (empty for `k = 1`).
pub fn rips_limit_curve(lambda: f64, model: &DensityModel, k: usize, table: &[BetaStarEntry]) -> Result<f64> {
    let d = model.d;
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let kappa = lens_volume(d);
    let pre = ball_volume(d) / (2.0 * kappa);
    Ok(pre * density_expectation(model, |f| rips_gamma(k, table, lambda * f * kappa))?)
}

/// `Π_k^*(R) = Σ_{j=0}^{k} (-1)^{k-j} F_j^*` with `F_0^* = 1`; `f_star[j - 1]`
/// holds `F_j^*` and `k = f_star.len()`.
pub fn total_pi_mass(f_star: &[f64]) -> f64 {
    let k = f_star.len();
    let sign = |j: usize| if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
    sign(0) + f_star.iter().enumerate().map(|(i, f)| sign(i + 1) * f).sum::<f64>()
}

/// Monte Carlo budget for [`limit_constants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub samples: usize,
    pub seed: u64,
    pub m_max: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions { samples: 1_000_000, seed: 0, m_max: DEFAULT_M_MAX }
    }
}

/// Everything needed to evaluate the limit curve and `F_k^*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitConstants {
    pub d: usize,
    pub k: usize,
    pub flavor: Flavor,
    pub omega_d: f64,
    pub kappa_d: f64,
    /// Čech only.
    pub gamma_dk: Option<f64>,
    pub v_dk: Option<f64>,
    pub v_dk_stderr: Option<f64>,
    pub f_star: f64,
    pub f_star_stderr: f64,
    /// Rips with `k >= 2` only.
    pub beta_star_table: Vec<BetaStarEntry>,
    #[serde(default)]
    pub truncation_warning: bool,
}

impl LimitConstants {
    /// `F_k^◇(λ; f)` with these constants.
    pub fn curve(&self, lambda: f64, model: &DensityModel) -> Result<f64> {
        if model.d != self.d {
            return Err(Error::InvalidParameter(format!("model has d = {}, constants d = {}", model.d, self.d)));
        }
        match self.flavor {
            Flavor::Cech => cech_limit_curve(lambda, model, self.k, self.v_dk.unwrap_or(f64::NAN)),
            Flavor::Rips => rips_limit_curve(lambda, model, self.k, &self.beta_star_table),
        }
    }
}

pub fn limit_constants(d: usize, k: usize, flavor: Flavor, opts: EstimateOptions) -> Result<LimitConstants> {
    let (omega_d, kappa_d) = (ball_volume(d), lens_volume(d));
    match flavor {
        Flavor::Cech => {
            let gamma_dk = grassmannian_volume(d, k)?;
            let (v, se) = vdk_estimate(d, k, opts.samples, opts.seed)?;
            let f_star = cech_limit_const(d, k, v)?;
            let f_star_stderr = if v > 0.0 { f_star * se / v } else { 0.0 };
            Ok(LimitConstants {
                d,
                k,
                flavor,
                omega_d,
                kappa_d,
                gamma_dk: Some(gamma_dk),
                v_dk: Some(v),
                v_dk_stderr: Some(se),
                f_star,
                f_star_stderr,
                beta_star_table: Vec::new(),
                truncation_warning: false,
            })
        }
        Flavor::Rips => {
            let s = rips_limit_const(d, k, opts.m_max, opts.samples, opts.seed)?;
            Ok(LimitConstants {
                d,
                k,
                flavor,
                omega_d,
                kappa_d,
                gamma_dk: None,
                v_dk: None,
                v_dk_stderr: None,
                f_star: s.f_star,
                f_star_stderr: s.f_star_stderr,
                beta_star_table: s.table,
                truncation_warning: s.truncation_warning,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn grassmannian_examples() {
        for d in 1..6 {
            assert_relative_eq!(grassmannian_volume(d, d).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert_relative_eq!(grassmannian_volume(2, 1).unwrap(), PI, epsilon = 1e-14);
        // Γ_{3,1} = |S^2| / |S^0| = 2π, Γ_{3,2} = |S^1||S^2| / (|S^0||S^1|) = 2π.
        assert_relative_eq!(grassmannian_volume(3, 1).unwrap(), 2.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(grassmannian_volume(3, 2).unwrap(), 2.0 * PI, epsilon = 1e-14);
        assert!(grassmannian_volume(2, 3).is_err());
    }

    #[test]
    fn v_d1_is_exact() {
        for d in 1..5 {
            let (v, se) = vdk_estimate(d, 1, 0, 0).unwrap();
            assert_eq!(v, 2f64.powi(d as i32 + 1));
            assert_eq!(se, 0.0);
        }
    }

    #[test]
    fn v22_gives_one_critical_triangle_per_point() {
        // In the plane F_0 - F_1 + F_2 = 0 at the limit, so F_2^* = F_1^* - 1 = 1,
        // which pins V_{2,2} = 6π².
        let (v, se) = vdk_estimate(2, 2, 200_000, 3).unwrap();
        assert!((v - 6.0 * PI * PI).abs() < 4.0 * se, "V22 = {v} ± {se}");
        assert_relative_eq!(cech_limit_const(2, 2, 6.0 * PI * PI).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vdk_seeds_agree() {
        let (a, sa) = vdk_estimate(3, 2, 100_000, 1).unwrap();
        let (b, sb) = vdk_estimate(3, 2, 100_000, 2).unwrap();
        assert!(a > 0.0 && b > 0.0);
        assert!((a - b).abs() < 3.0 * (sa * sa + sb * sb).sqrt());
    }

    #[test]
    fn cech_gabriel_constant() {
        // Critical edges of the planar Čech filtration are Gabriel edges: two
        // per point.
        assert_relative_eq!(cech_limit_const(2, 1, 8.0).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn cech_uniform_curve() {
        let u = DensityModel::uniform_cube(2);
        for &l in &[0.0, 0.5, 1.0, 4.0] {
            let c = cech_limit_curve(l, &u, 1, 8.0).unwrap();
            assert_relative_eq!(c, 2.0 * (1.0 - (-PI * l).exp()), epsilon = 1e-12);
        }
        assert_relative_eq!(cech_limit_curve(f64::INFINITY, &u, 1, 8.0).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn curves_are_monotone_and_converge() {
        let models = [
            DensityModel::standard_gaussian(2),
            DensityModel::annulus_beta(2, 0.2, 0.6, 2.0),
            DensityModel::new(DensityKind::RadialExp { alpha: 1.5 }, 2).unwrap(),
            DensityModel::new(DensityKind::PowerLaw { alpha: 3.0 }, 2).unwrap(),
        ];
        for model in &models {
            let mut prev = 0.0;
            for e in -2..=6 {
                let c = cech_limit_curve(2f64.powi(e), model, 1, 8.0).unwrap();
                assert!(c >= prev - 1e-9, "{model:?}");
                prev = c;
            }
            // The power law's tail mass beyond radius r decays only like 1/r.
            let far = cech_limit_curve(1e13, model, 1, 8.0).unwrap();
            assert!((far - 2.0).abs() < 2e-3, "{model:?}: {far}");
        }
    }

    #[test]
    fn density_expectation_is_a_mean() {
        for model in [DensityModel::standard_gaussian(3), DensityModel::annulus_beta(2, 0.2, 0.6, 2.0)] {
            assert_relative_eq!(density_expectation(&model, |_| 1.0).unwrap(), 1.0, epsilon = 1e-9);
        }
        // E[f(X)] = ∫ f² = 1/(4π) for the planar standard normal.
        let g = density_expectation(&DensityModel::standard_gaussian(2), |f| f).unwrap();
        assert_relative_eq!(g, 1.0 / (4.0 * PI), epsilon = 1e-7);
    }

    #[test]
    fn rips_k1_constants() {
        let s = rips_limit_const(2, 1, 0, 0, 0).unwrap();
        assert_relative_eq!(s.f_star, 1.27876, epsilon = 1e-5);
        assert_relative_eq!(rips_limit_const(3, 1, 0, 0, 0).unwrap().f_star, 1.6, epsilon = 1e-12);
        assert_relative_eq!(total_pi_mass(&[s.f_star]), 0.27876, epsilon = 1e-5);
    }

    #[test]
    fn beta_star_bounds_and_monotone_partial_sums() {
        for m in 2..7 {
            let (b, _) = beta_star(m, 2, 2, 2000, 5).unwrap();
            assert!((0.0..=m as f64).contains(&b));
        }
        let s = rips_limit_const(2, 2, 8, 2000, 5).unwrap();
        let mut acc = 0.0;
        for e in &s.table {
            assert!(e.value >= 0.0);
            acc += e.value;
        }
        assert!(acc > 0.0);
        assert!(beta_star(1, 2, 2, 2000, 5).is_err());
    }

    #[test]
    fn total_mass_signs() {
        assert_eq!(total_pi_mass(&[2.0]), 1.0);
        assert_eq!(total_pi_mass(&[2.0, 1.0]), 0.0);
    }

    #[test]
    fn rips_curve_k1_uniform() {
        let u = DensityModel::uniform_cube(2);
        let k2 = lens_volume(2);
        let v = rips_limit_curve(1.0, &u, 1, &[]).unwrap();
        assert_relative_eq!(v, PI / (2.0 * k2) * (1.0 - (-k2).exp()), epsilon = 1e-12);
    }
}
