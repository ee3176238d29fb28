//! Density models, their evaluation, and seeded binomial/Poisson samplers.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng as _;
use rand_distr::{Beta, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::{beta::ln_beta, gamma::gamma};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::sphere_area;
use crate::rng::{self, Rng};

/// Good-density classes: compact support bounded below (I), compact support
/// with polynomial decay to zero (II), full support with a radial tail (III).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeTag {
    I,
    II,
    III,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    /// Uniform on `[0,1]^d`.
    UniformCube,
    /// `sum_i c_i M 1_{Q_i}` over the `M = m^d` sub-cubes of `[0,1]^d`, cells
    /// in row-major order with the first axis slowest.
    PiecewiseConstant { m: usize, weights: Vec<f64> },
    /// Uniform direction, radius `inner + (outer - inner) * Beta(shape, shape)`.
    AnnulusBeta { inner: f64, outer: f64, shape: f64 },
    /// Centered normal with the given covariance (row-major `d x d`).
    Gaussian { covariance: Vec<Vec<f64>> },
    /// `f(x) ∝ exp(-|x|^alpha)`.
    RadialExp { alpha: f64 },
    /// `f(x) ∝ (1 + |x|^alpha)^{-1}`, `alpha > d`.
    PowerLaw { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    #[serde(flatten)]
    pub kind: DensityKind,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_tag: Option<TypeTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl DensityModel {
    pub fn new(kind: DensityKind, d: usize) -> Result<Self> {
        let m = DensityModel { kind, d, type_tag: None, name: None };
        m.validate()?;
        Ok(m)
    }

    pub fn uniform_cube(d: usize) -> Self {
        DensityModel { kind: DensityKind::UniformCube, d, type_tag: None, name: None }
    }

    pub fn standard_gaussian(d: usize) -> Self {
        let covariance = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        DensityModel { kind: DensityKind::Gaussian { covariance }, d, type_tag: None, name: None }
    }

    pub fn annulus_beta(d: usize, inner: f64, outer: f64, shape: f64) -> Self {
        DensityModel { kind: DensityKind::AnnulusBeta { inner, outer, shape }, d, type_tag: None, name: None }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// Short identifier used in file names.
    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        match &self.kind {
            DensityKind::UniformCube => "uniform_cube".into(),
            DensityKind::PiecewiseConstant { .. } => "piecewise_constant".into(),
            DensityKind::AnnulusBeta { .. } => "annulus_beta".into(),
            DensityKind::Gaussian { .. } => "gaussian".into(),
            DensityKind::RadialExp { .. } => "radial_exp".into(),
            DensityKind::PowerLaw { .. } => "power_law".into(),
        }
    }

    pub fn type_tag(&self) -> TypeTag {
        self.type_tag.unwrap_or(match &self.kind {
            DensityKind::UniformCube => TypeTag::I,
            DensityKind::PiecewiseConstant { weights, .. } => {
                if weights.iter().all(|&c| c > 0.0) {
                    TypeTag::I
                } else {
                    TypeTag::II
                }
            }
            DensityKind::AnnulusBeta { .. } => TypeTag::II,
            DensityKind::Gaussian { .. } | DensityKind::RadialExp { .. } | DensityKind::PowerLaw { .. } => TypeTag::III,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParameter(s));
        if self.d == 0 {
            return bad("dimension must be at least 1".into());
        }
        match &self.kind {
            DensityKind::UniformCube => {}
            DensityKind::PiecewiseConstant { m, weights } => {
                let cells = m.checked_pow(self.d as u32).unwrap_or(0);
                if *m == 0 || weights.len() != cells {
                    return bad(format!("piecewise_constant needs m^d = {cells} weights"));
                }
                if weights.iter().any(|&c| !(c >= 0.0)) {
                    return bad("piecewise_constant weights must be nonnegative".into());
                }
                let s: f64 = weights.iter().sum();
                if (s - 1.0).abs() > 1e-9 {
                    return bad(format!("piecewise_constant weights sum to {s}, not 1"));
                }
            }
            DensityKind::AnnulusBeta { inner, outer, shape } => {
                if !(*inner >= 0.0 && outer > inner && *shape > 0.0) {
                    return bad("annulus_beta needs 0 <= inner < outer and shape > 0".into());
                }
                if self.d < 2 {
                    return bad("annulus_beta needs d >= 2".into());
                }
            }
            DensityKind::Gaussian { covariance } => {
                if covariance.len() != self.d || covariance.iter().any(|r| r.len() != self.d) {
                    return bad("gaussian covariance must be d x d".into());
                }
                cholesky(covariance)?;
            }
            DensityKind::RadialExp { alpha } => {
                if !(*alpha > 0.0) {
                    return bad("radial_exp needs alpha > 0".into());
                }
            }
            DensityKind::PowerLaw { alpha } => {
                if !(*alpha > self.d as f64) {
                    return bad(format!("power_law needs alpha > d = {}", self.d));
                }
            }
        }
        Ok(())
    }

    /// True when the support is a bounded set.
    pub fn bounded_support(&self) -> bool {
        matches!(
            self.kind,
            DensityKind::UniformCube | DensityKind::PiecewiseConstant { .. } | DensityKind::AnnulusBeta { .. }
        )
    }

    /// Evaluates the density at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.d, "dimension mismatch");
        let d = self.d;
        let in_cube = || x.iter().all(|&v| (0.0..=1.0).contains(&v));
        match &self.kind {
            DensityKind::UniformCube => {
                if in_cube() {
                    1.0
                } else {
                    0.0
                }
            }
            DensityKind::PiecewiseConstant { m, weights } => {
                if !in_cube() {
                    return 0.0;
                }
                let idx = cell_index(x, *m);
                weights[idx] * (*m as f64).powi(d as i32)
            }
            DensityKind::AnnulusBeta { inner, outer, shape } => {
                let r = norm(x);
                if r < *inner || r > *outer || r == 0.0 {
                    return 0.0;
                }
                let w = outer - inner;
                let t = (r - inner) / w;
                let ln_pdf = (shape - 1.0) * (t.ln() + (1.0 - t).ln()) - ln_beta(*shape, *shape);
                ln_pdf.exp() / w / (sphere_area(d) * r.powi(d as i32 - 1))
            }
            DensityKind::Gaussian { covariance } => {
                let l = cholesky(covariance).expect("validated covariance");
                let y = forward_solve(&l, x);
                let q: f64 = y.iter().map(|v| v * v).sum();
                let det_sqrt: f64 = (0..d).map(|i| l[i][i]).product();
                (-0.5 * q).exp() / ((2.0 * PI).powf(d as f64 / 2.0) * det_sqrt)
            }
            DensityKind::RadialExp { alpha } => {
                let norm_c = sphere_area(d) * gamma(d as f64 / alpha) / alpha;
                (-norm(x).powf(*alpha)).exp() / norm_c
            }
            DensityKind::PowerLaw { alpha } => {
                let dd = d as f64;
                let radial = PI / (alpha * (PI * dd / alpha).sin());
                1.0 / ((1.0 + norm(x).powf(*alpha)) * sphere_area(d) * radial)
            }
        }
    }

    /// Draws one point.
    pub fn sample_point(&self, rng: &mut Rng, out: &mut Vec<f64>) {
        let d = self.d;
        match &self.kind {
            DensityKind::UniformCube => {
                for _ in 0..d {
                    out.push(rng.random::<f64>());
                }
            }
            DensityKind::PiecewiseConstant { m, weights } => {
                let wi = WeightedIndex::new(weights).expect("validated weights");
                let mut cell = wi.sample(rng);
                let mut digits = vec![0usize; d];
                for a in (0..d).rev() {
                    digits[a] = cell % m;
                    cell /= m;
                }
                for a in 0..d {
                    out.push((digits[a] as f64 + rng.random::<f64>()) / *m as f64);
                }
            }
            DensityKind::AnnulusBeta { inner, outer, shape } => {
                let b = Beta::new(*shape, *shape).expect("validated shape");
                let r = inner + (outer - inner) * b.sample(rng);
                push_direction(rng, d, r, out);
            }
            DensityKind::Gaussian { covariance } => {
                let l = cholesky(covariance).expect("validated covariance");
                let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                for i in 0..d {
                    out.push((0..=i).map(|j| l[i][j] * z[j]).sum());
                }
            }
            DensityKind::RadialExp { alpha } => {
                let g = Gamma::new(d as f64 / alpha, 1.0).expect("positive shape");
                let r = g.sample(rng).powf(1.0 / alpha);
                push_direction(rng, d, r, out);
            }
            DensityKind::PowerLaw { alpha } => {
                let a = d as f64 / alpha;
                let b = Beta::new(a, 1.0 - a).expect("alpha > d");
                let u: f64 = b.sample(rng);
                let r = (u / (1.0 - u)).powf(1.0 / alpha);
                push_direction(rng, d, r, out);
            }
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn cell_index(x: &[f64], m: usize) -> usize {
    x.iter().fold(0usize, |acc, &v| {
        let c = ((v * m as f64).floor() as usize).min(m - 1);
        acc * m + c
    })
}

fn push_direction(rng: &mut Rng, d: usize, r: f64, out: &mut Vec<f64>) {
    loop {
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&z);
        if n > 1e-300 {
            out.extend(z.iter().map(|v| r * v / n));
            return;
        }
    }
}

pub(crate) fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = a[i][i] - s;
                if !(v > 0.0) {
                    return Err(Error::InvalidParameter("covariance not positive definite".into()));
                }
                l[i][j] = v.sqrt();
            } else {
                if (a[i][j] - a[j][i]).abs() > 1e-12 * (a[i][j].abs() + 1.0) {
                    return Err(Error::InvalidParameter("covariance not symmetric".into()));
                }
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

fn forward_solve(l: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut y = vec![0.0; d];
    for i in 0..d {
        let s: f64 = (0..i).map(|j| l[i][j] * y[j]).sum();
        y[i] = (x[i] - s) / l[i][i];
    }
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    Binomial {
        n: usize,
    },
    Poisson {
        nu: f64,
    },
    /// Points given explicitly (fixtures, files).
    Fixed,
}

impl Process {
    /// `n` for binomial, `nu` for Poisson, point count for fixed clouds.
    pub fn intensity(&self, len: usize) -> f64 {
        match self {
            Process::Binomial { n } => *n as f64,
            Process::Poisson { nu } => *nu,
            Process::Fixed => len as f64,
        }
    }
}

/// A finite point set in R^d with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub d: usize,
    /// Coordinates, point-major.
    pub coords: Vec<f64>,
    pub seed: u64,
    pub model: Option<DensityModel>,
    pub process: Process,
}

impl PointCloud {
    pub fn from_points(d: usize, points: &[Vec<f64>]) -> Self {
        assert!(points.iter().all(|p| p.len() == d), "dimension mismatch");
        PointCloud {
            d,
            coords: points.iter().flatten().copied().collect(),
            seed: 0,
            model: None,
            process: Process::Fixed,
        }
    }

    pub fn from_flat(d: usize, coords: Vec<f64>) -> Self {
        assert!(d > 0 && coords.len().is_multiple_of(d));
        PointCloud { d, coords, seed: 0, model: None, process: Process::Fixed }
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Intensity used to convert radii into `lambda = intensity * r^d`.
    pub fn intensity(&self) -> f64 {
        self.process.intensity(self.len())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coords.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn translated(&self, x0: &[f64]) -> Self {
        assert_eq!(x0.len(), self.d);
        let mut out = self.clone();
        for p in out.coords.chunks_exact_mut(self.d) {
            p.iter_mut().zip(x0).for_each(|(v, t)| *v += t);
        }
        out
    }

    /// Sub-cloud of the given indices, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut out = self.clone();
        out.coords = idx.iter().flat_map(|&i| self.point(i).iter().copied()).collect();
        out.process = Process::Fixed;
        out
    }
}

/// `n` iid points with density `model`, from an explicit generator.
pub fn sample_binomial_with(model: &DensityModel, n: usize, rng: &mut Rng) -> Result<Vec<f64>> {
    model.validate()?;
    let mut coords = Vec::with_capacity(n * model.d);
    for _ in 0..n {
        model.sample_point(rng, &mut coords);
    }
    Ok(coords)
}

pub fn sample_binomial(model: &DensityModel, n: usize, seed: u64) -> Result<PointCloud> {
    sample_binomial_stream(model, n, seed, 0)
}

pub fn sample_binomial_stream(model: &DensityModel, n: usize, seed: u64, stream: u64) -> Result<PointCloud> {
    let mut rng = rng::stream(seed, stream);
    let coords = sample_binomial_with(model, n, &mut rng)?;
    Ok(PointCloud { d: model.d, coords, seed, model: Some(model.clone()), process: Process::Binomial { n } })
}

/// Poisson process with intensity `nu * f`: `N ~ Pois(nu)`, then `N` iid points.
pub fn sample_poisson(model: &DensityModel, nu: f64, seed: u64) -> Result<PointCloud> {
    sample_poisson_stream(model, nu, seed, 0)
}

pub fn sample_poisson_stream(model: &DensityModel, nu: f64, seed: u64, stream: u64) -> Result<PointCloud> {
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("poisson intensity {nu} must be positive")));
    }
    let mut rng = rng::stream(seed, stream);
    let count = Poisson::new(nu).map_err(|e| Error::InvalidParameter(e.to_string()))?.sample(&mut rng) as usize;
    let coords = sample_binomial_with(model, count, &mut rng)?;
    Ok(PointCloud { d: model.d, coords, seed, model: Some(model.clone()), process: Process::Poisson { nu } })
}

/// Process kind for the death-radius cutoff policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Binomial,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmaxChoice {
    pub lambda_max: f64,
    pub r_max: f64,
}

/// Death-radius cutoff: Type III uses `1/ln n`; otherwise `Lambda_max` is
/// `n^{1/(dk+2)}` (Poisson law) or `n^{1/(4(k+2))}` (binomial law) and
/// `r_max = (Lambda_max / n)^{1/d}`.
pub fn rmax_policy(process: ProcessKind, n: f64, d: usize, k: usize, tag: TypeTag) -> Result<RmaxChoice> {
    if !(n > 1.0) || d == 0 {
        return Err(Error::InvalidParameter(format!("rmax policy needs n > 1, d >= 1 (n = {n})")));
    }
    if tag == TypeTag::III {
        let r_max = 1.0 / n.ln();
        return Ok(RmaxChoice { lambda_max: n * r_max.powi(d as i32), r_max });
    }
    let lambda_max = match process {
        ProcessKind::Poisson => n.powf(1.0 / (d * k + 2) as f64),
        ProcessKind::Binomial => n.powf(1.0 / (4 * (k + 2)) as f64),
    };
    Ok(RmaxChoice { lambda_max, r_max: (lambda_max / n).powf(1.0 / d as f64) })
}
