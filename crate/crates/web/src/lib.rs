//! Browser bindings. Each export takes plain numbers and strings and returns
//! a JSON document for the page to draw.

use serde::Serialize;
use univpi::complex::Flavor;
use univpi::critical::critical_faces;
use univpi::density::{rmax_policy, sample_binomial_stream, DensityModel, ProcessKind};
use univpi::harness::pi_values_of;
use univpi::knn::{build_knn, cone_cover, degree_distribution};
use univpi::theory::{limit_constants, EstimateOptions};
use wasm_bindgen::prelude::*;

/// Largest cloud the page may request; keeps a single-threaded run short.
pub const MAX_POINTS: usize = 20_000;

pub fn density(name: &str) -> Result<DensityModel, String> {
    match name {
        "uniform" => Ok(DensityModel::uniform_cube(2)),
        "annulus" => Ok(DensityModel::annulus_beta(2, 0.2, 0.6, 2.0)),
        "gaussian" => Ok(DensityModel::standard_gaussian(2)),
        _ => Err(format!("unknown density `{name}` (uniform, annulus, gaussian)")),
    }
}

fn flavor(name: &str) -> Result<Flavor, String> {
    match name {
        "cech" => Ok(Flavor::Cech),
        "rips" => Ok(Flavor::Rips),
        _ => Err(format!("unknown flavor `{name}` (cech, rips)")),
    }
}

fn check_n(n: usize) -> Result<(), String> {
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(format!("n must be in 2..={MAX_POINTS}"));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct PiSample {
    pub density: String,
    pub n: usize,
    pub r_max: f64,
    /// Ascending.
    pub pi_values: Vec<f64>,
    /// Histogram of `ln ln π` on `bins` equal cells over `[lo, hi]`.
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

/// π-values of `H_1` for `n` points from the named density, with the
/// Poisson-law cutoff for its type.
pub fn pi_sample(name: &str, flavor_name: &str, n: usize, seed: u64, bins: usize) -> Result<PiSample, String> {
    check_n(n)?;
    let model = density(name)?;
    let fl = flavor(flavor_name)?;
    let r_max = rmax_policy(ProcessKind::Poisson, n as f64, 2, 1, model.type_tag()).map_err(|e| e.to_string())?.r_max;
    let cloud = sample_binomial_stream(&model, n, seed, 0).map_err(|e| e.to_string())?;
    let pi_values = pi_values_of(&cloud, fl, 1, r_max).map_err(|e| e.to_string())?.pi_values;
    let (lo, hi) = (-4.0, 1.5);
    let bins = bins.clamp(1, 200);
    let mut counts = vec![0; bins];
    for &p in &pi_values {
        let t = ((p.ln().ln() - lo) / (hi - lo) * bins as f64).floor();
        if t >= 0.0 && t < bins as f64 {
            counts[t as usize] += 1;
        }
    }
    Ok(PiSample { density: name.into(), n, r_max, pi_values, lo, hi, counts })
}

#[derive(Debug, Serialize)]
pub struct CurveComparison {
    pub flavor: Flavor,
    pub lambdas: Vec<f64>,
    /// `F_1(λ)/n` from critical faces of one sample.
    pub simulated: Vec<f64>,
    /// The limit `F_1^◇(λ)`.
    pub theory: Vec<f64>,
    pub f_star: f64,
}

/// Simulated `F_1(λ)/n` on a uniform cube sample next to its limit.
pub fn curve_comparison(
    flavor_name: &str,
    n: usize,
    seed: u64,
    lambda_max: f64,
    steps: usize,
) -> Result<CurveComparison, String> {
    check_n(n)?;
    let fl = flavor(flavor_name)?;
    if !(lambda_max > 0.0 && lambda_max <= 50.0) || !(2..=400).contains(&steps) {
        return Err("need 0 < lambda_max <= 50 and 2 <= steps <= 400".into());
    }
    let model = DensityModel::uniform_cube(2);
    let cloud = sample_binomial_stream(&model, n, seed, 0).map_err(|e| e.to_string())?;
    let nu = n as f64;
    let lambdas: Vec<f64> = (1..=steps).map(|i| lambda_max * i as f64 / steps as f64).collect();
    let report = critical_faces(&cloud, fl, 1, (lambda_max / nu).sqrt()).map_err(|e| e.to_string())?;
    let simulated = report.curve(&lambdas, nu).iter().map(|p| p.f as f64 / nu).collect();
    let opts = EstimateOptions { samples: 1, ..Default::default() };
    let lc = limit_constants(2, 1, fl, opts).map_err(|e| e.to_string())?;
    let theory =
        lambdas.iter().map(|&l| lc.curve(l, &model)).collect::<univpi::Result<_>>().map_err(|e| e.to_string())?;
    Ok(CurveComparison { flavor: fl, lambdas, simulated, theory, f_star: lc.f_star })
}

#[derive(Debug, Serialize)]
pub struct Degrees {
    pub density: String,
    pub n: usize,
    pub k_param: usize,
    /// `fractions[i]` is the share of vertices of degree `k_param + i`.
    pub fractions: Vec<f64>,
}

pub fn knn_degrees(name: &str, n: usize, k_param: usize, seed: u64) -> Result<Degrees, String> {
    check_n(n)?;
    if !(1..=8).contains(&k_param) || k_param >= n {
        return Err("need 1 <= k_param <= 8 and k_param < n".into());
    }
    let model = density(name)?;
    let cloud = sample_binomial_stream(&model, n, seed, 0).map_err(|e| e.to_string())?;
    let g = build_knn(&cloud, k_param).map_err(|e| e.to_string())?;
    let bound = cone_cover(2).map_err(|e| e.to_string())?.degree_bound(k_param);
    let dist = degree_distribution(&g, bound).map_err(|e| e.to_string())?;
    Ok(Degrees { density: name.into(), n, k_param, fractions: dist.fractions() })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string())).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = piSample)]
pub fn pi_sample_js(density: &str, flavor: &str, n: usize, seed: u32, bins: usize) -> Result<String, JsValue> {
    to_js(pi_sample(density, flavor, n, seed.into(), bins))
}

#[wasm_bindgen(js_name = curveComparison)]
pub fn curve_comparison_js(
    flavor: &str,
    n: usize,
    seed: u32,
    lambda_max: f64,
    steps: usize,
) -> Result<String, JsValue> {
    to_js(curve_comparison(flavor, n, seed.into(), lambda_max, steps))
}

#[wasm_bindgen(js_name = knnDegrees)]
pub fn knn_degrees_js(density: &str, n: usize, k_param: usize, seed: u32) -> Result<String, JsValue> {
    to_js(knn_degrees(density, n, k_param, seed.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_sample_is_sorted_and_counted() {
        let s = pi_sample("annulus", "cech", 800, 4, 40).unwrap();
        assert!(!s.pi_values.is_empty());
        assert!(s.pi_values.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.pi_values[0] >= 1.0);
        assert!(s.counts.iter().sum::<usize>() <= s.pi_values.len());
        assert!(pi_sample("cube", "cech", 100, 0, 10).is_err());
        assert!(pi_sample("uniform", "cech", 1, 0, 10).is_err());
    }

    #[test]
    fn curve_tracks_the_limit() {
        let c = curve_comparison("cech", 4000, 2, 4.0, 4).unwrap();
        assert_eq!(c.f_star, 2.0);
        assert!(c.simulated.windows(2).all(|w| w[0] <= w[1]));
        for (s, t) in c.simulated.iter().zip(&c.theory) {
            assert!((s / t - 1.0).abs() < 0.1, "{s} vs {t}");
        }
    }

    #[test]
    fn knn_fractions_sum_to_one() {
        let d = knn_degrees("gaussian", 1000, 2, 9).unwrap();
        assert_eq!(d.fractions.len(), 11);
        assert!((d.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(knn_degrees("uniform", 5, 5, 0).is_err());
    }

    #[test]
    fn rips_curve_tracks_the_limit() {
        let c = curve_comparison("rips", 4000, 5, 8.0, 4).unwrap();
        for (s, t) in c.simulated.iter().zip(&c.theory) {
            assert!((s / t - 1.0).abs() < 0.1, "{s} vs {t}");
        }
    }
}
