//! Two-sample comparisons used by the harness.

use crate::error::{Error, Result};

/// Two-sample Kolmogorov–Smirnov statistic: the sup-distance between the
/// empirical CDFs of `a` and `b`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < x.len() && j < y.len() {
        // Step past every copy of the smaller value in both samples.
        let v = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        best = best.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(best)
}

/// Asymptotic critical value at level 1e-3: `1.949 sqrt((n1 + n2) / (n1 n2))`.
pub fn ks_critical_1e3(n1: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    1.949 * ((a + b) / (a * b)).sqrt()
}

/// Total-variation distance between two probability vectors, padding the
/// shorter with zeros.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n).map(|i| (p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0)).abs()).sum::<f64>()
}

/// Sample mean and standard deviation (n - 1 denominator).
pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (m, 0.0);
    }
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}
