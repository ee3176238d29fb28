//! Adaptive Simpson quadrature on finite intervals.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// The absolute floor is `rel_tol * |coarse estimate|`, falling back to
/// `rel_tol` when the coarse estimate vanishes.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    // Seed with a 16-panel composite rule so narrow features are not missed.
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut coarse = 0.0;
    let mut pieces = Vec::with_capacity(panels);
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == panels { b } else { lo + h };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let s = simpson(lo, hi, flo, fmid, fhi);
        coarse += s;
        pieces.push((lo, hi, flo, fmid, fhi, s));
    }
    let abs_tol = if coarse.abs() > 0.0 { rel_tol * coarse.abs() } else { rel_tol };
    let per_panel = abs_tol / panels as f64;
    let mut total = 0.0;
    for (lo, hi, flo, fmid, fhi, s) in pieces {
        total += refine(&f, lo, hi, flo, fmid, fhi, s, per_panel, MAX_DEPTH)?;
    }
    if !total.is_finite() {
        return Err(Error::IntegrationFailure(format!("non-finite result on [{a}, {b}]")));
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // An interval with no representable interior quarter-points is final.
    if delta.abs() <= 15.0 * tol || lm <= a || rm >= b {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::IntegrationFailure(format!(
            "max depth reached near [{a}, {b}], error estimate {}",
            delta.abs() / 15.0
        )));
    }
    Ok(refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1e-12).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass() {
        let v = integrate(|x| (-x * x / 2.0).exp(), -12.0, 12.0, 1e-10).unwrap();
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-8).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-7);
    }
}
