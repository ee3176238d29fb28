//! Euclidean primitives: circumspheres, minimal enclosing balls, open-simplex
//! membership, the lens/forbidden region of an edge, and unit ball/lens volumes.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;

/// Relative threshold on the smallest singular value of the edge-vector matrix.
pub const DEGENERACY_REL_TOL: f64 = 1e-9;
/// Barycentric coordinates must exceed this to count as interior.
pub const INTERIOR_TOL: f64 = 1e-12;
/// Relative slack used when testing ball containment.
pub const CONTAIN_REL_TOL: f64 = 1e-12;

type Coords = SmallVec<[f64; 4]>;

/// An owned point in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// The circumsphere of a point set together with the affine coefficients of
/// its center, `center = p0 + sum_i a_i (p_i - p0)`.
#[derive(Debug, Clone)]
pub struct Circumsphere {
    pub sphere: Sphere,
    affine: Coords,
}

impl Circumsphere {
    /// Barycentric coordinates of the center with respect to the input points.
    pub fn barycentric(&self) -> Vec<f64> {
        let s: f64 = self.affine.iter().sum();
        std::iter::once(1.0 - s).chain(self.affine.iter().copied()).collect()
    }

    /// True iff the center lies in the open simplex spanned by the points.
    pub fn center_in_open_simplex(&self) -> bool {
        self.barycentric().iter().all(|&b| b > INTERIOR_TOL)
    }

    pub fn center_in_closed_simplex(&self) -> bool {
        self.barycentric().iter().all(|&b| b >= -INTERIOR_TOL)
    }
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Smallest eigenvalue of a small symmetric matrix (row-major, `n x n`) by
/// cyclic Jacobi rotations.
fn min_eigenvalue_sym(m: &mut [f64], n: usize) -> f64 {
    match n {
        0 => return f64::INFINITY,
        1 => return m[0],
        2 => {
            let (a, b, c) = (m[0], m[1], m[3]);
            let tr = 0.5 * (a + c);
            let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            return tr - disc;
        }
        _ => {}
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let mrp = m[r * n + p];
                    let mrq = m[r * n + q];
                    m[r * n + p] = c * mrp - s * mrq;
                    m[r * n + q] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let mpr = m[p * n + r];
                    let mqr = m[q * n + r];
                    m[p * n + r] = c * mpr - s * mqr;
                    m[q * n + r] = s * mpr + c * mqr;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).fold(f64::INFINITY, f64::min)
}

/// Solves the small dense system `g x = b` by Gaussian elimination with
/// partial pivoting. `g` is consumed as scratch.
fn solve_small(g: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| g[i * n + col].abs().total_cmp(&g[j * n + col].abs()))?;
        if g[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                g.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        let d = g[col * n + col];
        for r in (col + 1)..n {
            let f = g[r * n + col] / d;
            if f != 0.0 {
                for c in col..n {
                    g[r * n + c] -= f * g[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= g[r * n + c] * b[c];
        }
        b[r] = acc / g[r * n + r];
    }
    Some(())
}

/// Circumsphere of `k+1` points in R^d (`d >= k`): the unique sphere through
/// all points whose center lies in their affine hull.
pub fn circumsphere(pts: &[&[f64]]) -> Result<Circumsphere> {
    let p0 = *pts.first().ok_or(Error::Degenerate)?;
    let d = p0.len();
    let k = pts.len() - 1;
    if k == 0 {
        return Ok(Circumsphere { sphere: Sphere { center: p0.to_vec(), radius: 0.0 }, affine: Coords::new() });
    }
    if k == 1 {
        let p1 = pts[1];
        let r = dist(p0, p1) / 2.0;
        if r == 0.0 {
            return Err(Error::Degenerate);
        }
        let center = p0.iter().zip(p1).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut affine = Coords::new();
        affine.push(0.5);
        return Ok(Circumsphere { sphere: Sphere { center, radius: r }, affine });
    }
    if k > d {
        return Err(Error::Degenerate);
    }
    let vs: SmallVec<[Coords; 4]> = pts[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let mut gram: SmallVec<[f64; 16]> = SmallVec::from_elem(0.0, k * k);
    for i in 0..k {
        for j in i..k {
            let g: f64 = vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum();
            gram[i * k + j] = g;
            gram[j * k + i] = g;
        }
    }
    let scale2 = (0..k).map(|i| gram[i * k + i]).fold(0.0, f64::max);
    if scale2 == 0.0 {
        return Err(Error::Degenerate);
    }
    let mut scratch = gram.clone();
    let lam_min = min_eigenvalue_sym(&mut scratch, k);
    let thresh = DEGENERACY_REL_TOL * DEGENERACY_REL_TOL * scale2;
    if !(lam_min > thresh) {
        return Err(Error::Degenerate);
    }
    let mut rhs: Coords = (0..k).map(|i| 0.5 * gram[i * k + i]).collect();
    solve_small(&mut gram, &mut rhs, k).ok_or(Error::Degenerate)?;
    let mut center: Vec<f64> = p0.to_vec();
    for (a, v) in rhs.iter().zip(&vs) {
        for (c, x) in center.iter_mut().zip(v) {
            *c += a * x;
        }
    }
    let radius = dist(&center, p0);
    Ok(Circumsphere { sphere: Sphere { center, radius }, affine: rhs })
}

/// True iff the circumcenter of `pts` lies in their open simplex.
pub fn center_in_open_simplex(pts: &[&[f64]]) -> Result<bool> {
    Ok(circumsphere(pts)?.center_in_open_simplex())
}

/// Minimal enclosing ball of a small point set, by exhaustive search over
/// support subsets of size at most `d + 1`.
pub fn min_enclosing_ball(pts: &[&[f64]]) -> Sphere {
    assert!(!pts.is_empty(), "min_enclosing_ball of an empty set");
    let n = pts.len();
    if n == 1 {
        return Sphere { center: pts[0].to_vec(), radius: 0.0 };
    }
    if n == 2 {
        return circumsphere(pts).map(|c| c.sphere).unwrap_or_else(|_| Sphere { center: pts[0].to_vec(), radius: 0.0 });
    }
    let d = pts[0].len();
    let max_support = (d + 1).min(n);
    assert!(n <= 16, "min_enclosing_ball is meant for simplex-sized inputs");
    let mut best: Option<Sphere> = None;
    let mut sub: SmallVec<[&[f64]; 8]> = SmallVec::new();
    // Subsets in order of increasing size; the first feasible ball of each
    // size is compared against the running best.
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size < 2 || size > max_support {
            continue;
        }
        sub.clear();
        for (i, p) in pts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sub.push(p);
            }
        }
        let Ok(cs) = circumsphere(&sub) else { continue };
        let s = cs.sphere;
        if let Some(b) = &best {
            if s.radius >= b.radius {
                continue;
            }
        }
        let lim = s.radius * (1.0 + CONTAIN_REL_TOL);
        let lim2 = lim * lim;
        if pts.iter().all(|p| dist2(p, &s.center) <= lim2) {
            best = Some(s);
        }
    }
    best.unwrap_or_else(|| {
        // All points coincide.
        Sphere { center: pts[0].to_vec(), radius: 0.0 }
    })
}

/// The lens `B_rho(x1) ∩ B_rho(x2)`, `rho = |x1 - x2|`, and its central
/// forbidden ball of radius `(1 - sqrt(3)/2) rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct LensSpec {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub rho: f64,
    pub forbidden_radius: f64,
}

pub const FORBIDDEN_RATIO: f64 = 1.0 - 0.866_025_403_784_438_6;

impl LensSpec {
    pub fn new(x1: &[f64], x2: &[f64]) -> Result<Self> {
        let rho = dist(x1, x2);
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter("lens endpoints coincide".into()));
        }
        Ok(LensSpec { x1: x1.to_vec(), x2: x2.to_vec(), rho, forbidden_radius: (1.0 - 3f64.sqrt() / 2.0) * rho })
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.x1.iter().zip(&self.x2).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Closed lens membership.
    pub fn contains(&self, y: &[f64]) -> bool {
        let r2 = self.rho * self.rho;
        dist2(y, &self.x1) <= r2 && dist2(y, &self.x2) <= r2
    }
}

pub fn in_forbidden_region(y: &[f64], lens: &LensSpec) -> bool {
    dist(y, &lens.midpoint()) <= lens.forbidden_radius
}

/// Volume of the unit ball in R^d.
pub fn ball_volume(d: usize) -> f64 {
    // Gamma(d/2 + 1) by the half-integer recursion.
    let mut g = if d.is_multiple_of(2) { 1.0 } else { PI.sqrt() / 2.0 };
    let mut x = if d.is_multiple_of(2) { 1.0 } else { 1.5 };
    let top = d as f64 / 2.0 + 1.0;
    while x < top - 0.25 {
        g *= x;
        x += 1.0;
    }
    PI.powf(d as f64 / 2.0) / g
}

/// Surface area of the unit sphere S^{d-1} in R^d.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * ball_volume(d)
}

/// Volume of `B_1(0) ∩ B_1(e_1)` in R^d.
pub fn lens_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 1.0,
        2 => 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0,
        3 => 5.0 * PI / 12.0,
        _ => {
            // Two caps of height 1/2, integrated slice by slice.
            let w = ball_volume(d - 1);
            let half = (d - 1) as f64 / 2.0;
            let cap = quad::integrate(|t| w * (1.0 - t * t).max(0.0).powf(half), 0.5, 1.0, 1e-8)
                .expect("cap integral is smooth");
            2.0 * cap
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tri(s: f64) -> [[f64; 2]; 3] {
        [[0.0, 0.0], [s, 0.0], [s / 2.0, s * 3f64.sqrt() / 2.0]]
    }

    fn refs<const D: usize>(p: &[[f64; D]]) -> Vec<&[f64]> {
        p.iter().map(|x| x.as_slice()).collect()
    }

    #[test]
    fn equilateral_circumsphere() {
        let t = tri(2.0);
        let cs = circumsphere(&refs(&t)).unwrap();
        assert_relative_eq!(cs.sphere.radius, 2.0 / 3f64.sqrt(), epsilon = 1e-12);
        let centroid = [1.0, 3f64.sqrt() / 3.0];
        assert!(dist(&cs.sphere.center, &centroid) < 1e-12);
        assert!(cs.center_in_open_simplex());
    }

    #[test]
    fn equilateral_radius_matches_linear_solve() {
        // Independent route: solve the 2x2 perpendicular-bisector system.
        let t = tri(1.0);
        let (a, b, c) = (t[0], t[1], t[2]);
        let m = [[2.0 * (b[0] - a[0]), 2.0 * (b[1] - a[1])], [2.0 * (c[0] - a[0]), 2.0 * (c[1] - a[1])]];
        let r = [
            b[0] * b[0] + b[1] * b[1] - a[0] * a[0] - a[1] * a[1],
            c[0] * c[0] + c[1] * c[1] - a[0] * a[0] - a[1] * a[1],
        ];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let x = (r[0] * m[1][1] - r[1] * m[0][1]) / det;
        let y = (m[0][0] * r[1] - m[1][0] * r[0]) / det;
        let cs = circumsphere(&refs(&t)).unwrap();
        assert_relative_eq!(cs.sphere.center[0], x, epsilon = 1e-12);
        assert_relative_eq!(cs.sphere.center[1], y, epsilon = 1e-12);
        assert_relative_eq!(cs.sphere.radius, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn two_point_sphere_is_midpoint() {
        let p = [[1.0, 2.0, 3.0], [3.0, 2.0, -1.0]];
        let cs = circumsphere(&refs(&p)).unwrap();
        assert_eq!(cs.sphere.center, vec![2.0, 2.0, 1.0]);
        assert_relative_eq!(cs.sphere.radius, 20f64.sqrt() / 2.0);
    }

    #[test]
    fn collinear_is_degenerate() {
        let p = [[0.0, 0.0], [1.0, 1.0], [3.0, 3.0]];
        assert_eq!(circumsphere(&refs(&p)).unwrap_err(), Error::Degenerate);
        let q = [[0.0, 0.0], [1.0, 0.0], [2.0, 1e-12]];
        assert_eq!(circumsphere(&refs(&q)).unwrap_err(), Error::Degenerate);
    }

    #[test]
    fn meb_equilateral_and_grid_search() {
        let t = tri(1.0);
        let b = min_enclosing_ball(&refs(&t));
        assert_relative_eq!(b.radius, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        // Grid search over candidate centers: no center does better.
        let mut best = f64::INFINITY;
        let steps = 400;
        for i in 0..=steps {
            for j in 0..=steps {
                let c = [i as f64 / steps as f64, j as f64 / steps as f64];
                let r = t.iter().map(|p| dist(p, &c)).fold(0.0, f64::max);
                best = best.min(r);
            }
        }
        assert!(best >= b.radius - 1e-12);
        assert!(best - b.radius < 5e-3);
    }

    #[test]
    fn meb_obtuse_uses_longest_edge() {
        let p = [[0.0, 0.0], [4.0, 0.0], [0.5, 1.0]];
        let b = min_enclosing_ball(&refs(&p));
        // Brute force over the three edge balls and the circumball.
        let mut cands = vec![];
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let c: Vec<f64> = (0..2).map(|a| 0.5 * (p[i][a] + p[j][a])).collect();
            let r = dist(&p[i], &p[j]) / 2.0;
            if p.iter().all(|q| dist(q, &c) <= r + 1e-12) {
                cands.push(r);
            }
        }
        cands.push(circumsphere(&refs(&p)).unwrap().sphere.radius);
        let want = cands.into_iter().fold(f64::INFINITY, f64::min);
        assert_relative_eq!(b.radius, want, epsilon = 1e-12);
        assert_relative_eq!(b.radius, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn meb_single_point() {
        let p = [[0.3, 0.7]];
        assert_eq!(min_enclosing_ball(&refs(&p)).radius, 0.0);
    }

    #[test]
    fn open_simplex_membership() {
        let obtuse = [[0.0, 0.0], [4.0, 0.0], [0.5, 1.0]];
        let cs = circumsphere(&refs(&obtuse)).unwrap();
        // Circumcenter: x = 2 by symmetry, then 4 + y^2 = 1.5^2 + (y - 1)^2.
        assert_relative_eq!(cs.sphere.center[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(cs.sphere.center[1], -0.375, epsilon = 1e-12);
        let bary = cs.barycentric();
        // (2, -0.375) = l0 a + l1 b + l2 c: l2 = -0.375, l1 = (2 - 0.5 l2) / 4.
        let l2 = -0.375;
        let l1 = (2.0 - 0.5 * l2) / 4.0;
        assert_relative_eq!(bary[2], l2, epsilon = 1e-12);
        assert_relative_eq!(bary[1], l1, epsilon = 1e-12);
        assert!(!cs.center_in_open_simplex());

        let acute = [[0.0, 0.0], [2.0, 0.0], [0.8, 1.5]];
        assert!(center_in_open_simplex(&refs(&acute)).unwrap());
    }

    #[test]
    fn forbidden_region() {
        let lens = LensSpec::new(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_relative_eq!(lens.forbidden_radius / lens.rho, 1.0 - 3f64.sqrt() / 2.0);
        assert!(in_forbidden_region(&[0.5, 0.0], &lens));
        assert!(!in_forbidden_region(&[0.5, 0.2], &lens));
        assert!(!in_forbidden_region(&[0.0, 0.0], &lens));
        assert!((FORBIDDEN_RATIO - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-16);
    }

    #[test]
    fn volumes_closed_form() {
        assert_relative_eq!(ball_volume(1), 2.0, epsilon = 1e-14);
        assert_relative_eq!(ball_volume(2), PI, epsilon = 1e-14);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(lens_volume(2), 1.228_369_698_608_757, epsilon = 1e-12);
        assert_relative_eq!(lens_volume(3), 1.308_996_938_995_747, epsilon = 1e-12);
    }

    #[test]
    fn lens_volume_quadrature_matches_closed_forms() {
        // The d >= 4 quadrature route, evaluated at d = 2, 3.
        for d in [2usize, 3] {
            let w = ball_volume(d - 1);
            let half = (d - 1) as f64 / 2.0;
            let cap = quad::integrate(|t| w * (1.0 - t * t).powf(half), 0.5, 1.0, 1e-10).unwrap();
            assert_relative_eq!(2.0 * cap, lens_volume(d), epsilon = 1e-8);
        }
    }
}
