//! Critical faces: the geometric Čech criterion, the link-Betti formula for
//! Rips edges, counting curves `F_k(λ)` with their sign split, and the
//! alternating-sum identity for `Π_k(ℝ)`.

use std::io::Write;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::complex::{self, link_from_vertices, Flavor, LinkComplex, Simplex};
use crate::density::PointCloud;
use crate::error::{Error, Result};
use crate::geometry::{circumsphere, LensSpec};
use crate::grid::{upper_neighbors, Grid, Metric};
use crate::persistence::{reduce_with, Algorithm, Diagrams, PairingTable, Sign};

/// Relative slack for the open-ball emptiness test.
pub const EMPTY_BALL_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalFace {
    /// A critical `k`-simplex (Čech) or the edge carrying the count (Rips).
    pub simplex: Simplex,
    pub radius: f64,
    /// 1 for Čech faces; `F_k(e)` for Rips edges.
    pub multiplicity: usize,
    /// Sign split `(F^+, F^-)`, when computed.
    pub split: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalFaceReport {
    pub flavor: Flavor,
    pub k: usize,
    pub d: usize,
    pub r_max: f64,
    pub faces: Vec<CriticalFace>,
    /// Affinely dependent candidates skipped (Čech only).
    pub degenerate: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub lambda: f64,
    pub f: usize,
    pub plus: Option<usize>,
    pub minus: Option<usize>,
}

impl CriticalFaceReport {
    /// Total count with multiplicity.
    pub fn total(&self) -> usize {
        self.faces.iter().map(|f| f.multiplicity).sum()
    }

    pub fn has_split(&self) -> bool {
        self.faces.iter().all(|f| f.split.is_some())
    }

    /// Cumulative counts of faces with `nu * radius^d <= lambda`.
    pub fn curve(&self, lambdas: &[f64], nu: f64) -> Vec<CurvePoint> {
        let split = self.has_split();
        lambdas
            .iter()
            .map(|&lambda| {
                let mut p = CurvePoint { lambda, f: 0, plus: split.then_some(0), minus: split.then_some(0) };
                for face in &self.faces {
                    if nu * face.radius.powi(self.d as i32) <= lambda {
                        p.f += face.multiplicity;
                        if let (Some((a, b)), Some(pp), Some(mm)) = (face.split, p.plus.as_mut(), p.minus.as_mut()) {
                            *pp += a;
                            *mm += b;
                        }
                    }
                }
                p
            })
            .collect()
    }
}

/// CSV `lambda,F_k,F_k_plus,F_k_minus`; split columns are empty when absent.
pub fn write_curve_csv<W: Write>(curve: &[CurvePoint], mut w: W) -> Result<()> {
    writeln!(w, "lambda,F_k,F_k_plus,F_k_minus")?;
    let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    for p in curve {
        writeln!(w, "{},{},{},{}", p.lambda, p.f, opt(p.plus), opt(p.minus))?;
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > complex::MAX_SUPPORTED_DIM - 1 {
        return Err(Error::InvalidParameter(format!("k must be in 1..={}", complex::MAX_SUPPORTED_DIM - 1)));
    }
    Ok(())
}

/// Enumerates the `size`-cliques of an upper adjacency list.
fn cliques(adj: &[Vec<u32>], size: usize, mut f: impl FnMut(&[u32])) {
    fn rec(adj: &[Vec<u32>], size: usize, clique: &mut Vec<u32>, cand: &[u32], f: &mut dyn FnMut(&[u32])) {
        if clique.len() == size {
            f(clique);
            return;
        }
        for (pos, &v) in cand.iter().enumerate() {
            let next: Vec<u32> = if clique.len() + 1 < size {
                let rest = &cand[pos + 1..];
                let nb = &adj[v as usize];
                rest.iter().copied().filter(|x| nb.binary_search(x).is_ok()).collect()
            } else {
                Vec::new()
            };
            clique.push(v);
            rec(adj, size, clique, &next, f);
            clique.pop();
        }
    }
    let mut clique = Vec::with_capacity(size);
    for i in 0..adj.len() {
        clique.push(i as u32);
        rec(adj, size, &mut clique, &adj[i], &mut f);
        clique.pop();
    }
}

/// Critical `k`-faces of the Čech filtration with radius at most `r_max`:
/// `(k+1)`-subsets whose circumcenter lies in their open simplex and whose
/// open circumball holds no other point.
pub fn cech_critical_faces(cloud: &PointCloud, k: usize, r_max: f64) -> Result<CriticalFaceReport> {
    check_k(k)?;
    if k > cloud.d {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds d = {}", cloud.d)));
    }
    let adj = upper_neighbors(cloud, 2.0 * r_max, Metric::Euclidean);
    let grid = Grid::new(cloud, r_max.max(f64::MIN_POSITIVE), Metric::Euclidean);
    let mut faces = Vec::new();
    let mut degenerate = 0;
    cliques(&adj, k + 1, |y| {
        let pts: SmallVec<[&[f64]; 5]> = y.iter().map(|&i| cloud.point(i as usize)).collect();
        let cs = match circumsphere(&pts) {
            Ok(cs) => cs,
            Err(_) => {
                degenerate += 1;
                return;
            }
        };
        let rho = cs.sphere.radius;
        if rho > r_max || !cs.center_in_open_simplex() {
            return;
        }
        let lim = rho * (1.0 - EMPTY_BALL_REL_TOL);
        let lim2 = lim * lim;
        let mut empty = true;
        grid.for_each_within(&cs.sphere.center, rho, |j, d2| {
            if d2 < lim2 && !y.contains(&(j as u32)) {
                empty = false;
            }
        });
        if empty {
            faces.push(CriticalFace { simplex: Simplex::from_sorted(y), radius: rho, multiplicity: 1, split: None });
        }
    });
    faces.sort_by(|a, b| a.radius.total_cmp(&b.radius).then_with(|| a.simplex.cmp(&b.simplex)));
    Ok(CriticalFaceReport { flavor: Flavor::Cech, k, d: cloud.d, r_max, faces, degenerate })
}

/// Rank over the two-element field of a matrix given by sparse columns.
pub fn rank_z2(columns: Vec<Vec<u32>>) -> usize {
    let mut owner: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    for mut col in columns {
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match owner.get(&low) {
                None => {
                    owner.insert(low, col);
                    break;
                }
                Some(o) => {
                    let mut out = Vec::with_capacity(col.len() + o.len());
                    let (mut i, mut j) = (0, 0);
                    while i < col.len() && j < o.len() {
                        match col[i].cmp(&o[j]) {
                            std::cmp::Ordering::Less => {
                                out.push(col[i]);
                                i += 1
                            }
                            std::cmp::Ordering::Greater => {
                                out.push(o[j]);
                                j += 1
                            }
                            std::cmp::Ordering::Equal => {
                                i += 1;
                                j += 1
                            }
                        }
                    }
                    out.extend_from_slice(&col[i..]);
                    out.extend_from_slice(&o[j..]);
                    col = out;
                }
            }
        }
    }
    owner.len()
}

/// Reduced Betti numbers `β̃_q` of a simplicial complex for `q = -1..=top`,
/// returned with index `q + 1`. The complex must contain simplices up to
/// dimension `top + 1` for the last entry to be exact.
pub fn reduced_betti(link: &LinkComplex, top: usize) -> Vec<usize> {
    let mut by_dim: Vec<Vec<&Simplex>> = vec![Vec::new(); top + 3];
    for s in &link.simplices {
        if s.dim() <= top + 1 {
            by_dim[s.dim()].push(s);
        }
    }
    let index: Vec<FxHashMap<&[u32], u32>> =
        by_dim.iter().map(|v| v.iter().enumerate().map(|(i, s)| (s.vertices(), i as u32)).collect()).collect();
    // rank of the boundary from dimension q to q-1; q = 0 is the augmentation.
    let rank = |q: usize| -> usize {
        if q == 0 {
            return usize::from(!by_dim[0].is_empty());
        }
        let cols = by_dim[q].iter().map(|s| s.facets().map(|f| index[q - 1][f.vertices()]).collect()).collect();
        rank_z2(cols)
    };
    let ranks: Vec<usize> = (0..=top + 1).map(rank).collect();
    let mut out = Vec::with_capacity(top + 2);
    // q = -1: one empty simplex, killed by any vertex.
    out.push(1 - ranks[0]);
    for q in 0..=top {
        out.push(by_dim[q].len() - ranks[q] - ranks[q + 1]);
    }
    out
}

/// Points other than the endpoints in the closed lens of edge `(a, b)`.
fn lens_points(cloud: &PointCloud, grid: &Grid, a: usize, b: usize, metric: Metric) -> (Vec<u32>, f64) {
    let (p, q) = (cloud.point(a), cloud.point(b));
    let rho2 = metric.dist2(p, q);
    let mut v = Vec::new();
    grid.for_each_within(p, rho2.sqrt(), |y, d2| {
        if y != a && y != b && d2 <= rho2 && metric.dist2(cloud.point(y), q) <= rho2 {
            v.push(y as u32);
        }
    });
    v.sort_unstable();
    (v, rho2)
}

/// `F_k(e)`: 1 if the link is empty when `k = 1`, else `β̃_{k-2}` of the link.
pub fn multiplicity_from_link(link: &LinkComplex, k: usize) -> usize {
    if k == 1 {
        return usize::from(link.is_empty());
    }
    reduced_betti(link, k - 2)[k - 1]
}

/// `F_k(e)` for the edge `(a, b)` at its own length.
pub fn rips_edge_multiplicity(cloud: &PointCloud, a: usize, b: usize, k: usize, metric: Metric) -> Result<usize> {
    check_k(k)?;
    let rho = metric.dist2(cloud.point(a), cloud.point(b)).sqrt();
    let grid = Grid::new(cloud, rho.max(f64::MIN_POSITIVE), metric);
    let (lens, rho2) = lens_points(cloud, &grid, a, b, metric);
    let link = link_from_vertices(cloud, &lens, rho2, k.saturating_sub(1), metric);
    Ok(multiplicity_from_link(&link, k))
}

/// Every edge of length at most `r_max` with its link multiplicity.
pub fn rips_critical_edges(cloud: &PointCloud, k: usize, r_max: f64, metric: Metric) -> Result<CriticalFaceReport> {
    check_k(k)?;
    let adj = upper_neighbors(cloud, r_max, metric);
    let grid = Grid::new(cloud, r_max.max(f64::MIN_POSITIVE), metric);
    let mut faces = Vec::new();
    for (a, nb) in adj.iter().enumerate() {
        for &b in nb {
            let (lens, rho2) = lens_points(cloud, &grid, a, b as usize, metric);
            let m = if k == 1 {
                usize::from(lens.is_empty())
            } else {
                let link = link_from_vertices(cloud, &lens, rho2, k - 1, metric);
                multiplicity_from_link(&link, k)
            };
            if m > 0 {
                faces.push(CriticalFace {
                    simplex: Simplex::from_sorted(&[a as u32, b]),
                    radius: rho2.sqrt(),
                    multiplicity: m,
                    split: None,
                });
            }
        }
    }
    faces.sort_by(|a, b| a.radius.total_cmp(&b.radius).then_with(|| a.simplex.cmp(&b.simplex)));
    Ok(CriticalFaceReport { flavor: Flavor::Rips, k, d: cloud.d, r_max, faces, degenerate: 0 })
}

/// Number of edges with no other point in their closed lens, at length at
/// most `r_max`: the `k = 1` Rips count.
pub fn isolated_edge_count(cloud: &PointCloud, r_max: f64, metric: Metric) -> usize {
    let adj = upper_neighbors(cloud, r_max, metric);
    let grid = Grid::new(cloud, r_max.max(f64::MIN_POSITIVE), metric);
    let mut count = 0;
    for (a, nb) in adj.iter().enumerate() {
        for &b in nb {
            let (p, q) = (cloud.point(a), cloud.point(b as usize));
            let rho2 = metric.dist2(p, q);
            let mut empty = true;
            grid.for_each_within(p, rho2.sqrt(), |y, d2| {
                if empty && y != a && y != b as usize && d2 <= rho2 && metric.dist2(cloud.point(y), q) <= rho2 {
                    empty = false;
                }
            });
            count += usize::from(empty);
        }
    }
    count
}

/// Critical faces of either flavor in the Euclidean metric.
pub fn critical_faces(cloud: &PointCloud, flavor: Flavor, k: usize, r_max: f64) -> Result<CriticalFaceReport> {
    match flavor {
        Flavor::Cech => cech_critical_faces(cloud, k, r_max),
        Flavor::Rips => rips_critical_edges(cloud, k, r_max, Metric::Euclidean),
    }
}

/// Counting curve `F_k(λ)` on an increasing grid, faces cut at
/// `r_max = (max λ / ν)^{1/d}`.
pub fn fk_curve(
    cloud: &PointCloud,
    flavor: Flavor,
    k: usize,
    lambdas: &[f64],
    nu: f64,
) -> Result<(CriticalFaceReport, Vec<CurvePoint>)> {
    if lambdas.windows(2).any(|w| w[0] >= w[1]) || lambdas.is_empty() {
        return Err(Error::InvalidParameter("lambda grid must be nonempty and increasing".into()));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter("intensity must be positive".into()));
    }
    let r_max = (lambdas[lambdas.len() - 1] / nu).powf(1.0 / cloud.d as f64);
    let rep = critical_faces(cloud, flavor, k, r_max)?;
    let curve = rep.curve(lambdas, nu);
    Ok((rep, curve))
}

/// Per-edge homology changes of a Rips filtration: for each edge, the
/// births in `dgm_k` and deaths in `dgm_{k-1}` among the simplices entering
/// at the edge's value. Keyed by edge; assumes distinct edge lengths.
pub fn rips_block_changes(
    fc: &complex::FilteredComplex,
    pairing: &PairingTable,
    k: usize,
) -> Vec<(Simplex, f64, usize, usize)> {
    let mut out = Vec::new();
    let n = fc.len();
    let mut i = 0;
    while i < n {
        if fc.dim(i) != 1 {
            i += 1;
            continue;
        }
        let rho = fc.value(i);
        let mut j = i;
        let (mut plus, mut minus) = (0, 0);
        while j < n && fc.value(j) == rho && !(j > i && fc.dim(j) == 1) {
            if fc.dim(j) == k {
                match pairing.sign(j) {
                    Sign::Positive => {
                        if pairing.killer(j).is_none_or(|d| fc.value(d) > rho) {
                            plus += 1;
                        }
                    }
                    Sign::Negative => {
                        if pairing.partner(j).is_some_and(|b| fc.value(b) < rho) {
                            minus += 1;
                        }
                    }
                }
            }
            j += 1;
        }
        out.push((Simplex::from_sorted(fc.simplex(i)), rho, plus, minus));
        i = j;
    }
    out
}

/// Fills in the `(F^+, F^-)` split from a reduction of the filtration at
/// `r_max` with dimension cap `k + 1`.
pub fn sign_split(cloud: &PointCloud, report: &mut CriticalFaceReport) -> Result<()> {
    let k = report.k;
    let fc = complex::build(cloud, report.flavor, report.r_max, k + 1)?;
    let red = reduce_with(&fc, Algorithm::Cohomology);
    match report.flavor {
        Flavor::Cech => {
            let index = fc.index_map();
            for face in &mut report.faces {
                let i = *index
                    .get(&complex::pack(face.simplex.vertices()))
                    .ok_or_else(|| Error::InvalidFiltration(format!("critical face {} missing", face.simplex)))?
                    as usize;
                face.split = Some(match red.pairing.sign(i) {
                    Sign::Positive => (1, 0),
                    Sign::Negative => (0, 1),
                });
            }
        }
        Flavor::Rips => {
            let blocks: FxHashMap<Simplex, (usize, usize)> =
                rips_block_changes(&fc, &red.pairing, k).into_iter().map(|(e, _, p, m)| (e, (p, m))).collect();
            for face in &mut report.faces {
                face.split = blocks.get(&face.simplex).copied();
            }
        }
    }
    Ok(())
}

/// Homology changes in degrees `k` (births) and `k - 1` (deaths) up to `r`,
/// counted from diagrams with the `b < d` convention.
pub fn homology_change_count(diagrams: &Diagrams, k: usize, r: f64) -> usize {
    let births = diagrams.dim(k).iter().filter(|p| p.birth <= r).count();
    let deaths = diagrams.dim(k - 1).iter().filter(|p| p.death <= r).count();
    births + deaths
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerReport {
    pub k: usize,
    /// Finite pairs in `dgm_k` of the full filtration.
    pub pi_total: usize,
    /// `F_0, ..., F_k` with `F_0 = |X| - 1`.
    pub f: Vec<usize>,
    pub alternating: i64,
    pub pass: bool,
}

/// Compares `Π_k(ℝ)` of the full filtration with `Σ_j (-1)^{k-j} F_j`.
pub fn euler_identity_check(cloud: &PointCloud, flavor: Flavor, k: usize) -> Result<EulerReport> {
    check_k(k)?;
    let n = cloud.len();
    // A radius past every filtration value.
    let mut diam2: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            diam2 = diam2.max(crate::geometry::dist2(cloud.point(i), cloud.point(j)));
        }
    }
    let r_all = 2.0 * diam2.sqrt() + 1.0;
    let fc = complex::build(cloud, flavor, r_all, k + 1)?;
    let red = reduce_with(&fc, Algorithm::Cohomology);
    let pi_total = red.diagrams.dim(k).iter().filter(|p| p.death.is_finite()).count();
    let mut f = vec![n.saturating_sub(1)];
    for j in 1..=k {
        f.push(critical_faces(cloud, flavor, j, r_all)?.total());
    }
    let alternating: i64 = (0..=k).map(|j| if (k - j).is_multiple_of(2) { f[j] as i64 } else { -(f[j] as i64) }).sum();
    Ok(EulerReport { k, pi_total, f, alternating, pass: alternating == pi_total as i64 })
}

/// True iff some cloud point other than the endpoints lies in the
/// forbidden ball of the edge.
pub fn forbidden_region_occupied(cloud: &PointCloud, a: usize, b: usize) -> bool {
    let Ok(lens) = LensSpec::new(cloud.point(a), cloud.point(b)) else { return false };
    (0..cloud.len()).filter(|&y| y != a && y != b).any(|y| crate::geometry::in_forbidden_region(cloud.point(y), &lens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::link_of_edge_lens;
    use crate::density::{sample_binomial, DensityModel};
    use approx::assert_relative_eq;

    fn tri() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]
    }

    #[test]
    fn cech_triangle_examples() {
        let c = PointCloud::from_points(2, &tri());
        let rep = cech_critical_faces(&c, 2, 1.0).unwrap();
        assert_eq!(rep.faces.len(), 1);
        assert_relative_eq!(rep.faces[0].radius, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        let obtuse = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![4.0, 0.0], vec![0.5, 1.0]]);
        assert_eq!(cech_critical_faces(&obtuse, 2, 10.0).unwrap().faces.len(), 0);
        let mut pts = tri();
        pts.push(vec![0.5, 0.5 / 3f64.sqrt()]);
        let c = PointCloud::from_points(2, &pts);
        assert!(cech_critical_faces(&c, 2, 1.0).unwrap().faces.iter().all(|f| f.simplex.vertices() != [0, 1, 2]));
    }

    #[test]
    fn collinear_is_tallied() {
        let c = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]);
        let rep = cech_critical_faces(&c, 2, 10.0).unwrap();
        assert_eq!(rep.degenerate, 1);
        assert!(rep.faces.is_empty());
    }

    #[test]
    fn link_multiplicities() {
        let iso = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(rips_edge_multiplicity(&iso, 0, 1, 1, Metric::Euclidean).unwrap(), 1);
        // Two lens points farther apart than the edge: link is two vertices.
        let two = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.6], vec![0.5, -0.6]]);
        assert_eq!(rips_edge_multiplicity(&two, 0, 1, 2, Metric::Euclidean).unwrap(), 1);
        assert_eq!(rips_edge_multiplicity(&two, 0, 1, 1, Metric::Euclidean).unwrap(), 0);
        // A midpoint neighbor cones off the link.
        let mut pts = two.points().map(<[f64]>::to_vec).collect::<Vec<_>>();
        pts.push(vec![0.5, 0.0]);
        let coned = PointCloud::from_points(2, &pts);
        for k in 1..=3 {
            assert_eq!(rips_edge_multiplicity(&coned, 0, 1, k, Metric::Euclidean).unwrap(), 0);
        }
    }

    #[test]
    fn reduced_betti_of_small_complexes() {
        assert_eq!(reduced_betti(&LinkComplex::default(), 1), vec![1, 0, 0]);
        // Hollow triangle.
        let s = |v: &[u32]| Simplex::new(v).unwrap();
        let circle = LinkComplex { simplices: vec![s(&[0]), s(&[1]), s(&[2]), s(&[0, 1]), s(&[1, 2]), s(&[0, 2])] };
        assert_eq!(reduced_betti(&circle, 1), vec![0, 0, 1]);
        let two_points = LinkComplex { simplices: vec![s(&[0]), s(&[5])] };
        assert_eq!(reduced_betti(&two_points, 0), vec![0, 1]);
    }

    #[test]
    fn curve_is_monotone_and_split_adds_up() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 300, 3).unwrap();
        let lambdas = [0.1, 0.5, 1.0, 2.0, 4.0];
        for flavor in [Flavor::Cech, Flavor::Rips] {
            let (mut rep, curve) = fk_curve(&c, flavor, 1, &lambdas, 300.0).unwrap();
            assert!(curve.windows(2).all(|w| w[0].f <= w[1].f));
            sign_split(&c, &mut rep).unwrap();
            for p in rep.curve(&lambdas, 300.0) {
                assert_eq!(p.plus.unwrap() + p.minus.unwrap(), p.f);
            }
        }
    }

    #[test]
    fn euler_identity_small() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 25, 8).unwrap();
        for flavor in [Flavor::Cech, Flavor::Rips] {
            for k in 1..=2 {
                let rep = euler_identity_check(&c, flavor, k).unwrap();
                assert!(rep.pass, "{flavor} k={k}: {rep:?}");
            }
        }
        let one = PointCloud::from_points(2, &[vec![0.3, 0.3]]);
        let rep = euler_identity_check(&one, Flavor::Cech, 1).unwrap();
        assert_eq!((rep.pi_total, rep.alternating), (0, 0));
    }

    #[test]
    fn lens_link_matches_complex_link() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 40, 1).unwrap();
        let grid = Grid::new(&c, 0.3, Metric::Euclidean);
        for (a, nb) in upper_neighbors(&c, 0.3, Metric::Euclidean).iter().enumerate() {
            for &b in nb {
                let (lens, rho2) = lens_points(&c, &grid, a, b as usize, Metric::Euclidean);
                let l1 = link_from_vertices(&c, &lens, rho2, 2, Metric::Euclidean);
                let l2 = link_of_edge_lens(&c, a, b as usize, 2, Metric::Euclidean);
                assert_eq!(l1, l2);
            }
        }
    }
}
