//! k-nearest-neighbor graphs, cone covers, and degree distributions.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::density::PointCloud;
use crate::error::{Error, Result};
use crate::geometry::dist2;
use crate::grid::{Grid, Metric};
use crate::par::map_indexed;
use crate::rng;

/// `cos(π/6)`: a direction belongs to a cone when its angle to the axis is at
/// most π/6, so two directions in one cone are at most π/3 apart.
pub const CONE_COS: f64 = 0.866_025_403_784_438_6;

/// Mutual-or k-NN graph: `x ~ y` when either is among the other's `k` nearest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnGraph {
    pub k_param: usize,
    pub d: usize,
    /// Sorted neighbor lists.
    pub adjacency: Vec<Vec<u32>>,
}

impl KnnGraph {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut e = Vec::new();
        for (a, nb) in self.adjacency.iter().enumerate() {
            e.extend(nb.iter().filter(|&&b| b as usize > a).map(|&b| (a as u32, b)));
        }
        e
    }
}

/// Initial query radius for `k` neighbors: the side of a box holding about
/// `2(k + 1)` points on average over the bounding box.
fn start_radius(cloud: &PointCloud, k: usize) -> f64 {
    let d = cloud.d;
    let mut vol = 1.0;
    for a in 0..d {
        let (lo, hi) = cloud.points().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[a]), h.max(p[a])));
        vol *= (hi - lo).max(1e-12);
    }
    (vol * 2.0 * (k + 1) as f64 / cloud.len().max(1) as f64).powf(1.0 / d as f64)
}

/// The `k` nearest other points of `i`, ties broken by index.
fn k_nearest(cloud: &PointCloud, grid: &Grid, i: usize, k: usize, r0: f64) -> Vec<u32> {
    let x = cloud.point(i);
    let mut r = r0;
    let mut found: Vec<(f64, u32)> = Vec::new();
    loop {
        found.clear();
        grid.for_each_within(x, r, |j, d2| {
            if j != i {
                found.push((d2, j as u32));
            }
        });
        if found.len() >= k || found.len() + 1 == cloud.len() {
            break;
        }
        r *= 2.0;
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    found.truncate(k);
    found.into_iter().map(|(_, j)| j).collect()
}

pub fn build_knn(cloud: &PointCloud, k_param: usize) -> Result<KnnGraph> {
    let n = cloud.len();
    if k_param == 0 || n <= k_param {
        return Err(Error::InvalidParameter(format!("k-NN needs 1 <= k < n (k = {k_param}, n = {n})")));
    }
    let r0 = start_radius(cloud, k_param);
    let grid = Grid::new(cloud, r0, Metric::Euclidean);
    let nearest = map_indexed(n, |i| k_nearest(cloud, &grid, i, k_param, r0));
    let mut adjacency: Vec<Vec<u32>> = nearest.clone();
    for (i, nb) in nearest.iter().enumerate() {
        for &j in nb {
            adjacency[j as usize].push(i as u32);
        }
    }
    for nb in adjacency.iter_mut() {
        nb.sort_unstable();
        nb.dedup();
    }
    Ok(KnnGraph { k_param, d: cloud.d, adjacency })
}

/// Axes of closed cones of half-angle π/6 whose union is all of `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeCover {
    pub d: usize,
    pub axes: Vec<Vec<f64>>,
    pub half_angle: f64,
}

impl ConeCover {
    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// Cones containing direction `v` (nonzero).
    pub fn cones_of(&self, v: &[f64]) -> impl Iterator<Item = usize> + '_ {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = v.to_vec();
        self.axes
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.iter().zip(&v).map(|(p, q)| p * q).sum::<f64>() >= CONE_COS * n)
            .map(|(i, _)| i)
    }

    /// `K = k N`, the degree bound.
    pub fn degree_bound(&self, k_param: usize) -> usize {
        k_param * self.axes.len()
    }
}

/// Directions sampled to verify a cover.
pub const COVER_CHECK_SAMPLES: usize = 200_000;

/// Cone cover of `R^d`. The plane uses the six axes at angles `2πj/6`;
/// higher dimensions add axes greedily from a dense random direction set
/// using a shrunken half-angle, then verify the cover at the true half-angle
/// on an independent sample.
pub fn cone_cover(d: usize) -> Result<ConeCover> {
    let half_angle = PI / 6.0;
    let axes: Vec<Vec<f64>> = match d {
        0 => return Err(Error::InvalidParameter("cone cover needs d >= 1".into())),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..6)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / 6.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            let greedy_cos = (0.8 * half_angle).cos();
            let mut r = rng::stream(0x636f_6e65, d as u64);
            let mut axes: Vec<Vec<f64>> = Vec::new();
            let candidates = 4000 * (1 << d.min(6));
            for _ in 0..candidates {
                let v = random_direction(&mut r, d);
                if !axes.iter().any(|a| dot(a, &v) >= greedy_cos) {
                    axes.push(v);
                }
            }
            axes
        }
    };
    let cover = ConeCover { d, axes, half_angle };
    if d >= 2 {
        let mut r = rng::stream(0x7665_7269, d as u64);
        for _ in 0..COVER_CHECK_SAMPLES {
            let v = random_direction(&mut r, d);
            if cover.cones_of(&v).next().is_none() {
                return Err(Error::CoverFailure(v));
            }
        }
    }
    Ok(cover)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn random_direction(r: &mut rng::Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| r.sample(StandardNormal)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `R(x; X) = 2 inf{r : every cone at x holds k + 1 points of X ∩ B_r(x)}`,
/// with the apex `x` itself not counted. Fails with `Unbounded` when some cone
/// holds at most `k` points.
pub fn locality_radius(cloud: &PointCloud, x_index: usize, cover: &ConeCover, k_param: usize) -> Result<f64> {
    let x = cloud.point(x_index);
    let mut per_cone: Vec<Vec<f64>> = vec![Vec::new(); cover.len()];
    let mut v = vec![0.0; cloud.d];
    for j in 0..cloud.len() {
        if j == x_index {
            continue;
        }
        let y = cloud.point(j);
        for a in 0..cloud.d {
            v[a] = y[a] - x[a];
        }
        if v.iter().all(|&c| c == 0.0) {
            continue;
        }
        let d2 = dist2(x, y);
        for c in cover.cones_of(&v) {
            per_cone[c].push(d2);
        }
    }
    let mut worst: f64 = 0.0;
    for (cone, mut ds) in per_cone.into_iter().enumerate() {
        if ds.len() <= k_param {
            return Err(Error::Unbounded { cone, count: ds.len() });
        }
        ds.select_nth_unstable_by(k_param, f64::total_cmp);
        worst = worst.max(ds[k_param]);
    }
    Ok(2.0 * worst.sqrt())
}

/// `deg(x; X ∩ B_R(x))`: the degree of `x` in the k-NN graph of the points
/// within `radius` of it (closed ball).
pub fn local_degree(cloud: &PointCloud, x_index: usize, k_param: usize, radius: f64) -> Result<usize> {
    let x = cloud.point(x_index);
    let r2 = radius * radius;
    let keep: Vec<usize> = (0..cloud.len()).filter(|&j| dist2(x, cloud.point(j)) <= r2).collect();
    let sub = cloud.subset(&keep);
    let pos = keep.binary_search(&x_index).expect("x is in its own ball");
    Ok(build_knn(&sub, k_param)?.degree(pos))
}

/// Vertex counts by degree for `ℓ = k_param..=max_ell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    pub k_param: usize,
    pub n: usize,
    /// `counts[i]` is the number of vertices of degree `k_param + i`.
    pub counts: Vec<usize>,
}

impl DegreeDistribution {
    pub fn fractions(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.n as f64).collect()
    }

    pub fn fraction(&self, ell: usize) -> f64 {
        ell.checked_sub(self.k_param).and_then(|i| self.counts.get(i)).map_or(0.0, |&c| c as f64 / self.n as f64)
    }

    /// `ell,count,fraction` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "ell,count,fraction")?;
        for (i, &c) in self.counts.iter().enumerate() {
            writeln!(w, "{},{},{}", self.k_param + i, c, c as f64 / self.n as f64)?;
        }
        Ok(())
    }
}

/// Degree histogram over `ℓ = k_param..=max_ell`; degrees outside the range
/// are an error since they would break `Σ p̂_ℓ = 1`.
pub fn degree_distribution(g: &KnnGraph, max_ell: usize) -> Result<DegreeDistribution> {
    let k = g.k_param;
    if max_ell < k {
        return Err(Error::InvalidParameter(format!("max_ell {max_ell} < k {k}")));
    }
    let mut counts = vec![0; max_ell - k + 1];
    for i in 0..g.len() {
        let deg = g.degree(i);
        if deg < k || deg > max_ell {
            return Err(Error::InvalidParameter(format!("vertex {i} has degree {deg} outside [{k}, {max_ell}]")));
        }
        counts[deg - k] += 1;
    }
    Ok(DegreeDistribution { k_param: k, n: g.len(), counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{sample_binomial, DensityModel};

    #[test]
    fn collinear_path() {
        let c = PointCloud::from_points(1, &[vec![0.0], vec![1.0], vec![2.0]]);
        let g = build_knn(&c, 1).unwrap();
        assert_eq!(g.adjacency, vec![vec![1], vec![0, 2], vec![1]]);
        let p = degree_distribution(&g, 2).unwrap();
        assert_eq!(p.fractions(), vec![2.0 / 3.0, 1.0 / 3.0]);
        let mut csv = Vec::new();
        p.write_csv(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "ell,count,fraction\n1,2,0.6666666666666666\n2,1,0.3333333333333333\n"
        );
    }

    #[test]
    fn two_points_one_edge() {
        let c = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.5]]);
        assert_eq!(build_knn(&c, 1).unwrap().edges(), vec![(0, 1)]);
        assert!(build_knn(&c, 2).is_err());
    }

    #[test]
    fn matches_brute_force() {
        let c = sample_binomial(&DensityModel::standard_gaussian(2), 300, 4).unwrap();
        let g = build_knn(&c, 3).unwrap();
        let mut adj = vec![Vec::new(); c.len()];
        for i in 0..c.len() {
            let mut o: Vec<(f64, usize)> =
                (0..c.len()).filter(|&j| j != i).map(|j| (dist2(c.point(i), c.point(j)), j)).collect();
            o.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, j) in &o[..3] {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
        for v in adj.iter_mut() {
            v.sort_unstable();
            v.dedup();
        }
        assert_eq!(g.adjacency, adj);
    }

    #[test]
    fn planar_cover_has_six_cones() {
        let c = cone_cover(2).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.degree_bound(2), 12);
    }

    #[test]
    fn spatial_cover_verifies() {
        let c = cone_cover(3).unwrap();
        assert!(c.len() >= 14, "{}", c.len());
    }

    #[test]
    fn degree_bounds_and_locality() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 800, 11).unwrap();
        let cover = cone_cover(2).unwrap();
        let k = 2;
        let g = build_knn(&c, k).unwrap();
        let mut certified = 0;
        for i in 0..c.len() {
            assert!((k..=cover.degree_bound(k)).contains(&g.degree(i)));
            if let Ok(r) = locality_radius(&c, i, &cover, k) {
                certified += 1;
                if i % 8 == 0 {
                    assert_eq!(local_degree(&c, i, k, r).unwrap(), g.degree(i), "vertex {i}");
                }
            }
        }
        assert!(certified > 500, "{certified}");
    }

    #[test]
    fn invariant_under_similarity() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 400, 2).unwrap();
        let g = build_knn(&c, 2).unwrap();
        let moved = c.scaled(0.37).translated(&[17.0, -3.0]);
        assert_eq!(build_knn(&moved, 2).unwrap(), g);
    }
}
