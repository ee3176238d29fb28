//! Persistence over the two-element field: boundary reduction, diagrams,
//! π-value measures, and the one-simplex insertion checks.

use std::io::Write;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::complex::{FilteredComplex, Simplex};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

/// Which algorithm produced a pairing; both yield the same pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Column reduction of the boundary matrix with clearing.
    #[default]
    Homology,
    /// Reduction of the coboundary matrix with clearing, much faster on
    /// dense complexes with many positive top-dimensional simplices.
    Cohomology,
}

/// The birth/death matching of simplices, indexed by position in the total
/// order. The first vertex is negative: it kills the empty simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingTable {
    partner: Vec<u32>,
    negative: Vec<bool>,
}

impl PairingTable {
    fn new(n: usize) -> Self {
        PairingTable { partner: vec![NONE; n], negative: vec![false; n] }
    }

    fn pair(&mut self, birth: usize, death: usize) {
        self.partner[birth] = death as u32;
        self.partner[death] = birth as u32;
        self.negative[death] = true;
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    pub fn sign(&self, i: usize) -> Sign {
        if self.negative[i] {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    /// The simplex paired with `i`, if any.
    pub fn partner(&self, i: usize) -> Option<usize> {
        let p = self.partner[i];
        (p != NONE).then_some(p as usize)
    }

    /// `φ`: the negative simplex killing the class born at positive `i`.
    pub fn killer(&self, i: usize) -> Option<usize> {
        if self.negative[i] {
            None
        } else {
            self.partner(i)
        }
    }

    /// All `(birth, death)` index pairs, ordered by birth.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).filter_map(move |i| self.killer(i).map(|d| (i, d)))
    }

    /// Positive simplices never killed.
    pub fn essential(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| !self.negative[i] && self.partner[i] == NONE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for classes that never die.
    pub death: f64,
    pub birth_simplex: Simplex,
    pub death_simplex: Option<Simplex>,
}

impl PersistencePair {
    /// `death / birth`; infinite for essential classes.
    pub fn pi(&self) -> f64 {
        self.death / self.birth
    }
}

/// Diagrams in degrees `0..max_dim`; the top dimension of a truncated
/// complex has no killers and is omitted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagrams {
    pub per_dim: Vec<Vec<PersistencePair>>,
}

impl Diagrams {
    pub fn dim(&self, k: usize) -> &[PersistencePair] {
        self.per_dim.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = &PersistencePair> {
        self.per_dim.iter().flatten()
    }

    /// CSV `dim,birth,death` with `inf` for infinite deaths.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "dim,birth,death")?;
        for p in self.iter() {
            if p.death.is_finite() {
                writeln!(w, "{},{},{}", p.dim, p.birth, p.death)?;
            } else {
                writeln!(w, "{},{},inf", p.dim, p.birth)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub diagrams: Diagrams,
    pub pairing: PairingTable,
}

/// Symmetric difference of two ascending lists into `out`.
fn xor_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

fn first_vertex(fc: &FilteredComplex) -> Option<usize> {
    (0..fc.len()).find(|&i| fc.dim(i) == 0)
}

pub fn reduce(fc: &FilteredComplex) -> Reduction {
    reduce_with(fc, Algorithm::Homology)
}

pub fn reduce_with(fc: &FilteredComplex, algo: Algorithm) -> Reduction {
    let pairing = match algo {
        Algorithm::Homology => pair_homology(fc),
        Algorithm::Cohomology => pair_cohomology(fc),
    };
    let diagrams = diagrams_from_pairing(fc, &pairing);
    Reduction { diagrams, pairing }
}

/// Standard column algorithm, dimensions descending, with clearing.
fn pair_homology(fc: &FilteredComplex) -> PairingTable {
    let n = fc.len();
    let bd = fc.boundary();
    let mut table = PairingTable::new(n);
    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); fc.max_dim() + 1];
    for i in 0..n {
        by_dim[fc.dim(i)].push(i as u32);
    }
    // owner[row] = column whose reduced pivot is `row`.
    let mut owner: Vec<u32> = vec![NONE; n];
    let mut reduced: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    let mut cleared = vec![false; n];
    let mut col = Vec::new();
    let mut tmp = Vec::new();
    for p in (1..=fc.max_dim()).rev() {
        for &j in &by_dim[p] {
            if cleared[j as usize] {
                continue;
            }
            col.clear();
            col.extend_from_slice(bd.column(j as usize));
            while let Some(&low) = col.last() {
                let o = owner[low as usize];
                if o == NONE {
                    break;
                }
                xor_into(&col, &reduced[&o], &mut tmp);
                std::mem::swap(&mut col, &mut tmp);
            }
            if let Some(&low) = col.last() {
                owner[low as usize] = j;
                cleared[low as usize] = true;
                table.pair(low as usize, j as usize);
                reduced.insert(j, col.clone());
            }
        }
        // Columns of dimension p are never added to columns of dimension p-1.
        reduced.clear();
    }
    if let Some(v0) = first_vertex(fc) {
        table.negative[v0] = true;
    }
    table
}

/// Coboundary reduction, dimensions ascending, with clearing. Columns run
/// from youngest to oldest and pivots are the oldest entries.
fn pair_cohomology(fc: &FilteredComplex) -> PairingTable {
    let n = fc.len();
    let cob = fc.boundary().transpose();
    let mut table = PairingTable::new(n);
    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); fc.max_dim() + 1];
    for i in (0..n).rev() {
        by_dim[fc.dim(i)].push(i as u32);
    }
    if let Some(v0) = first_vertex(fc) {
        table.negative[v0] = true;
    }
    let mut owner: Vec<u32> = vec![NONE; n];
    let mut reduced: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    let mut col = Vec::new();
    let mut tmp = Vec::new();
    for p in 0..fc.max_dim() {
        for &j in &by_dim[p] {
            if table.negative[j as usize] {
                continue;
            }
            col.clear();
            col.extend_from_slice(cob.column(j as usize));
            while let Some(&piv) = col.first() {
                let o = owner[piv as usize];
                if o == NONE {
                    break;
                }
                xor_into(&col, &reduced[&o], &mut tmp);
                std::mem::swap(&mut col, &mut tmp);
            }
            if let Some(&piv) = col.first() {
                owner[piv as usize] = j;
                table.pair(j as usize, piv as usize);
                // Apparent pairs need no stored column: nothing can be added
                // to reach them except through their own pivot.
                reduced.insert(j, col.clone());
            }
        }
        reduced.clear();
    }
    table
}

/// Assembles diagrams, discarding pairs with equal birth and death values.
pub fn diagrams_from_pairing(fc: &FilteredComplex, pairing: &PairingTable) -> Diagrams {
    let top = fc.max_dim();
    let mut per_dim: Vec<Vec<PersistencePair>> = vec![Vec::new(); top];
    for i in 0..fc.len() {
        let dim = fc.dim(i);
        if dim >= top || pairing.sign(i) == Sign::Negative {
            continue;
        }
        let birth = fc.value(i);
        let (death, death_simplex) = match pairing.killer(i) {
            Some(d) => (fc.value(d), Some(Simplex::from_sorted(fc.simplex(d)))),
            None => (f64::INFINITY, None),
        };
        if birth < death {
            per_dim[dim].push(PersistencePair {
                dim,
                birth,
                death,
                birth_simplex: Simplex::from_sorted(fc.simplex(i)),
                death_simplex,
            });
        }
    }
    Diagrams { per_dim }
}

/// Reduced Betti number in degree `p` at radius `r`, read off the pairing.
pub fn betti_at(fc: &FilteredComplex, pairing: &PairingTable, p: usize, r: f64) -> usize {
    (0..fc.len())
        .filter(|&i| fc.dim(i) == p && pairing.sign(i) == Sign::Positive && fc.value(i) <= r)
        .filter(|&i| pairing.killer(i).is_none_or(|d| fc.value(d) > r))
        .count()
}

/// The π-values of degree-`k` pairs dying by `r_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiMeasure {
    pub dim: usize,
    pub r_max: f64,
    /// Ascending.
    pub pi_values: Vec<f64>,
}

impl PiMeasure {
    pub fn total(&self) -> usize {
        self.pi_values.len()
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> Result<()> {
        if header {
            writeln!(w, "dim,pi")?;
        }
        for p in &self.pi_values {
            writeln!(w, "{},{}", self.dim, p)?;
        }
        Ok(())
    }
}

pub fn pi_measure(diagrams: &Diagrams, k: usize, r_max: f64) -> PiMeasure {
    let mut pi_values: Vec<f64> =
        diagrams.dim(k).iter().filter(|p| p.death.is_finite() && p.death <= r_max).map(PersistencePair::pi).collect();
    pi_values.sort_by(f64::total_cmp);
    PiMeasure { dim: k, r_max, pi_values }
}

/// `Π_k(α)`: the number of recorded pairs with `π >= alpha`.
pub fn pi_count_alpha(m: &PiMeasure, alpha: f64) -> usize {
    m.total() - m.pi_values.partition_point(|&p| p < alpha)
}

/// Right-continuous empirical CDF of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut sample: Vec<f64>) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        sample.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted: sample })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn sample(&self) -> &[f64] {
        &self.sorted
    }
}

pub fn empirical_cdf(m: &PiMeasure) -> Result<EmpiricalCdf> {
    if m.total() == 0 {
        return Err(Error::EmptyMeasure);
    }
    EmpiricalCdf::new(m.pi_values.clone())
}

/// Outcome of inserting one simplex and recounting `Π_k(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityProbe {
    pub delta: i64,
    pub dim_sigma: usize,
    pub pass: bool,
}

fn count_alpha(d: &Diagrams, k: usize, alpha: f64, r_max: Option<f64>) -> usize {
    match r_max {
        Some(r) => pi_count_alpha(&pi_measure(d, k, r), alpha),
        None => d.dim(k).iter().filter(|p| p.pi() >= alpha).count(),
    }
}

/// Inserts `sigma` at `value` and compares `Π_k(α)` before and after by two
/// full reductions. With `r_max = None` essential classes count (π = ∞);
/// with a cutoff only pairs dying by `r_max` count.
pub fn stability_probe(
    fc: &FilteredComplex,
    sigma: &Simplex,
    value: f64,
    alpha: f64,
    k: usize,
    r_max: Option<f64>,
) -> Result<StabilityProbe> {
    let after = fc.with_simplex(sigma, value)?;
    let before = count_alpha(&reduce(fc).diagrams, k, alpha, r_max) as i64;
    let now = count_alpha(&reduce(&after).diagrams, k, alpha, r_max) as i64;
    let delta = now - before;
    let dim_sigma = sigma.dim();
    let pass = if dim_sigma == k + 1 {
        delta.abs() <= 1
    } else if dim_sigma == k {
        if r_max.is_some() {
            delta == 0
        } else {
            delta.abs() <= 1
        }
    } else {
        delta == 0
    };
    Ok(StabilityProbe { delta, dim_sigma, pass })
}

/// One class whose killer changes when `sigma` is inserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeClass {
    pub birth_simplex: Simplex,
    pub birth: f64,
    /// Killer in the old filtration (`None` if essential there).
    pub killer_before: Option<Simplex>,
    pub death_before: f64,
    pub killer_after: Option<Simplex>,
    pub death_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    /// Ordered by decreasing birth (later in the total order first).
    pub classes: Vec<CascadeClass>,
    pub ordered_deaths: bool,
    pub sigma_kills_first: bool,
    pub shifted_matching: bool,
    /// Birth simplices whose sign differs between the two filtrations.
    pub mismatches: Vec<Simplex>,
}

impl CascadeReport {
    pub fn pass(&self) -> bool {
        self.ordered_deaths && self.sigma_kills_first && self.shifted_matching && self.mismatches.is_empty()
    }

    /// True when consecutive intervals are nested, smallest first.
    pub fn nested(&self) -> bool {
        self.classes.windows(2).all(|w| w[1].birth <= w[0].birth && w[0].death_before <= w[1].death_before)
    }
}

/// Diffs the pairings of `fc` and `fc ∪ sigma`, matching classes by birth
/// simplex, and checks the cascade structure.
pub fn cascade_verify(fc: &FilteredComplex, sigma: &Simplex, value: f64) -> Result<CascadeReport> {
    let after = fc.with_simplex(sigma, value)?;
    let p0 = reduce(fc).pairing;
    let p1 = reduce(&after).pairing;
    let s_idx = after.index_of(&sigma.0).expect("inserted");
    if p1.sign(s_idx) != Sign::Negative {
        return Err(Error::NotNegative);
    }
    let k = sigma.dim() - 1;
    let lookup = after.index_map();
    let to_after = |i: usize| lookup[&crate::complex::pack(fc.simplex(i))] as usize;
    let mut classes = Vec::new();
    let mut mismatches = Vec::new();
    let mut positions = Vec::new();
    for i in 0..fc.len() {
        if fc.dim(i) != k || p0.sign(i) != Sign::Positive {
            continue;
        }
        let j = to_after(i);
        if p1.sign(j) != Sign::Positive {
            mismatches.push(Simplex::from_sorted(fc.simplex(i)));
            continue;
        }
        let kb = p0.killer(i).map(|d| Simplex::from_sorted(fc.simplex(d)));
        let ka = p1.killer(j).map(|d| Simplex::from_sorted(after.simplex(d)));
        if kb != ka {
            classes.push(CascadeClass {
                birth_simplex: Simplex::from_sorted(fc.simplex(i)),
                birth: fc.value(i),
                death_before: p0.killer(i).map_or(f64::INFINITY, |d| fc.value(d)),
                killer_before: kb,
                death_after: p1.killer(j).map_or(f64::INFINITY, |d| after.value(d)),
                killer_after: ka,
            });
            positions.push(i);
        }
    }
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| positions[b].cmp(&positions[a]));
    let classes: Vec<CascadeClass> = order.into_iter().map(|i| classes[i].clone()).collect();
    let ordered_deaths = classes.first().is_none_or(|c| value <= c.death_before)
        && classes.windows(2).all(|w| w[0].death_before <= w[1].death_before);
    let sigma_kills_first = classes.first().is_none_or(|c| c.killer_after.as_ref() == Some(sigma));
    let shifted_matching = classes.windows(2).all(|w| w[1].killer_after == w[0].killer_before);
    Ok(CascadeReport { classes, ordered_deaths, sigma_kills_first, shifted_matching, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_cech, build_rips, Flavor};
    use crate::density::{sample_binomial, DensityModel, PointCloud};
    use approx::assert_relative_eq;

    fn triangle() -> PointCloud {
        PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]])
    }

    fn square() -> PointCloud {
        PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]])
    }

    #[test]
    fn cech_triangle_pair() {
        let r = reduce(&build_cech(&triangle(), 1.0, 2).unwrap());
        let d1 = r.diagrams.dim(1);
        assert_eq!(d1.len(), 1);
        assert_relative_eq!(d1[0].birth, 0.5, epsilon = 1e-12);
        assert_relative_eq!(d1[0].death, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(d1[0].pi(), 2.0 / 3f64.sqrt(), epsilon = 1e-12);
        // Reduced H0: two finite classes dying at 0.5, no essential class.
        assert_eq!(r.diagrams.dim(0).len(), 2);
        assert!(r.diagrams.dim(0).iter().all(|p| (p.death - 0.5).abs() < 1e-12));
    }

    #[test]
    fn rips_triangle_has_no_cycle() {
        let r = reduce(&build_rips(&triangle(), 2.0, 2).unwrap());
        assert!(r.diagrams.dim(1).is_empty());
    }

    #[test]
    fn cech_square_measure() {
        let r = reduce(&build_cech(&square(), 1.0, 2).unwrap());
        let d1 = r.diagrams.dim(1);
        assert_eq!(d1.len(), 1);
        assert_relative_eq!(d1[0].pi(), 2f64.sqrt(), epsilon = 1e-12);
        assert_eq!(pi_measure(&r.diagrams, 1, 0.6).total(), 0);
        let m = pi_measure(&r.diagrams, 1, 1.0);
        assert_eq!(m.total(), 1);
        assert_eq!(pi_count_alpha(&m, 1.0), 1);
        assert_eq!(pi_count_alpha(&m, 1.4), 1);
        assert_eq!(pi_count_alpha(&m, 1.5), 0);
        let cdf = empirical_cdf(&m).unwrap();
        assert_eq!(cdf.eval(1.41), 0.0);
        assert_eq!(cdf.eval(2f64.sqrt()), 1.0);
    }

    #[test]
    fn cdf_counts() {
        let m = PiMeasure { dim: 1, r_max: 1.0, pi_values: vec![1.2, 1.2, 2.0] };
        let c = empirical_cdf(&m).unwrap();
        assert_relative_eq!(c.eval(1.2), 2.0 / 3.0);
        assert_eq!(c.eval(0.999), 0.0);
        let empty = PiMeasure { dim: 1, r_max: 1.0, pi_values: vec![] };
        assert_eq!(empirical_cdf(&empty), Err(Error::EmptyMeasure));
    }

    #[test]
    fn homology_and_cohomology_agree() {
        for seed in 0..6 {
            let c = sample_binomial(&DensityModel::uniform_cube(2), 60, seed).unwrap();
            for flavor in [Flavor::Cech, Flavor::Rips] {
                let fc = crate::complex::build(&c, flavor, 0.25, 2).unwrap();
                let a = reduce_with(&fc, Algorithm::Homology);
                let b = reduce_with(&fc, Algorithm::Cohomology);
                assert_eq!(a.pairing, b.pairing);
                assert_eq!(a.diagrams, b.diagrams);
            }
        }
        let c = sample_binomial(&DensityModel::uniform_cube(3), 30, 1).unwrap();
        let fc = build_rips(&c, 0.6, 3).unwrap();
        assert_eq!(reduce_with(&fc, Algorithm::Homology).pairing, reduce_with(&fc, Algorithm::Cohomology).pairing);
    }

    #[test]
    fn pi_at_least_one() {
        let c = sample_binomial(&DensityModel::standard_gaussian(2), 80, 3).unwrap();
        let r = reduce(&build_cech(&c, 0.5, 2).unwrap());
        let m = pi_measure(&r.diagrams, 1, 0.5);
        assert!(m.total() > 0);
        assert!(m.pi_values.iter().all(|&p| p > 1.0));
    }

    #[test]
    fn csv_format() {
        let r = reduce(&build_cech(&triangle(), 1.0, 2).unwrap());
        let mut out = Vec::new();
        r.diagrams.write_csv(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("dim,birth,death\n"));
        assert!(s.contains("\n1,0.5,0.57735"));
    }

    #[test]
    fn vertex_insertion_is_neutral() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 20, 4).unwrap();
        let fc = build_rips(&c, 0.4, 2).unwrap();
        let v = Simplex::new(&[20]).unwrap();
        let p = stability_probe(&fc, &v, 0.1, 1.0, 1, None).unwrap();
        assert_eq!(p.delta, 0);
        assert!(p.pass);
    }

    #[test]
    fn triangle_cascade() {
        // Closing a triangle whose boundary cycle was born and killed nowhere
        // else: the triangle kills the class born by its last edge.
        let fc = build_rips(&triangle(), 2.0, 2).unwrap();
        let small = fc.without_simplex(&[0, 1, 2]).unwrap();
        let rep = cascade_verify(&small, &Simplex::new(&[0, 1, 2]).unwrap(), 1.5).unwrap();
        assert_eq!(rep.classes.len(), 1);
        assert!(rep.pass());
        let neg = cascade_verify(&small, &Simplex::new(&[0, 1, 2]).unwrap(), 1.0).unwrap();
        assert!(neg.pass());
    }
}
