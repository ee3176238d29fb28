//! Čech and Vietoris–Rips filtrations truncated at `r_max` and a dimension cap.
//!
//! Simplices are stored in their total order `(value, dim, lexicographic
//! vertices)`, so every face precedes its cofaces.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::density::PointCloud;
use crate::error::{Error, Result};
use crate::geometry::{dist, dist2, min_enclosing_ball};
use crate::grid::{upper_neighbors, Metric};

/// Largest supported simplex dimension (keys pack five 25-bit vertex ids).
pub const MAX_SUPPORTED_DIM: usize = 4;
const MAX_VERTEX: u32 = (1 << 25) - 2;
const PAD: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Cech,
    Rips,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Cech => "cech",
            Flavor::Rips => "rips",
        })
    }
}

/// A simplex as its strictly increasing vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex(pub SmallVec<[u32; 4]>);

impl Simplex {
    /// Sorts and deduplicates; fails on an empty list.
    pub fn new(vertices: &[u32]) -> Result<Self> {
        let mut v: SmallVec<[u32; 4]> = vertices.iter().copied().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() || v.len() != vertices.len() {
            return Err(Error::InvalidParameter(format!("bad simplex {vertices:?}")));
        }
        Ok(Simplex(v))
    }

    pub fn from_sorted(vertices: &[u32]) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices.iter().copied().collect())
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, in the order obtained by dropping vertex `i`.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| Simplex(self.0.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect()))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Packs a vertex list into a collision-free key (requires `len <= 5`).
#[inline]
pub(crate) fn pack(vs: &[u32]) -> u128 {
    vs.iter().fold(0u128, |acc, &v| (acc << 25) | (v as u128 + 1))
}

/// Compares two entries under the total order.
pub fn total_order(a: (f64, &[u32]), b: (f64, &[u32])) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.len().cmp(&b.1.len())).then_with(|| a.1.cmp(b.1))
}

/// Boundary matrix in compressed-column form: column `j` lists the indices
/// of the facets of simplex `j`, ascending.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub offsets: Vec<usize>,
    pub rows: Vec<u32>,
}

impl Boundary {
    pub fn column(&self, j: usize) -> &[u32] {
        &self.rows[self.offsets[j]..self.offsets[j + 1]]
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The transpose: column `i` lists the cofacets of simplex `i`, ascending.
    pub fn transpose(&self) -> Boundary {
        let n = self.len();
        let mut count = vec![0usize; n + 1];
        for &r in &self.rows {
            count[r as usize + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut rows = vec![0u32; self.rows.len()];
        for j in 0..n {
            for &r in self.column(j) {
                rows[fill[r as usize]] = j as u32;
                fill[r as usize] += 1;
            }
        }
        Boundary { offsets: count, rows }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    flavor: Flavor,
    r_max: f64,
    max_dim: usize,
    stride: usize,
    verts: Vec<u32>,
    dims: Vec<u8>,
    values: Vec<f64>,
}

impl FilteredComplex {
    fn empty(flavor: Flavor, r_max: f64, max_dim: usize) -> Self {
        FilteredComplex {
            flavor,
            r_max,
            max_dim,
            stride: max_dim + 1,
            verts: Vec::new(),
            dims: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a complex from explicit entries, sorting them into the total
    /// order and checking closure under faces and value monotonicity.
    pub fn from_entries(flavor: Flavor, r_max: f64, max_dim: usize, entries: Vec<(Simplex, f64)>) -> Result<Self> {
        check_dim(max_dim)?;
        let mut fc = Self::empty(flavor, r_max, max_dim);
        for (s, v) in &entries {
            if s.dim() > max_dim {
                return Err(Error::InvalidFiltration(format!("{s} exceeds max_dim {max_dim}")));
            }
            if s.0.iter().any(|&x| x > MAX_VERTEX) {
                return Err(Error::InvalidFiltration(format!("vertex id too large in {s}")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidFiltration(format!("{s} has non-finite value")));
            }
            fc.push(&s.0, *v);
        }
        fc.sort();
        fc.validate()?;
        Ok(fc)
    }

    fn push(&mut self, vs: &[u32], value: f64) {
        self.verts.extend_from_slice(vs);
        self.verts.extend(std::iter::repeat_n(PAD, self.stride - vs.len()));
        self.dims.push((vs.len() - 1) as u8);
        self.values.push(value);
    }

    fn sort(&mut self) {
        let mut perm: Vec<u32> = (0..self.len() as u32).collect();
        perm.sort_unstable_by(|&a, &b| {
            total_order(
                (self.values[a as usize], self.simplex(a as usize)),
                (self.values[b as usize], self.simplex(b as usize)),
            )
        });
        let mut verts = Vec::with_capacity(self.verts.len());
        let mut dims = Vec::with_capacity(self.len());
        let mut values = Vec::with_capacity(self.len());
        for &p in &perm {
            let p = p as usize;
            verts.extend_from_slice(&self.verts[p * self.stride..(p + 1) * self.stride]);
            dims.push(self.dims[p]);
            values.push(self.values[p]);
        }
        self.verts = verts;
        self.dims = dims;
        self.values = values;
    }

    /// Checks that every face is present, precedes its cofaces, and has a
    /// value no larger than theirs; also rejects duplicates.
    pub fn validate(&self) -> Result<()> {
        let index = self.index_map();
        if index.len() != self.len() {
            return Err(Error::InvalidFiltration("duplicate simplex".into()));
        }
        let mut buf: SmallVec<[u32; 5]> = SmallVec::new();
        for i in 0..self.len() {
            let s = self.simplex(i);
            if s.len() < 2 {
                continue;
            }
            for drop in 0..s.len() {
                buf.clear();
                buf.extend(s.iter().enumerate().filter(|&(j, _)| j != drop).map(|(_, &v)| v));
                match index.get(&pack(&buf)) {
                    None => {
                        return Err(Error::InvalidFiltration(format!("face {:?} of {:?} missing", buf.as_slice(), s)))
                    }
                    Some(&f) if f as usize >= i || self.values[f as usize] > self.values[i] => {
                        return Err(Error::InvalidFiltration(format!(
                            "face {:?} does not precede {:?}",
                            buf.as_slice(),
                            s
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Vertex list of the `i`-th simplex in the total order.
    #[inline]
    pub fn simplex(&self, i: usize) -> &[u32] {
        let d = self.dims[i] as usize;
        &self.verts[i * self.stride..i * self.stride + d + 1]
    }

    #[inline]
    pub fn dim(&self, i: usize) -> usize {
        self.dims[i] as usize
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        (0..self.len()).map(move |i| (self.simplex(i), self.values[i]))
    }

    /// Number of simplices of each dimension `0..=max_dim`.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.max_dim + 1];
        for &d in &self.dims {
            c[d as usize] += 1;
        }
        c
    }

    pub fn index_map(&self) -> FxHashMap<u128, u32> {
        let mut m = FxHashMap::default();
        m.reserve(self.len());
        for i in 0..self.len() {
            m.insert(pack(self.simplex(i)), i as u32);
        }
        m
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        // Linear scan is fine for the small complexes this is used on.
        (0..self.len()).find(|&i| self.simplex(i) == s)
    }

    pub fn boundary(&self) -> Boundary {
        let index = self.index_map();
        let mut offsets = Vec::with_capacity(self.len() + 1);
        let mut rows = Vec::new();
        offsets.push(0);
        let mut buf: SmallVec<[u32; 5]> = SmallVec::new();
        let mut col: SmallVec<[u32; 5]> = SmallVec::new();
        for i in 0..self.len() {
            let s = self.simplex(i);
            if s.len() > 1 {
                col.clear();
                for drop in 0..s.len() {
                    buf.clear();
                    buf.extend(s.iter().enumerate().filter(|&(j, _)| j != drop).map(|(_, &v)| v));
                    col.push(index[&pack(&buf)]);
                }
                col.sort_unstable();
                rows.extend_from_slice(&col);
            }
            offsets.push(rows.len());
        }
        Boundary { offsets, rows }
    }

    /// The subcomplex of simplices with value at most `r`; a prefix of the
    /// total order.
    pub fn truncated(&self, r: f64) -> FilteredComplex {
        let end = self.values.partition_point(|&v| v <= r);
        FilteredComplex {
            flavor: self.flavor,
            r_max: r.min(self.r_max),
            max_dim: self.max_dim,
            stride: self.stride,
            verts: self.verts[..end * self.stride].to_vec(),
            dims: self.dims[..end].to_vec(),
            values: self.values[..end].to_vec(),
        }
    }

    /// A copy with `s` inserted at `value`. All faces must be present with
    /// values at most `value`.
    pub fn with_simplex(&self, s: &Simplex, value: f64) -> Result<FilteredComplex> {
        if s.dim() > self.max_dim {
            return Err(Error::InvalidFiltration(format!("{s} exceeds max_dim")));
        }
        if self.index_of(&s.0).is_some() {
            return Err(Error::InvalidFiltration(format!("{s} already present")));
        }
        for f in s.facets() {
            match self.index_of(&f.0) {
                Some(i) if self.values[i] <= value => {}
                _ => return Err(Error::InvalidFiltration(format!("face {f} of {s} missing or later than {value}"))),
            }
        }
        let mut out = self.clone();
        out.push(&s.0, value);
        out.sort();
        Ok(out)
    }

    /// A copy without the simplex `s`, which must have no cofaces.
    pub fn without_simplex(&self, s: &[u32]) -> Result<FilteredComplex> {
        let i = self.index_of(s).ok_or_else(|| Error::InvalidFiltration(format!("{s:?} not present")))?;
        let is_face = |t: &[u32]| t.len() == s.len() + 1 && s.iter().all(|v| t.contains(v));
        if (0..self.len()).any(|j| is_face(self.simplex(j))) {
            return Err(Error::InvalidFiltration(format!("{s:?} is not maximal")));
        }
        let mut out = self.clone();
        out.verts.drain(i * self.stride..(i + 1) * self.stride);
        out.dims.remove(i);
        out.values.remove(i);
        Ok(out)
    }

    /// Writes one simplex per line, `value dim v0 v1 ...`, in the total order.
    pub fn dump<W: Write>(&self, mut w: W) -> Result<()> {
        for (s, v) in self.iter() {
            write!(w, "{} {}", v, s.len() - 1)?;
            for x in s {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

fn check_dim(max_dim: usize) -> Result<()> {
    if max_dim == 0 || max_dim > MAX_SUPPORTED_DIM {
        return Err(Error::InvalidParameter(format!("max_dim must be in 1..={MAX_SUPPORTED_DIM}, got {max_dim}")));
    }
    Ok(())
}

fn check_input(cloud: &PointCloud, r_max: f64, max_dim: usize) -> Result<()> {
    check_dim(max_dim)?;
    if !(r_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("r_max must be nonnegative, got {r_max}")));
    }
    if cloud.len() > MAX_VERTEX as usize {
        return Err(Error::InvalidParameter("cloud too large".into()));
    }
    Ok(())
}

/// Minimal enclosing ball radius of a triangle, or of an edge when obtuse.
#[inline]
fn triangle_meb(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let ab = dist2(a, b);
    let ac = dist2(a, c);
    let bc = dist2(b, c);
    let (l, s1, s2) = if ab >= ac && ab >= bc {
        (ab, ac, bc)
    } else if ac >= bc {
        (ac, ab, bc)
    } else {
        (bc, ab, ac)
    };
    let half_long = l.sqrt() / 2.0;
    if s1 + s2 <= l {
        return half_long;
    }
    // Circumradius R^2 = |ab|^2 |ac|^2 |bc|^2 / (4 (|u|^2 |v|^2 - (u.v)^2)).
    let uv: f64 = a.iter().zip(b).zip(c).map(|((x, y), z)| (y - x) * (z - x)).sum();
    let gram = ab * ac - uv * uv;
    if !(gram > 0.0) {
        return half_long;
    }
    (ab * ac * bc / (4.0 * gram)).sqrt().max(half_long)
}

/// Čech filtration value of a vertex set: its minimal enclosing ball
/// radius, raised to the largest facet value so the order stays monotone.
pub fn cech_value(pts: &[&[f64]]) -> f64 {
    match pts.len() {
        0 | 1 => 0.0,
        2 => dist(pts[0], pts[1]) / 2.0,
        3 => triangle_meb(pts[0], pts[1], pts[2]),
        n => {
            let mut m: f64 = 0.0;
            let mut sub: SmallVec<[&[f64]; 8]> = SmallVec::new();
            for drop in 0..n {
                sub.clear();
                sub.extend(pts.iter().enumerate().filter(|&(j, _)| j != drop).map(|(_, p)| *p));
                m = m.max(cech_value(&sub));
            }
            // When the ball is supported by a proper subset, reuse that
            // subset's value exactly so equal radii stay equal.
            let r = min_enclosing_ball(pts).radius;
            if r <= m * (1.0 + 1e-12) {
                m
            } else {
                r
            }
        }
    }
}

/// Rips filtration value: the largest pairwise distance.
pub fn rips_value(pts: &[&[f64]], metric: Metric) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            m = m.max(metric.dist2(pts[i], pts[j]));
        }
    }
    m.sqrt()
}

fn intersect_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

struct Expander<'a, V: Fn(&[u32], f64, u32) -> Option<f64>> {
    adj: &'a [Vec<u32>],
    max_dim: usize,
    value: V,
    out: FilteredComplex,
}

impl<V: Fn(&[u32], f64, u32) -> Option<f64>> Expander<'_, V> {
    fn grow(&mut self, clique: &mut SmallVec<[u32; 6]>, value: f64, cand: &[u32]) {
        self.out.push(clique, value);
        if clique.len() > self.max_dim {
            return;
        }
        let mut next = Vec::new();
        for (pos, &v) in cand.iter().enumerate() {
            let Some(val) = (self.value)(clique, value, v) else { continue };
            clique.push(v);
            if clique.len() <= self.max_dim {
                intersect_sorted(&cand[pos + 1..], &self.adj[v as usize], &mut next);
            } else {
                next.clear();
            }
            let c = std::mem::take(&mut next);
            self.grow(clique, val, &c);
            next = c;
            clique.pop();
        }
    }
}

fn expand<V: Fn(&[u32], f64, u32) -> Option<f64>>(
    flavor: Flavor,
    r_max: f64,
    max_dim: usize,
    adj: &[Vec<u32>],
    value: V,
) -> FilteredComplex {
    let mut ex = Expander { adj, max_dim, value, out: FilteredComplex::empty(flavor, r_max, max_dim) };
    let mut clique: SmallVec<[u32; 6]> = SmallVec::new();
    for i in 0..adj.len() {
        clique.push(i as u32);
        ex.grow(&mut clique, 0.0, &adj[i]);
        clique.pop();
    }
    let mut fc = ex.out;
    fc.sort();
    fc
}

/// Vietoris–Rips filtration: cliques of the `r_max`-distance graph up to
/// dimension `max_dim`, valued by diameter.
pub fn build_rips(cloud: &PointCloud, r_max: f64, max_dim: usize) -> Result<FilteredComplex> {
    build_rips_metric(cloud, r_max, max_dim, Metric::Euclidean)
}

pub fn build_rips_metric(cloud: &PointCloud, r_max: f64, max_dim: usize, metric: Metric) -> Result<FilteredComplex> {
    check_input(cloud, r_max, max_dim)?;
    let adj = upper_neighbors(cloud, r_max, metric);
    Ok(expand(Flavor::Rips, r_max, max_dim, &adj, |clique, value, v| {
        let p = cloud.point(v as usize);
        let m = clique.iter().map(|&u| metric.dist2(cloud.point(u as usize), p)).fold(0.0f64, f64::max);
        Some(value.max(m.sqrt()))
    }))
}

/// Čech filtration: vertex sets whose minimal enclosing ball has radius at
/// most `r_max`, up to dimension `max_dim`.
pub fn build_cech(cloud: &PointCloud, r_max: f64, max_dim: usize) -> Result<FilteredComplex> {
    check_input(cloud, r_max, max_dim)?;
    let adj = upper_neighbors(cloud, 2.0 * r_max, Metric::Euclidean);
    Ok(expand(Flavor::Cech, r_max, max_dim, &adj, |clique, _, v| {
        let mut pts: SmallVec<[&[f64]; 6]> = clique.iter().map(|&u| cloud.point(u as usize)).collect();
        pts.push(cloud.point(v as usize));
        let val = cech_value(&pts);
        (val <= r_max).then_some(val)
    }))
}

pub fn build(cloud: &PointCloud, flavor: Flavor, r_max: f64, max_dim: usize) -> Result<FilteredComplex> {
    match flavor {
        Flavor::Cech => build_cech(cloud, r_max, max_dim),
        Flavor::Rips => build_rips(cloud, r_max, max_dim),
    }
}

/// An unfiltered simplicial complex on a subset of cloud indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinkComplex {
    pub simplices: Vec<Simplex>,
}

impl LinkComplex {
    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Simplices of dimension `q`, sorted.
    pub fn of_dim(&self, q: usize) -> Vec<&Simplex> {
        let mut v: Vec<&Simplex> = self.simplices.iter().filter(|s| s.dim() == q).collect();
        v.sort();
        v
    }

    pub fn normalized(mut self) -> Self {
        self.simplices.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        self
    }
}

/// The link of edge `(x1, x2)` at radius `rho = |x1 - x2|`, built from the
/// lens: the Rips complex at `rho` on the points other than `x1, x2` within
/// `rho` of both, up to dimension `max_dim`.
pub fn link_of_edge_lens(cloud: &PointCloud, x1: usize, x2: usize, max_dim: usize, metric: Metric) -> LinkComplex {
    let (p, q) = (cloud.point(x1), cloud.point(x2));
    let rho2 = metric.dist2(p, q);
    let lens: Vec<u32> = (0..cloud.len())
        .filter(|&y| y != x1 && y != x2)
        .filter(|&y| metric.dist2(cloud.point(y), p) <= rho2 && metric.dist2(cloud.point(y), q) <= rho2)
        .map(|y| y as u32)
        .collect();
    link_from_vertices(cloud, &lens, rho2, max_dim, metric)
}

/// Rips complex at squared radius `rho2` on the given sorted vertex list.
pub fn link_from_vertices(
    cloud: &PointCloud,
    vertices: &[u32],
    rho2: f64,
    max_dim: usize,
    metric: Metric,
) -> LinkComplex {
    let adj: Vec<Vec<u32>> = vertices
        .iter()
        .enumerate()
        .map(|(a, &u)| {
            vertices[a + 1..]
                .iter()
                .copied()
                .filter(|&w| metric.dist2(cloud.point(u as usize), cloud.point(w as usize)) <= rho2)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut clique: SmallVec<[u32; 6]> = SmallVec::new();
    fn rec<'a>(
        adj_of: &dyn Fn(u32) -> &'a [u32],
        clique: &mut SmallVec<[u32; 6]>,
        cand: &[u32],
        max_dim: usize,
        out: &mut Vec<Simplex>,
    ) {
        out.push(Simplex::from_sorted(clique));
        if clique.len() > max_dim {
            return;
        }
        let mut next = Vec::new();
        for (pos, &v) in cand.iter().enumerate() {
            clique.push(v);
            intersect_sorted(&cand[pos + 1..], adj_of(v), &mut next);
            let c = std::mem::take(&mut next);
            rec(adj_of, clique, &c, max_dim, out);
            next = c;
            clique.pop();
        }
    }
    let pos_of = |v: u32| vertices.binary_search(&v).expect("vertex in link");
    let adj_of = |v: u32| adj[pos_of(v)].as_slice();
    for (a, &u) in vertices.iter().enumerate() {
        clique.push(u);
        rec(&adj_of, &mut clique, &adj[a], max_dim, &mut out);
        clique.pop();
    }
    LinkComplex { simplices: out }.normalized()
}

/// The combinatorial link of an edge in `fc` at its own value:
/// `{tau : tau ∩ e = ∅, tau ∪ e ∈ fc, value(tau ∪ e) <= value(e)}`.
pub fn link_of_edge_star(fc: &FilteredComplex, e: &[u32]) -> Result<LinkComplex> {
    let ei = fc
        .index_of(e)
        .filter(|_| e.len() == 2)
        .ok_or_else(|| Error::InvalidParameter(format!("{e:?} is not an edge of the complex")))?;
    let rho = fc.value(ei);
    let mut out = Vec::new();
    for (s, v) in fc.iter() {
        if s.len() > 2 && v <= rho && s.contains(&e[0]) && s.contains(&e[1]) {
            let tau: Vec<u32> = s.iter().copied().filter(|x| *x != e[0] && *x != e[1]).collect();
            out.push(Simplex::from_sorted(&tau));
        }
    }
    Ok(LinkComplex { simplices: out }.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{sample_binomial, DensityModel};
    use approx::assert_relative_eq;

    fn triangle() -> PointCloud {
        PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]])
    }

    fn square() -> PointCloud {
        PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]])
    }

    fn by_dim(fc: &FilteredComplex, d: usize) -> Vec<f64> {
        (0..fc.len()).filter(|&i| fc.dim(i) == d).map(|i| fc.value(i)).collect()
    }

    #[test]
    fn rips_triangle() {
        let fc = build_rips(&triangle(), 2.0, 2).unwrap();
        assert_eq!(fc.counts(), vec![3, 3, 1]);
        for v in by_dim(&fc, 1).into_iter().chain(by_dim(&fc, 2)) {
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rips_far_pair() {
        let c = PointCloud::from_points(1, &[vec![0.0], vec![2.0]]);
        assert_eq!(build_rips(&c, 1.0, 1).unwrap().counts(), vec![2, 0]);
    }

    #[test]
    fn rips_square() {
        let fc = build_rips(&square(), 2.0, 2).unwrap();
        let mut e = by_dim(&fc, 1);
        e.sort_by(f64::total_cmp);
        assert_eq!(e.len(), 6);
        assert!(e[..4].iter().all(|&x| x == 1.0));
        assert!(e[4..].iter().all(|&x| (x - 2f64.sqrt()).abs() < 1e-12));
        let t = by_dim(&fc, 2);
        assert_eq!(t.len(), 4);
        assert!(t.iter().all(|&x| (x - 2f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn cech_triangle_and_square() {
        let fc = build_cech(&triangle(), 1.0, 2).unwrap();
        assert_relative_eq!(by_dim(&fc, 2)[0], 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert!(by_dim(&fc, 1).iter().all(|&x| (x - 0.5).abs() < 1e-12));
        let sq = build_cech(&square(), 1.0, 2).unwrap();
        let e = by_dim(&sq, 1);
        assert_eq!(e.iter().filter(|&&x| (x - 0.5f64.sqrt()).abs() < 1e-12).count(), 2);
        assert!(by_dim(&sq, 2).iter().all(|&x| (x - 0.5f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn order_and_monotonicity() {
        for flavor in [Flavor::Cech, Flavor::Rips] {
            let c = sample_binomial(&DensityModel::uniform_cube(3), 40, 5).unwrap();
            let fc = build(&c, flavor, 0.35, 3).unwrap();
            fc.validate().unwrap();
            for i in 1..fc.len() {
                let a = (fc.value(i - 1), fc.simplex(i - 1));
                let b = (fc.value(i), fc.simplex(i));
                assert_eq!(total_order(a, b), Ordering::Less);
            }
            assert!(fc.values().iter().all(|&v| v <= 0.35));
        }
    }

    #[test]
    fn rips_cech_sandwich() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 30, 9).unwrap();
        let rips = build_rips(&c, 10.0, 2).unwrap();
        for (s, r) in rips.iter() {
            let pts: Vec<&[f64]> = s.iter().map(|&i| c.point(i as usize)).collect();
            let cv = cech_value(&pts);
            assert!(cv <= r + 1e-12 && r <= 2.0 * cv + 1e-12);
        }
    }

    #[test]
    fn truncation_is_prefix() {
        let c = sample_binomial(&DensityModel::uniform_cube(2), 60, 2).unwrap();
        for flavor in [Flavor::Cech, Flavor::Rips] {
            let big = build(&c, flavor, 0.3, 2).unwrap();
            let small = build(&c, flavor, 0.15, 2).unwrap();
            let cut = big.truncated(0.15);
            assert_eq!(cut.len(), small.len());
            assert!(cut.iter().zip(small.iter()).all(|(a, b)| a == b));
        }
    }

    #[test]
    fn links_agree() {
        for seed in 0..5 {
            let c = sample_binomial(&DensityModel::uniform_cube(2), 30, seed).unwrap();
            let fc = build_rips(&c, 0.5, 4).unwrap();
            for i in 0..fc.len() {
                let e = fc.simplex(i);
                if e.len() != 2 {
                    continue;
                }
                let a = link_of_edge_lens(&c, e[0] as usize, e[1] as usize, 2, Metric::Euclidean);
                let b = link_of_edge_star(&fc, e).unwrap();
                assert_eq!(a, b, "edge {e:?}");
            }
        }
    }

    #[test]
    fn small_links() {
        let iso = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert!(link_of_edge_lens(&iso, 0, 1, 2, Metric::Euclidean).is_empty());
        let one = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.2]]);
        assert_eq!(link_of_edge_lens(&one, 0, 1, 2, Metric::Euclidean).simplices.len(), 1);
        let two = PointCloud::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 0.2], vec![0.5, -0.2]]);
        let l = link_of_edge_lens(&two, 0, 1, 2, Metric::Euclidean);
        assert_eq!(l.of_dim(0).len(), 2);
        assert_eq!(l.of_dim(1).len(), 1);
    }

    #[test]
    fn insert_remove_and_dump() {
        let fc = build_rips(&square(), 1.0, 2).unwrap();
        let diag = Simplex::new(&[0, 2]).unwrap();
        let bigger = fc.with_simplex(&diag, 1.5).unwrap();
        assert_eq!(bigger.len(), fc.len() + 1);
        assert!(fc.with_simplex(&Simplex::new(&[0, 1, 2]).unwrap(), 2.0).is_err());
        assert_eq!(bigger.without_simplex(&[0, 2]).unwrap(), fc);
        assert!(fc.without_simplex(&[0]).is_err());
        let mut out = Vec::new();
        fc.dump(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next(), Some("0 0 0"));
        assert_eq!(text.lines().last(), Some("1 1 2 3"));
    }

    #[test]
    fn from_entries_rejects_missing_face() {
        let e = vec![(Simplex::new(&[0]).unwrap(), 0.0), (Simplex::new(&[0, 1]).unwrap(), 1.0)];
        assert!(FilteredComplex::from_entries(Flavor::Rips, 1.0, 1, e).is_err());
    }

    #[test]
    fn boundary_transpose() {
        let fc = build_rips(&square(), 2.0, 2).unwrap();
        let b = fc.boundary();
        let t = b.transpose();
        for j in 0..b.len() {
            for &r in b.column(j) {
                assert!(t.column(r as usize).contains(&(j as u32)));
                assert!((r as usize) < j);
            }
        }
    }
}
