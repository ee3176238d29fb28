//! Uniform grid bucketing for fixed-radius neighbor queries.

use crate::density::PointCloud;
use crate::geometry::dist2;

/// Distance used for neighbor queries. The torus is `[0, side)^d` with the
/// minimum-image convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Euclidean,
    Torus { side: f64 },
}

impl Metric {
    #[inline]
    pub fn dist2(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Metric::Euclidean => dist2(a, b),
            Metric::Torus { side } => a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let mut t = (x - y).abs() % side;
                    if t > side / 2.0 {
                        t = side - t;
                    }
                    t * t
                })
                .sum(),
        }
    }
}

/// Points bucketed into cubic cells, stored cell-major.
pub struct Grid<'a> {
    cloud: &'a PointCloud,
    metric: Metric,
    origin: Vec<f64>,
    cell: f64,
    dims: Vec<usize>,
    start: Vec<u32>,
    order: Vec<u32>,
}

const MAX_CELLS_PER_POINT: usize = 4;

impl<'a> Grid<'a> {
    /// Builds a grid whose cells have side at least `cell`.
    pub fn new(cloud: &'a PointCloud, cell: f64, metric: Metric) -> Self {
        let d = cloud.d;
        let n = cloud.len();
        let (origin, extent) = match metric {
            Metric::Torus { side } => (vec![0.0; d], vec![side; d]),
            Metric::Euclidean => {
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for p in cloud.points() {
                    for a in 0..d {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                if n == 0 {
                    lo = vec![0.0; d];
                    hi = vec![0.0; d];
                }
                let ext = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
                (lo, ext)
            }
        };
        let mut h = if cell.is_finite() && cell > 0.0 { cell } else { f64::INFINITY };
        let limit = (MAX_CELLS_PER_POINT * n.max(1)).max(64);
        let mut dims;
        loop {
            dims = extent
                .iter()
                .map(|&e| if h.is_finite() { ((e / h).floor() as usize) + 1 } else { 1 })
                .collect::<Vec<_>>();
            if let Metric::Torus { side } = metric {
                // Cells must tile the torus exactly for wrap-around offsets.
                if h.is_finite() {
                    let m = ((side / h).floor() as usize).max(1);
                    dims = vec![m; d];
                }
            }
            let total = dims.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m));
            match total {
                Some(t) if t <= limit => break,
                _ => h *= 2.0,
            }
        }
        let cell_len = match metric {
            Metric::Torus { side } => side / dims[0] as f64,
            Metric::Euclidean => h,
        };
        let total: usize = dims.iter().product();
        let mut grid = Grid {
            cloud,
            metric,
            origin,
            cell: cell_len,
            dims,
            start: vec![0; total + 1],
            order: Vec::with_capacity(n),
        };
        let ids: Vec<usize> = (0..n).map(|i| grid.cell_of(cloud.point(i))).collect();
        for &c in &ids {
            grid.start[c + 1] += 1;
        }
        for c in 0..total {
            grid.start[c + 1] += grid.start[c];
        }
        let mut fill = grid.start.clone();
        grid.order = vec![0; n];
        for (i, &c) in ids.iter().enumerate() {
            grid.order[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        grid
    }

    fn coord_cell(&self, x: &[f64]) -> Vec<i64> {
        (0..self.cloud.d)
            .map(|a| {
                if !self.cell.is_finite() {
                    return 0;
                }
                let m = self.dims[a] as i64;
                let raw = ((x[a] - self.origin[a]) / self.cell).floor() as i64;
                match self.metric {
                    Metric::Torus { .. } => raw.rem_euclid(m),
                    Metric::Euclidean => raw.clamp(0, m - 1),
                }
            })
            .collect()
    }

    fn cell_of(&self, x: &[f64]) -> usize {
        self.coord_cell(x).iter().zip(&self.dims).fold(0usize, |acc, (&c, &m)| acc * m + c as usize)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// Calls `f(index, squared distance)` for every point within `r` of `x`
    /// (closed ball).
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, x: &[f64], r: f64, mut f: F) {
        let d = self.cloud.d;
        let r2 = r * r;
        let base = self.coord_cell(x);
        let reach: Vec<i64> = (0..d)
            .map(|_| {
                if !self.cell.is_finite() {
                    return 0;
                }
                (r / self.cell).ceil() as i64
            })
            .collect();
        // On the torus, an axis whose window would wrap onto itself scans
        // each of its cells exactly once instead.
        let scan_all: Vec<bool> = (0..d)
            .map(|a| matches!(self.metric, Metric::Torus { .. }) && 2 * reach[a] + 1 >= self.dims[a] as i64)
            .collect();
        // Euclidean windows are clipped to the grid; the torus keeps them whole.
        let clip = matches!(self.metric, Metric::Euclidean);
        let lo: Vec<i64> =
            (0..d).map(|a| if scan_all[a] || (clip && reach[a] > base[a]) { -base[a] } else { -reach[a] }).collect();
        let hi: Vec<i64> = (0..d)
            .map(|a| {
                let top = self.dims[a] as i64 - 1 - base[a];
                if scan_all[a] || (clip && reach[a] > top) {
                    top
                } else {
                    reach[a]
                }
            })
            .collect();
        let mut offset = lo.clone();
        loop {
            let mut idx = 0usize;
            let mut ok = true;
            for a in 0..d {
                let m = self.dims[a] as i64;
                let mut c = base[a] + offset[a];
                match self.metric {
                    Metric::Torus { .. } => c = c.rem_euclid(m),
                    Metric::Euclidean => {
                        if c < 0 || c >= m {
                            ok = false;
                            break;
                        }
                    }
                }
                idx = idx * self.dims[a] + c as usize;
            }
            if ok {
                let (s, e) = (self.start[idx] as usize, self.start[idx + 1] as usize);
                for &j in &self.order[s..e] {
                    let j = j as usize;
                    let q = self.cloud.point(j);
                    let dd = self.metric.dist2(x, q);
                    if dd <= r2 {
                        f(j, dd);
                    }
                }
            }
            // Advance the odometer.
            let mut a = d;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                if offset[a] < hi[a] {
                    offset[a] += 1;
                    break;
                }
                offset[a] = lo[a];
            }
        }
    }

    /// Indices within `r` of `x`, sorted.
    pub fn within(&self, x: &[f64], r: f64) -> Vec<usize> {
        let mut v = Vec::new();
        self.for_each_within(x, r, |j, _| v.push(j));
        v.sort_unstable();
        v
    }
}

/// Adjacency lists (sorted, higher indices only) of the graph joining points
/// at distance at most `r`.
pub fn upper_neighbors(cloud: &PointCloud, r: f64, metric: Metric) -> Vec<Vec<u32>> {
    let grid = Grid::new(cloud, r, metric);
    (0..cloud.len())
        .map(|i| {
            let mut v = Vec::new();
            grid.for_each_within(cloud.point(i), r, |j, _| {
                if j > i {
                    v.push(j as u32);
                }
            });
            v.sort_unstable();
            v
        })
        .collect()
}
