//! Uniform grid-bucket index for exact nearest-neighbour and range queries.

use std::borrow::Cow;

use super::PointSet;

/// Above this dimension ring enumeration costs more than a linear scan.
const MAX_GRID_DIM: usize = 4;

/// Points bucketed into a regular grid of cubic cells (CSR layout).
#[derive(Debug, Clone)]
pub struct SpatialIndex<'a> {
    ps: Cow<'a, PointSet>,
    lo: Vec<f64>,
    cell: f64,
    dims: Vec<i64>,
    strides: Vec<usize>,
    starts: Vec<u32>,
    items: Vec<u32>,
    brute: bool,
}

impl SpatialIndex<'static> {
    /// Index that owns its point set.
    pub fn owned(ps: PointSet) -> Self {
        Self::build(Cow::Owned(ps))
    }
}

impl<'a> SpatialIndex<'a> {
    pub fn new(ps: &'a PointSet) -> Self {
        Self::build(Cow::Borrowed(ps))
    }

    fn build(ps: Cow<'a, PointSet>) -> Self {
        let d = ps.dim();
        let n = ps.len();
        let (lo, hi) = ps.bounding_box();
        let max_ext = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0f64, f64::max);
        let brute = d > MAX_GRID_DIM || n < 16 || max_ext == 0.0;
        if brute {
            return Self {
                ps,
                lo,
                cell: 1.0,
                dims: vec![1; d],
                strides: vec![0; d],
                starts: Vec::new(),
                items: Vec::new(),
                brute: true,
            };
        }
        let per_axis = (n as f64).powf(1.0 / d as f64).ceil().max(1.0);
        let cell = max_ext / per_axis;
        let dims: Vec<i64> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (((b - a) / cell).floor() as i64 + 1).max(1))
            .collect();
        let mut strides = vec![0usize; d];
        let mut total = 1usize;
        for k in 0..d {
            strides[k] = total;
            total *= dims[k] as usize;
        }
        let mut counts = vec![0u32; total + 1];
        let cell_of: Vec<usize> = ps
            .iter()
            .map(|p| {
                let mut idx = 0usize;
                for k in 0..d {
                    let c = (((p[k] - lo[k]) / cell).floor() as i64).clamp(0, dims[k] - 1);
                    idx += c as usize * strides[k];
                }
                idx
            })
            .collect();
        for &c in &cell_of {
            counts[c + 1] += 1;
        }
        for i in 0..total {
            counts[i + 1] += counts[i];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; n];
        for (i, &c) in cell_of.iter().enumerate() {
            items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self {
            ps,
            lo,
            cell,
            dims,
            strides,
            starts,
            items,
            brute: false,
        }
    }

    pub fn point_set(&self) -> &PointSet {
        &self.ps
    }

    fn cell_coord(&self, x: &[f64]) -> Vec<i64> {
        x.iter()
            .zip(&self.lo)
            .map(|(v, l)| ((v - l) / self.cell).floor() as i64)
            .collect()
    }

    fn bucket(&self, coord: &[i64]) -> &[u32] {
        let idx: usize = coord
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as usize * s)
            .sum();
        &self.items[self.starts[idx] as usize..self.starts[idx + 1] as usize]
    }

    /// Nearest data point to `x`, optionally skipping index `exclude`.
    /// Returns `(index, distance)`; `None` only when no candidate exists.
    pub fn nearest(&self, x: &[f64], exclude: Option<usize>) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let consider = |i: usize, best: &mut Option<(usize, f64)>| {
            if Some(i) == exclude {
                return;
            }
            let d2 = dist2(self.ps.point(i), x);
            if best.is_none_or(|(_, b)| d2 < b) {
                *best = Some((i, d2));
            }
        };
        if self.brute {
            for i in 0..self.ps.len() {
                consider(i, &mut best);
            }
            return best.map(|(i, d2)| (i, d2.sqrt()));
        }
        let d = self.dims.len();
        let k = self.cell_coord(x);
        // Chebyshev distance from k to the grid box, and to its far corner
        let mut start = 0i64;
        let mut stop = 0i64;
        for a in 0..d {
            let below = -k[a];
            let above = k[a] - (self.dims[a] - 1);
            start = start.max(below).max(above);
            stop = stop.max(k[a].abs()).max((self.dims[a] - 1 - k[a]).abs());
        }
        let mut ring = start.max(0);
        let mut coord = vec![0i64; d];
        loop {
            for_each_ring_cell(&k, ring, &self.dims, &mut coord, &mut |c| {
                for &i in self.bucket(c) {
                    consider(i as usize, &mut best);
                }
            });
            if let Some((_, b2)) = best {
                let reach = ring as f64 * self.cell;
                if b2 <= reach * reach {
                    break;
                }
            }
            if ring >= stop {
                break;
            }
            ring += 1;
        }
        best.map(|(i, d2)| (i, d2.sqrt()))
    }

    /// Calls `f(index, distance²)` for every point with `|p - x| <= radius`.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, x: &[f64], radius: f64, mut f: F) {
        let r2 = radius * radius;
        if self.brute {
            for i in 0..self.ps.len() {
                let d2 = dist2(self.ps.point(i), x);
                if d2 <= r2 {
                    f(i, d2);
                }
            }
            return;
        }
        let d = self.dims.len();
        let mut lo_c = vec![0i64; d];
        let mut hi_c = vec![0i64; d];
        for a in 0..d {
            lo_c[a] = (((x[a] - radius - self.lo[a]) / self.cell).floor() as i64).max(0);
            hi_c[a] = (((x[a] + radius - self.lo[a]) / self.cell).floor() as i64).min(self.dims[a] - 1);
            if lo_c[a] > hi_c[a] {
                return;
            }
        }
        let mut coord = lo_c.clone();
        loop {
            for &i in self.bucket(&coord) {
                let d2 = dist2(self.ps.point(i as usize), x);
                if d2 <= r2 {
                    f(i as usize, d2);
                }
            }
            if !advance(&mut coord, &lo_c, &hi_c) {
                break;
            }
        }
    }
}

/// Visits every in-grid cell at Chebyshev distance exactly `ring` from `k`.
fn for_each_ring_cell<F: FnMut(&[i64])>(k: &[i64], ring: i64, dims: &[i64], coord: &mut [i64], f: &mut F) {
    let d = k.len();
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for a in 0..d {
        lo[a] = (k[a] - ring).max(0);
        hi[a] = (k[a] + ring).min(dims[a] - 1);
        if lo[a] > hi[a] {
            return;
        }
    }
    coord.copy_from_slice(&lo);
    loop {
        let cheb = coord
            .iter()
            .zip(k)
            .map(|(c, kk)| (c - kk).abs())
            .max()
            .unwrap_or(0);
        if cheb == ring {
            f(coord);
        }
        if !advance(coord, &lo, &hi) {
            break;
        }
    }
}

fn advance(coord: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for a in 0..coord.len() {
        if coord[a] < hi[a] {
            coord[a] += 1;
            return true;
        }
        coord[a] = lo[a];
    }
    false
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
