//! Quasi-uniform point families: regular grids, the hexagonal lattice and
//! maximal Poisson-disk samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::index::dist2;
use super::{DomainSpec, PointSet};
use crate::error::{domain_err, Result};
use crate::geometry::sample_ball;
use crate::specfun::ball_volume;

/// Cell-centred lattice with `per_axis` points per axis.
///
/// On a cube of side `s` the spacing is `a = s / per_axis`, `q = a/2` and
/// `h = a√d/2` (the cell corners).
pub fn gen_grid(d: usize, per_axis: usize, domain: &DomainSpec) -> Result<PointSet> {
    let DomainSpec::Box { lo, hi } = domain else {
        return domain_err("grid generation needs a box domain");
    };
    if lo.len() != d {
        return domain_err(format!("domain has dimension {}, asked for {d}", lo.len()));
    }
    if per_axis == 0 {
        return domain_err("grid needs at least one point per axis");
    }
    let total = per_axis
        .checked_pow(d as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| crate::Error::Domain("grid too large".into()))?;
    let steps: Vec<f64> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| (b - a) / per_axis as f64)
        .collect();
    let mut coords = Vec::with_capacity(total * d);
    for mut k in 0..total {
        for a in 0..d {
            let i = k % per_axis;
            k /= per_axis;
            coords.push(lo[a] + (i as f64 + 0.5) * steps[a]);
        }
    }
    PointSet::from_flat(d, coords, format!("grid d={d} per_axis={per_axis}"))
}

/// The box `[0, √3] × [0, 2]`: one period of the hexagonal lattice at unit
/// scale, so that for `n = m²` exactly `m²` lattice cells fit and the clipped
/// lattice keeps `q = n^{-1/2}` and `h = (2/√3) n^{-1/2}` up to the boundary.
pub fn hexagonal_domain() -> DomainSpec {
    DomainSpec::Box {
        lo: vec![0.0, 0.0],
        hi: vec![3f64.sqrt(), 2.0],
    }
}

/// Hexagonal lattice generated by the columns of
/// `n^{-1/2} [[√3, 0], [-1, 2]]`, clipped (closed) to a planar box.
pub fn gen_hexagonal(n_target: usize, domain: &DomainSpec) -> Result<PointSet> {
    let DomainSpec::Box { lo, hi } = domain else {
        return domain_err("hexagonal lattice needs a box domain");
    };
    if lo.len() != 2 {
        return domain_err("hexagonal lattice is planar (d = 2)");
    }
    if n_target == 0 {
        return domain_err("hexagonal lattice needs n >= 1");
    }
    let s = 1.0 / (n_target as f64).sqrt();
    let col = 3f64.sqrt() * s;
    let eps = 1e-9 * s;
    let k1_lo = ((lo[0] - eps) / col).ceil() as i64;
    let k1_hi = ((hi[0] + eps) / col).floor() as i64;
    let mut coords = Vec::new();
    for k1 in k1_lo..=k1_hi {
        let x = (k1 as f64 * col).clamp(lo[0], hi[0]);
        // y = s (2 k2 - k1)
        let k2_lo = (((lo[1] - eps) / s + k1 as f64) / 2.0).ceil() as i64;
        let k2_hi = (((hi[1] + eps) / s + k1 as f64) / 2.0).floor() as i64;
        for k2 in k2_lo..=k2_hi {
            let y = (s * (2 * k2 - k1) as f64).clamp(lo[1], hi[1]);
            coords.push(x);
            coords.push(y);
        }
    }
    if coords.is_empty() {
        return domain_err("domain too small to hold a lattice point");
    }
    PointSet::from_flat(2, coords, format!("hexagonal n={n_target}"))
}

/// Maximal Poisson-disk sample with pairwise distances `>= min_dist`.
///
/// Bridson's dart throwing seeds the sample; a sweep over a lattice of
/// spacing `min_dist/4` then inserts every lattice node still farther than
/// `min_dist` from the sample, which makes the result maximal on that
/// lattice: every probe node is within `min_dist` of a point.
pub fn gen_poisson_disk(d: usize, min_dist: f64, domain: &DomainSpec, seed: u64) -> Result<PointSet> {
    if domain.dim() != d {
        return domain_err(format!("domain has dimension {}, asked for {d}", domain.dim()));
    }
    if !(min_dist > 0.0) || !min_dist.is_finite() {
        return domain_err(format!("min_dist must be positive, got {min_dist}"));
    }
    let (lo, hi) = domain.bounds();
    let cell = min_dist / (d as f64).sqrt();
    let dims: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| ((b - a) / cell).floor() as usize + 1)
        .collect();
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .filter(|&t| t <= 1 << 28)
        .ok_or_else(|| crate::Error::Domain("min_dist too small for this domain".into()))?;
    let mut grid = DiskGrid {
        lo: lo.clone(),
        cell,
        dims,
        slots: vec![u32::MAX; total],
        coords: Vec::new(),
        d,
        r2: min_dist * min_dist,
        reach: (d as f64).sqrt().ceil() as i64,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x = vec![0.0; d];
    loop {
        for a in 0..d {
            x[a] = lo[a] + rng.random::<f64>() * (hi[a] - lo[a]);
        }
        if domain.contains(&x) {
            break;
        }
    }
    grid.insert(&x);
    let mut active = vec![0usize];
    const ATTEMPTS: usize = 30;
    let mut cand = vec![0.0; d];
    let origin = vec![0.0; d];
    while !active.is_empty() {
        let slot = rng.random_range(0..active.len());
        let base: Vec<f64> = grid.point(active[slot]).to_vec();
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            // direction from a ball sample, radius uniform in [r, 2r]
            sample_ball(&mut rng, &origin, 1.0, &mut cand);
            let norm = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let rad = min_dist * (1.0 + rng.random::<f64>());
            for a in 0..d {
                cand[a] = base[a] + cand[a] / norm * rad;
            }
            if domain.contains(&cand) && grid.is_free(&cand) {
                let id = grid.insert(&cand);
                active.push(id);
                placed = true;
                break;
            }
        }
        if !placed {
            active.swap_remove(slot);
        }
    }

    let sweep = domain.probe_grid(min_dist / 4.0)?;
    let mut probe = vec![0.0; d];
    for k in 0..sweep.len() {
        if sweep.node(k, &mut probe) && domain.contains(&probe) && grid.is_free(&probe) {
            grid.insert(&probe);
        }
    }
    PointSet::from_flat(d, grid.coords, format!("poisson d={d} r={min_dist} seed={seed}"))
}

/// Background grid with cell diagonal `r`, so each cell holds at most one point.
struct DiskGrid {
    lo: Vec<f64>,
    cell: f64,
    dims: Vec<usize>,
    slots: Vec<u32>,
    coords: Vec<f64>,
    d: usize,
    r2: f64,
    reach: i64,
}

impl DiskGrid {
    fn cell_of(&self, x: &[f64]) -> Vec<i64> {
        x.iter()
            .zip(&self.lo)
            .zip(&self.dims)
            .map(|((v, l), &n)| (((v - l) / self.cell).floor() as i64).clamp(0, n as i64 - 1))
            .collect()
    }

    fn flat(&self, c: &[i64]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (k, &n) in c.iter().zip(&self.dims) {
            idx += *k as usize * stride;
            stride *= n;
        }
        idx
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    fn is_free(&self, x: &[f64]) -> bool {
        let c = self.cell_of(x);
        let lo: Vec<i64> = c.iter().map(|v| (v - self.reach).max(0)).collect();
        let hi: Vec<i64> = c
            .iter()
            .zip(&self.dims)
            .map(|(v, &n)| (v + self.reach).min(n as i64 - 1))
            .collect();
        let mut cur = lo.clone();
        loop {
            let id = self.slots[self.flat(&cur)];
            if id != u32::MAX && dist2(self.point(id as usize), x) < self.r2 {
                return false;
            }
            let mut a = 0;
            loop {
                if a == self.d {
                    return true;
                }
                if cur[a] < hi[a] {
                    cur[a] += 1;
                    break;
                }
                cur[a] = lo[a];
                a += 1;
            }
        }
    }

    fn insert(&mut self, x: &[f64]) -> usize {
        let id = self.coords.len() / self.d;
        let c = self.cell_of(x);
        let f = self.flat(&c);
        debug_assert_eq!(self.slots[f], u32::MAX);
        self.slots[f] = id as u32;
        self.coords.extend_from_slice(x);
        id
    }
}

/// A generator of quasi-uniform sets indexed by (approximate) size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PointFamily {
    /// `round(n^{1/d})` points per axis on the unit cube.
    Grid { d: usize },
    /// Hexagonal lattice at scale `n` on [`hexagonal_domain`].
    Hexagonal,
    /// Maximal Poisson-disk sample on the unit cube with radius tuned to give
    /// roughly `n` points.
    PoissonDisk { d: usize, seed: u64 },
}

impl PointFamily {
    pub fn dim(&self) -> usize {
        match self {
            Self::Grid { d } | Self::PoissonDisk { d, .. } => *d,
            Self::Hexagonal => 2,
        }
    }

    pub fn domain(&self) -> DomainSpec {
        match self {
            Self::Hexagonal => hexagonal_domain(),
            _ => DomainSpec::unit_box(self.dim()),
        }
    }

    pub fn generate(&self, n: usize) -> Result<(PointSet, DomainSpec)> {
        let domain = self.domain();
        let ps = match self {
            Self::Grid { d } => {
                let per_axis = (n as f64).powf(1.0 / *d as f64).round().max(1.0) as usize;
                gen_grid(*d, per_axis, &domain)?
            }
            Self::Hexagonal => gen_hexagonal(n, &domain)?,
            Self::PoissonDisk { d, seed } => gen_poisson_disk(*d, poisson_radius_for(*d, n), &domain, *seed)?,
        };
        Ok((ps, domain))
    }
}

/// Radius giving about `n` points in a unit cube, from typical saturation
/// packing fractions of maximal disk samples.
pub fn poisson_radius_for(d: usize, n: usize) -> f64 {
    let fraction = match d {
        1 => 0.75,
        2 => 0.58,
        3 => 0.40,
        _ => 0.40 * 0.7f64.powi(d as i32 - 3),
    };
    let unit = ball_volume(d as u32, 1.0);
    2.0 * (fraction / (n.max(1) as f64 * unit)).powf(1.0 / d as f64)
}
