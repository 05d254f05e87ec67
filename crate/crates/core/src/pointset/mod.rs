//! Point sets, convex domains and the quality metrics of quasi-uniform data.
//!
//! A point set `𝒳_n ⊂ X` is *well-separated* when its minimal pairwise
//! distance is at least `c n^{-1/d}` and *quasi-uniform* when in addition its
//! fill distance `h = sup_{x∈X} min_y |x - y|` is at most `C n^{-1/d}`. The
//! separation radius `q` is half the minimal distance.

mod counting;
mod generate;
mod index;
mod io;

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Error, Result};

pub use counting::{
    bound_fill_shells, bound_separation_shells, count_annuli, verify_counting_bounds, AnnulusCountReport,
    BoundCheck, BoundKind, CountingVerification, Violation,
};
pub use generate::{
    gen_grid, gen_hexagonal, gen_poisson_disk, hexagonal_domain, poisson_radius_for, PointFamily,
};
pub use index::SpatialIndex;
pub use io::{read_csv, read_csv_path, write_csv, write_csv_path};

/// Relative slack used when deciding whether a point lies in a domain.
const CONTAINS_TOL: f64 = 1e-9;

/// A finite set of distinct points in ℝ^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    label: String,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords, label)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::PointSet("dimension must be at least 1".into()));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::PointSet(format!(
                "need a positive multiple of {dim} coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|v| !v.is_finite()) {
            return Err(Error::PointSet(format!("non-finite coordinate {bad}")));
        }
        let mut seen = HashSet::with_capacity(coords.len() / dim);
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            // +0.0 folds -0.0 onto 0.0
            let key: Vec<u64> = p.iter().map(|v| (v + 0.0).to_bits()).collect();
            if !seen.insert(key) {
                return Err(Error::PointSet(format!("duplicate point at row {i}: {p:?}")));
            }
        }
        Ok(Self {
            dim,
            coords,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Applies `f` to every point; fails if the image has duplicates.
    pub fn map_points<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F) -> Result<Self> {
        let pts: Vec<Vec<f64>> = self.iter().map(f).collect();
        Self::new(self.dim, pts, self.label.clone())
    }

    /// `n^{-1/d}` for this set.
    pub fn mesh_scale(&self) -> f64 {
        (self.len() as f64).powf(-1.0 / self.dim as f64)
    }
}

/// A convex domain: an axis-aligned box or a Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl DomainSpec {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return domain_err("box bounds must be non-empty and of equal length");
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return domain_err(format!("box needs lo < hi on every axis, got {lo:?} / {hi:?}"));
        }
        Ok(Self::Box { lo, hi })
    }

    pub fn unit_box(d: usize) -> Self {
        Self::Box {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn new_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0) || !radius.is_finite() {
            return domain_err("ball needs a center and a positive radius");
        }
        Ok(Self::Ball { center, radius })
    }

    /// Re-runs the constructor checks (useful after deserialization).
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Box { lo, hi } => Self::new_box(lo.clone(), hi.clone()).map(|_| ()),
            Self::Ball { center, radius } => Self::new_ball(center.clone(), *radius).map(|_| ()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box { lo, .. } => lo.len(),
            Self::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_box(&self) -> bool {
        matches!(self, Self::Box { .. })
    }

    /// Bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::Box { lo, hi } => (lo.clone(), hi.clone()),
            Self::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Self::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt(),
            Self::Ball { radius, .. } => 2.0 * radius,
        }
    }

    fn scale(&self) -> f64 {
        self.diameter().max(1.0)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = CONTAINS_TOL * self.scale();
        match self {
            Self::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *v >= a - tol && *v <= b + tol),
            Self::Ball { center, radius } => index::dist2(x, center).sqrt() <= radius + tol,
        }
    }

    /// Largest distance from `x` to a point of the domain.
    pub fn farthest_distance(&self, x: &[f64]) -> f64 {
        match self {
            Self::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (a, b))| {
                    let m = (v - a).abs().max((b - v).abs());
                    m * m
                })
                .sum::<f64>()
                .sqrt(),
            Self::Ball { center, radius } => index::dist2(x, center).sqrt() + radius,
        }
    }

    /// Probe grid with spacing at most `resolution` on every axis.
    pub fn probe_grid(&self, resolution: f64) -> Result<ProbeGrid> {
        ProbeGrid::new(self.clone(), resolution)
    }

    /// Probe grid with roughly `count` nodes in total.
    pub fn probe_grid_with_count(&self, count: usize) -> Result<ProbeGrid> {
        let (lo, hi) = self.bounds();
        let d = self.dim() as f64;
        let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let per_axis = (count.max(1) as f64).powf(1.0 / d);
        let res = vol.powf(1.0 / d) / (per_axis - 1.0).max(1.0);
        ProbeGrid::new(self.clone(), res)
    }
}

/// Regular probe lattice over a domain.
///
/// For a box the lattice includes all faces and corners. For a ball the
/// lattice of its bounding box is used; nodes outside the ball but within one
/// cell diagonal are projected radially onto the sphere, and farther nodes
/// are dropped. Either way every domain point lies within
/// [`ProbeGrid::cover_radius`] of some probe.
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    domain: DomainSpec,
    lo: Vec<f64>,
    step: Vec<f64>,
    counts: Vec<usize>,
    total: usize,
    cover: f64,
}

impl ProbeGrid {
    pub fn new(domain: DomainSpec, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return domain_err(format!("probe resolution must be positive, got {resolution}"));
        }
        let (lo, hi) = domain.bounds();
        let mut counts = Vec::with_capacity(lo.len());
        let mut step = Vec::with_capacity(lo.len());
        for (a, b) in lo.iter().zip(&hi) {
            let cells = ((b - a) / resolution).ceil().max(1.0) as usize;
            counts.push(cells + 1);
            step.push((b - a) / cells as f64);
        }
        let total = counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&t| t as u64 <= 1 << 34)
            .ok_or_else(|| Error::Domain("probe grid too large".into()))?;
        let cover = 0.5 * step.iter().map(|s| s * s).sum::<f64>().sqrt();
        Ok(Self {
            domain,
            lo,
            step,
            counts,
            total,
            cover,
        })
    }

    /// Number of lattice nodes (before ball filtering).
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Every domain point is within this distance of a probe.
    pub fn cover_radius(&self) -> f64 {
        self.cover
    }

    /// Writes node `k` into `out`; returns false if the node is dropped.
    pub fn node(&self, mut k: usize, out: &mut [f64]) -> bool {
        for a in 0..self.counts.len() {
            let i = k % self.counts[a];
            k /= self.counts[a];
            out[a] = if i + 1 == self.counts[a] {
                // exact upper face
                self.lo[a] + self.step[a] * (self.counts[a] - 1) as f64
            } else {
                self.lo[a] + self.step[a] * i as f64
            };
        }
        match &self.domain {
            DomainSpec::Box { hi, .. } => {
                for (v, h) in out.iter_mut().zip(hi) {
                    *v = v.min(*h);
                }
                true
            }
            DomainSpec::Ball { center, radius } => {
                let r = index::dist2(out, center).sqrt();
                if r <= *radius {
                    true
                } else if r <= radius + 2.0 * self.cover {
                    for (v, c) in out.iter_mut().zip(center) {
                        *v = c + (*v - c) * radius / r;
                    }
                    true
                } else {
                    false
                }
            }
        }
    }

    /// Collects all retained probes.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let d = self.counts.len();
        let mut buf = vec![0.0; d];
        (0..self.total)
            .filter_map(|k| {
                if self.node(k, &mut buf) {
                    Some(buf.clone())
                } else {
                    None
                }
            })
            .collect()
    }

    /// Parallel max of `f` over retained probes (order-independent).
    pub fn par_max<F>(&self, f: F) -> Option<(f64, Vec<f64>)>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let d = self.counts.len();
        (0..self.total)
            .into_par_iter()
            .map_init(
                || vec![0.0; d],
                |buf, k| {
                    if self.node(k, buf) {
                        Some((f(buf), k))
                    } else {
                        None
                    }
                },
            )
            .flatten()
            .reduce_with(|a, b| {
                // ties resolved by node index so the argmax is reproducible
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            })
            .map(|(v, k)| {
                let mut buf = vec![0.0; d];
                self.node(k, &mut buf);
                (v, buf)
            })
    }
}

/// Half the minimal pairwise distance.
pub fn separation_radius(ps: &PointSet) -> Result<f64> {
    if ps.len() < 2 {
        return Err(Error::PointSet(
            "separation radius needs at least two points".into(),
        ));
    }
    let idx = SpatialIndex::new(ps);
    let min = (0..ps.len())
        .into_par_iter()
        .map(|i| {
            idx.nearest(ps.point(i), Some(i))
                .map(|(_, d)| d)
                .unwrap_or(f64::INFINITY)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(0.5 * min)
}

/// O(n²) reference for [`separation_radius`].
pub fn separation_radius_brute(ps: &PointSet) -> Result<f64> {
    if ps.len() < 2 {
        return Err(Error::PointSet(
            "separation radius needs at least two points".into(),
        ));
    }
    let mut min = f64::INFINITY;
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            min = min.min(index::dist2(ps.point(i), ps.point(j)));
        }
    }
    Ok(0.5 * min.sqrt())
}

fn check_inside(ps: &PointSet, domain: &DomainSpec) -> Result<()> {
    if domain.dim() != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: ps.dim(),
        });
    }
    if let Some((i, p)) = ps.iter().enumerate().find(|(_, p)| !domain.contains(p)) {
        return Err(Error::PointSet(format!(
            "point {i} = {p:?} lies outside the domain"
        )));
    }
    Ok(())
}

/// Largest number of probes [`default_fill_resolution`] will ask for.
pub const MAX_FILL_PROBES: usize = 1 << 22;

/// Default probe spacing for fill-distance estimates: `q/4`, coarsened when
/// that would need more than [`MAX_FILL_PROBES`] probes. Single points use
/// 1/64 of the domain diameter.
pub fn default_fill_resolution(ps: &PointSet, domain: &DomainSpec) -> f64 {
    let (lo, hi) = domain.bounds();
    let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let coarsest = (volume / MAX_FILL_PROBES as f64).powf(1.0 / domain.dim() as f64);
    match separation_radius(ps) {
        Ok(q) => (0.25 * q).max(coarsest),
        Err(_) => domain.diameter() / 64.0,
    }
}

/// Probe estimate of the fill distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillDistance {
    /// Max over probes of the distance to the nearest data point; a lower
    /// bound on the true fill distance.
    pub value: f64,
    /// The true fill distance is at most `value + error_bound`.
    pub error_bound: f64,
    /// The probe attaining `value`.
    pub witness: Vec<f64>,
}

/// Max over a probe grid of the nearest-point distance. Never exceeds the
/// true fill distance and undershoots it by at most
/// `probe_resolution · √d / 2`.
pub fn fill_distance(ps: &PointSet, domain: &DomainSpec, probe_resolution: f64) -> Result<f64> {
    Ok(fill_distance_detailed(ps, domain, probe_resolution)?.value)
}

pub fn fill_distance_detailed(
    ps: &PointSet,
    domain: &DomainSpec,
    probe_resolution: f64,
) -> Result<FillDistance> {
    check_inside(ps, domain)?;
    let grid = domain.probe_grid(probe_resolution)?;
    let idx = SpatialIndex::new(ps);
    let (value, witness) = grid
        .par_max(|x| idx.nearest(x, None).map(|(_, d)| d).unwrap_or(0.0))
        .ok_or_else(|| Error::Domain("domain produced no probes".into()))?;
    Ok(FillDistance {
        value,
        error_bound: grid.cover_radius(),
        witness,
    })
}

/// Measured uniformity constants of a point set in a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub n: usize,
    pub d: usize,
    /// Separation radius (exact).
    pub q: f64,
    /// Fill distance, a lower bound within `fill_error_bound` of the truth.
    pub h: f64,
    /// h / q.
    pub rho: f64,
    /// Tightest `c` with min distance ≥ c n^{-1/d}: 2 q n^{1/d}.
    #[serde(rename = "c_est")]
    pub c_sep: f64,
    /// Tightest `C` with h ≤ C n^{-1/d}: h n^{1/d}.
    #[serde(rename = "C_est")]
    pub c_fill: f64,
    pub probe_resolution: f64,
    pub fill_error_bound: f64,
}

/// Measures `q`, `h` and the implied constants.
///
/// The probe estimate of `h` is raised to `q` when it falls below: for a
/// convex domain the midpoint of a closest pair lies in the domain at
/// distance exactly `q` from the data, so `q` is itself a lower bound.
pub fn uniformity_report(
    ps: &PointSet,
    domain: &DomainSpec,
    probe_resolution: f64,
) -> Result<UniformityReport> {
    let q = separation_radius(ps)?;
    let fill = fill_distance_detailed(ps, domain, probe_resolution)?;
    let h = fill.value.max(q);
    let n = ps.len();
    let root = (n as f64).powf(1.0 / ps.dim() as f64);
    let report = UniformityReport {
        n,
        d: ps.dim(),
        q,
        h,
        rho: h / q,
        c_sep: 2.0 * q * root,
        c_fill: h * root,
        probe_resolution,
        fill_error_bound: fill.error_bound,
    };
    debug_assert!(report.h >= report.q && report.c_fill >= 0.5 * report.c_sep);
    Ok(report)
}
