//! Occupancy of concentric annuli and the two packing bounds on it.
//!
//! Two indexing conventions meet here. The main bound counts shells
//! `(j-1)t ≤ |y-x| < jt` for `j ≥ 1` (shell 1 is a ball) with `t = C n^{-1/d}`.
//! The separation-radius bound uses shells of thickness `δ = q` with inner
//! radius `jδ`, i.e. `jδ ≤ |y-x| < (j+1)δ`, and only applies for `j ≥ 1`.
//! [`BoundCheck::index_base`] records which convention a record uses.

use serde::{Deserialize, Serialize};

use super::{DomainSpec, PointSet, UniformityReport};
use crate::error::{domain_err, Error, Result};
use crate::geometry::dist;
use crate::shepard::constant_k_d;

/// Exact shell counts around one center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusCountReport {
    pub center: Vec<f64>,
    pub thickness: f64,
    /// `counts[j-1]` = number of points with `(j-1)t ≤ |y - center| < jt`.
    pub counts: Vec<u32>,
    /// `bound_fill_shells[j-1]`, filled by [`AnnulusCountReport::attach_fill_bounds`].
    #[serde(default)]
    pub bound_fill_shells: Vec<f64>,
    #[serde(default)]
    pub bound_separation_shells: Option<Vec<f64>>,
}

impl AnnulusCountReport {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Fills `bound_fill_shells` for every counted shell.
    pub fn attach_fill_bounds(&mut self, d: u32, c: f64, big_c: f64) -> Result<()> {
        self.bound_fill_shells = (1..=self.counts.len() as u32)
            .map(|j| bound_fill_shells(d, c, big_c, j))
            .collect::<Result<_>>()?;
        Ok(())
    }
}

/// Counts points per half-open shell around `center`.
pub fn count_annuli(ps: &PointSet, center: &[f64], thickness: f64) -> Result<AnnulusCountReport> {
    if center.len() != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: ps.dim(),
            found: center.len(),
        });
    }
    if !(thickness > 0.0) || !thickness.is_finite() {
        return domain_err(format!("annulus thickness must be positive, got {thickness}"));
    }
    let mut counts: Vec<u32> = Vec::new();
    for p in ps.iter() {
        let j = (dist(p, center) / thickness).floor() as usize;
        if j >= counts.len() {
            counts.resize(j + 1, 0);
        }
        counts[j] += 1;
    }
    Ok(AnnulusCountReport {
        center: center.to_vec(),
        thickness,
        counts,
        bound_fill_shells: Vec::new(),
        bound_separation_shells: None,
    })
}

/// `K_d [j^d - (j-1)^d]` with `K_d = 2^{(3d+3)/2} (C/c)^d`.
pub fn bound_fill_shells(d: u32, c: f64, big_c: f64, j: u32) -> Result<f64> {
    if d == 0 || j == 0 {
        return domain_err("dimension and shell index start at 1");
    }
    if !(c > 0.0 && big_c > 0.0) || c > 2.0 * big_c {
        return domain_err(format!("need 0 < c <= 2C, got c = {c}, C = {big_c}"));
    }
    let jf = j as f64;
    let df = d as f64;
    Ok(constant_k_d(d, c, big_c) * (jf.powf(df) - (jf - 1.0).powf(df)))
}

/// `2d j^{d-1} exp((5d-3)/(4j-1))`, the bound for the shell of thickness `δ`
/// and inner radius `jδ`.
pub fn bound_separation_shells(d: u32, j: u32) -> f64 {
    let df = d as f64;
    let jf = j as f64;
    2.0 * df * jf.powf(df - 1.0) * ((5.0 * df - 3.0) / (4.0 * jf - 1.0)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Shells of thickness `C n^{-1/d}`, outer radius `jC n^{-1/d}`.
    FillShells,
    /// Shells of thickness `q`, inner radius `jq`.
    SeparationShells,
}

/// One shell whose count exceeded its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub j: u32,
    pub count: u32,
    pub bound: f64,
}

/// Checked counts around one center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub center: Vec<f64>,
    pub thickness: f64,
    /// Shell index of `counts[0]`: 1 for the fill-shell bound, 0 for the separation-shell bound.
    pub index_base: u32,
    pub counts: Vec<u32>,
    /// `None` where the bound does not apply (the central ball for the separation-shell bound).
    pub bounds: Vec<Option<f64>>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingVerification {
    pub n: usize,
    pub d: usize,
    pub c_est: f64,
    #[serde(rename = "C_est")]
    pub c_fill: f64,
    pub records: Vec<BoundCheck>,
}

impl CountingVerification {
    pub fn violation_count(&self) -> usize {
        self.records.iter().map(|r| r.violations.len()).sum()
    }

    pub fn violations(&self) -> impl Iterator<Item = (&BoundCheck, &Violation)> {
        self.records
            .iter()
            .flat_map(|r| r.violations.iter().map(move |v| (r, v)))
    }
}

/// Checks both packing bounds around every center (centers must lie in the
/// domain).
///
/// The main bound uses thickness `C_est n^{-1/d}` (the measured fill
/// distance) and constants `(c_est, C_est)`; the second uses thickness `q`.
/// Violations are returned as data.
pub fn verify_counting_bounds(
    ps: &PointSet,
    domain: &DomainSpec,
    report: &UniformityReport,
    centers: &[Vec<f64>],
) -> Result<CountingVerification> {
    if let Some(c) = centers
        .iter()
        .find(|c| c.len() != ps.dim() || !domain.contains(c))
    {
        return domain_err(format!("annulus center {c:?} is not a point of the domain"));
    }
    let d = ps.dim() as u32;
    let thickness = report.c_fill * ps.mesh_scale();
    let mut records = Vec::with_capacity(2 * centers.len());
    for center in centers {
        let main = count_annuli(ps, center, thickness)?;
        let mut bounds = Vec::with_capacity(main.counts.len());
        let mut violations = Vec::new();
        for (k, &count) in main.counts.iter().enumerate() {
            let j = k as u32 + 1;
            let b = bound_fill_shells(d, report.c_sep, report.c_fill, j)?;
            if count as f64 > b {
                violations.push(Violation { j, count, bound: b });
            }
            bounds.push(Some(b));
        }
        records.push(BoundCheck {
            kind: BoundKind::FillShells,
            center: center.clone(),
            thickness,
            index_base: 1,
            counts: main.counts,
            bounds,
            violations,
        });

        let thin = count_annuli(ps, center, report.q)?;
        let mut bounds = Vec::with_capacity(thin.counts.len());
        let mut violations = Vec::new();
        for (j, &count) in thin.counts.iter().enumerate() {
            let j = j as u32;
            if j == 0 {
                bounds.push(None);
                continue;
            }
            let b = bound_separation_shells(d, j);
            if count as f64 > b {
                violations.push(Violation { j, count, bound: b });
            }
            bounds.push(Some(b));
        }
        records.push(BoundCheck {
            kind: BoundKind::SeparationShells,
            center: center.clone(),
            thickness: report.q,
            index_base: 0,
            counts: thin.counts,
            bounds,
            violations,
        });
    }
    Ok(CountingVerification {
        n: ps.len(),
        d: ps.dim(),
        c_est: report.c_sep,
        c_fill: report.c_fill,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fill_shell_examples() {
        let k = 2f64.powf(4.5);
        assert_relative_eq!(
            bound_fill_shells(2, 1.0, 1.0, 1).unwrap(),
            k,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bound_fill_shells(2, 1.0, 1.0, 2).unwrap(),
            3.0 * k,
            max_relative = 1e-14
        );
        let b1 = bound_fill_shells(3, 0.7, 1.1, 1).unwrap();
        let b5 = bound_fill_shells(3, 0.7, 1.1, 5).unwrap();
        assert_relative_eq!(b5 / b1, 125.0 - 64.0, max_relative = 1e-13);
        assert!(bound_fill_shells(2, 3.0, 1.0, 1).is_err());
        assert!(bound_fill_shells(2, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn separation_shell_examples() {
        assert_relative_eq!(
            bound_separation_shells(2, 10),
            40.0 * (7.0f64 / 39.0).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bound_separation_shells(1, 1),
            2.0 * (2.0f64 / 3.0).exp(),
            max_relative = 1e-14
        );
        let j = 100_000;
        assert_relative_eq!(
            bound_separation_shells(3, j) / (6.0 * (j as f64).powi(2)),
            1.0,
            max_relative = 1e-3
        );
    }

    #[test]
    fn half_open_shells() {
        let ps = PointSet::new(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.5], vec![2.5, 0.0]],
            "pts",
        )
        .unwrap();
        let r = count_annuli(&ps, &[0.0, 0.0], 1.0).unwrap();
        assert_eq!(r.counts, vec![2, 1, 1]);
        assert_eq!(r.total(), 4);
        assert!(count_annuli(&ps, &[0.0], 1.0).is_err());
        assert!(count_annuli(&ps, &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn single_point_within_k_d() {
        for d in 1..=6u32 {
            let ps = PointSet::new(d as usize, vec![vec![0.25; d as usize]], "one").unwrap();
            let mut r = count_annuli(&ps, &vec![0.25; d as usize], 0.1).unwrap();
            r.attach_fill_bounds(d, 1.0, 1.0).unwrap();
            assert_eq!(r.counts, vec![1]);
            assert!(r.bound_fill_shells[0] >= 8.0);
        }
    }
}
