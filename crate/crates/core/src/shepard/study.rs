//! Convergence sweeps over growing point sets.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::model::{error_budget, model_modulus, sup_error, Dilation, ShepardModel};
use super::modulus::{ModulusKind, TestFunction};
use crate::error::{domain_err, Result};
use crate::pointset::{default_fill_resolution, uniformity_report, PointFamily};

/// Errors below this are treated as exact reproduction and excluded from the
/// slope fit.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    pub probes: usize,
    pub dilation: Dilation,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            probes: 10_000,
            dilation: Dilation::MeasuredFill,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: usize,
    pub q: f64,
    pub h: f64,
    pub beta_n: f64,
    pub sup_error: f64,
    pub bound_paper: f64,
    pub bound_tight: f64,
    /// `sup_error / max(bound_paper, bound_tight)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub family: PointFamily,
    pub function: TestFunction,
    pub kernel: String,
    pub modulus_kind: ModulusKind,
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of `log sup_error` against `log n`; `None` when
    /// fewer than two errors exceed [`EXACT_TOLERANCE`].
    pub slope: Option<f64>,
}

impl StudyRecord {
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// CSV with columns `n,q,h,beta_n,sup_error,bound_paper,bound_tight,ratio`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

/// Fits the operator for every size in `n_list` and compares the measured
/// sup error with the error estimate.
pub fn convergence_study(
    family: &PointFamily,
    f: &TestFunction,
    kernel: &KernelSpec,
    n_list: &[usize],
    options: &StudyOptions,
) -> Result<StudyRecord> {
    if n_list.is_empty() {
        return domain_err("convergence study needs at least one size");
    }
    f.validate(family.dim())?;
    let mut rows = Vec::with_capacity(n_list.len());
    let mut kind = ModulusKind::Exact;
    for &n in n_list {
        let (ps, domain) = family.generate(n)?;
        let model = ShepardModel::fit_function(ps, f, kernel.clone(), domain.clone(), options.dilation)?;
        let resolution = default_fill_resolution(model.points(), &domain);
        let report = uniformity_report(model.points(), &domain, resolution)?;
        let budget = error_budget(&model, &report)?;
        let omega = model_modulus(&model, f)?;
        if omega.kind != ModulusKind::Exact {
            kind = omega.kind;
        }
        let err = sup_error(&model, f, options.probes)?.value;
        let bound_paper = budget.coefficient_closed * omega.value;
        let bound_tight = budget.coefficient_tight * omega.value;
        let bound = bound_paper.max(bound_tight);
        rows.push(StudyRow {
            n: model.len(),
            q: report.q,
            h: report.h,
            beta_n: model.beta_n(),
            sup_error: err,
            bound_paper,
            bound_tight,
            ratio: if bound > 0.0 {
                err / bound
            } else if err == 0.0 {
                0.0
            } else {
                f64::INFINITY
            },
        });
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.sup_error > EXACT_TOLERANCE)
        .map(|r| ((r.n as f64).ln(), r.sup_error.ln()))
        .unzip();
    Ok(StudyRecord {
        family: family.clone(),
        function: f.clone(),
        kernel: kernel.name().to_string(),
        modulus_kind: kind,
        slope: fit_slope(&lx, &ly),
        rows,
    })
}
