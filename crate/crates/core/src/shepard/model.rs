//! The fitted operator, its error budget and sampled error measurements.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::constants::{constant_c_alpha_d, constant_c_star, constant_k_d, ConstantPair};
use super::kernel::{KernelDescriptor, KernelSpec};
use super::modulus::{modulus_of_continuity, Modulus, ModulusMode, TestFunction};
use crate::error::{domain_err, Error, Result};
use crate::pointset::{
    default_fill_resolution, fill_distance_detailed, separation_radius, DomainSpec, PointSet, SpatialIndex,
    UniformityReport,
};

/// How the dilation `β_n = n^{1/d} / C` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dilation {
    /// `C = h n^{1/d}` with `h` the measured fill distance (the larger of the
    /// probe estimate and `q`), so `β_n h = 1`.
    MeasuredFill,
    /// Smallest `C` for which `β_n h ≤ 1` is certified: `C = (h̃ + ε) n^{1/d}`,
    /// where `h̃` is the probe estimate of the fill distance and `ε` its
    /// maximal undershoot.
    Certified,
    /// A fixed `C`; rejected when `C n^{-1/d}` is below the measured fill
    /// distance.
    Constant { c: f64 },
}

/// Scaled Shepard operator
/// `F(x) = Σ f(y) K(β(x-y)) / Σ K(β(x-y))` on a fixed point set.
#[derive(Debug, Clone)]
pub struct ShepardModel {
    index: SpatialIndex<'static>,
    values: Vec<f64>,
    kernel: KernelSpec,
    domain: DomainSpec,
    beta_n: f64,
    c_used: f64,
    h_measured: f64,
    f_min: f64,
    f_max: f64,
    truncation: Option<f64>,
}

impl ShepardModel {
    /// Builds the operator for data `values[i] = f(points[i])`.
    pub fn fit(
        points: PointSet,
        values: Vec<f64>,
        kernel: KernelSpec,
        domain: DomainSpec,
        dilation: Dilation,
    ) -> Result<Self> {
        if values.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return domain_err(format!("data values must be finite, got {v}"));
        }
        domain.validate()?;
        let n = points.len() as f64;
        let root = n.powf(1.0 / points.dim() as f64);
        if domain.dim() != points.dim() {
            return Err(Error::DimensionMismatch {
                expected: points.dim(),
                found: domain.dim(),
            });
        }
        let q = separation_radius(&points).ok();
        let resolution = default_fill_resolution(&points, &domain);
        let fill = fill_distance_detailed(&points, &domain, resolution)?;
        let h = q.map_or(fill.value, |q| fill.value.max(q));
        let c_used = match dilation {
            Dilation::MeasuredFill => h * root,
            Dilation::Certified => (fill.value + fill.error_bound) * root,
            Dilation::Constant { c } => {
                if !(c > 0.0 && c.is_finite()) {
                    return domain_err(format!("fill constant must be positive, got {c}"));
                }
                if c / root < h * (1.0 - 1e-12) {
                    return Err(Error::Hypothesis(format!(
                        "C = {c} gives C n^(-1/d) = {} below the measured fill distance {h}",
                        c / root
                    )));
                }
                c
            }
        };
        let (f_min, f_max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        Ok(Self {
            index: SpatialIndex::owned(points),
            values,
            kernel,
            domain,
            beta_n: root / c_used,
            c_used,
            h_measured: h,
            f_min,
            f_max,
            truncation: None,
        })
    }

    /// Samples `f` on the points and fits.
    pub fn fit_function(
        points: PointSet,
        f: &TestFunction,
        kernel: KernelSpec,
        domain: DomainSpec,
        dilation: Dilation,
    ) -> Result<Self> {
        f.validate(points.dim())?;
        let values = points.iter().map(|p| f.eval(p)).collect();
        Self::fit(points, values, kernel, domain, dilation)
    }

    /// Ignores data farther than `radius / β_n` from the evaluation point.
    /// The normalizer then changes by at most [`Self::truncation_error_bound`].
    pub fn with_truncation(mut self, radius: Option<f64>) -> Result<Self> {
        if let Some(r) = radius {
            if !(r > 1.0) {
                return domain_err(format!("truncation radius must exceed 1, got {r}"));
            }
        }
        self.truncation = radius;
        Ok(self)
    }

    /// `n κ (1 + R²)^{-α}`, or 0 without truncation.
    pub fn truncation_error_bound(&self) -> f64 {
        match self.truncation {
            Some(r) => self.len() as f64 * self.kernel.envelope_r2(r * r),
            None => 0.0,
        }
    }

    pub fn points(&self) -> &PointSet {
        self.index.point_set()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn beta_n(&self) -> f64 {
        self.beta_n
    }

    pub fn c_used(&self) -> f64 {
        self.c_used
    }

    /// The fill distance measured at fit time.
    pub fn h_measured(&self) -> f64 {
        self.h_measured
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points().dim()
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        if !self.domain.contains(x) {
            return domain_err(format!("{x:?} is outside the domain"));
        }
        Ok(())
    }

    /// Calls `g(i, K(β(x - y_i)))` for every contributing point.
    #[inline]
    fn for_each_weight<G: FnMut(usize, f64)>(&self, x: &[f64], mut g: G) {
        let b2 = self.beta_n * self.beta_n;
        match self.truncation {
            Some(r) => self
                .index
                .for_each_within(x, r / self.beta_n, |i, d2| g(i, self.kernel.eval_r2(b2 * d2))),
            None => {
                let ps = self.points();
                let d = ps.dim();
                for (i, y) in ps.coords().chunks_exact(d).enumerate() {
                    let d2: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    g(i, self.kernel.eval_r2(b2 * d2));
                }
            }
        }
    }

    /// `S(x) = Σ_y K(β_n (x - y))`.
    pub fn scaled_sum(&self, x: &[f64]) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.scaled_sum_unchecked(x))
    }

    pub(crate) fn scaled_sum_unchecked(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        self.for_each_weight(x, |_, k| s += k);
        s
    }

    /// `F(x)`; always within `[min f, max f]` and exact on constants.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_x(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        // Centering at min f makes constants exact and every term nonnegative.
        let mut s = 0.0;
        let mut t = 0.0;
        self.for_each_weight(x, |i, k| {
            s += k;
            t += k * (self.values[i] - self.f_min);
        });
        if s == 0.0 {
            // every kernel value underflowed; only possible far outside the
            // hypotheses
            return f64::NAN;
        }
        (self.f_min + t / s).clamp(self.f_min, self.f_max)
    }

    /// The convex weights `K(β(x - y_i)) / S(x)`, one per data point.
    pub fn weights(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        let mut w = vec![0.0; self.len()];
        let mut s = 0.0;
        self.for_each_weight(x, |i, k| {
            w[i] = k;
            s += k;
        });
        for v in &mut w {
            *v /= s;
        }
        Ok(w)
    }

    /// Serializable form; points are referenced by file name, not embedded.
    pub fn export(&self, points_csv: impl Into<String>) -> Result<ModelExport> {
        let kernel = self.kernel.descriptor().cloned().ok_or_else(|| {
            Error::Kernel(format!("custom kernel {} cannot be exported", self.kernel.name()))
        })?;
        Ok(ModelExport {
            points_csv: points_csv.into(),
            kernel,
            kappa: self.kernel.kappa(),
            m1: self.kernel.m1(),
            beta_n: self.beta_n,
            c_used: self.c_used,
            values: self.values.clone(),
            domain: self.domain.clone(),
            truncation_radius: self.truncation,
        })
    }

    /// Rebuilds a model from an export and its point set, keeping the stored
    /// dilation.
    pub fn import(export: &ModelExport, points: PointSet) -> Result<Self> {
        let kernel = export.kernel.build()?;
        let n = points.len() as f64;
        let root = n.powf(1.0 / points.dim() as f64);
        if ((root / export.c_used) / export.beta_n - 1.0).abs() > 1e-12 {
            return domain_err("exported beta_n and C_used are inconsistent with the point count");
        }
        let mut model = Self::fit(
            points,
            export.values.clone(),
            kernel,
            export.domain.clone(),
            Dilation::Constant { c: export.c_used },
        )?;
        model.truncation = export.truncation_radius;
        Ok(model)
    }
}

/// JSON model export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelExport {
    pub points_csv: String,
    pub kernel: KernelDescriptor,
    pub kappa: f64,
    pub m1: f64,
    pub beta_n: f64,
    #[serde(rename = "C_used")]
    pub c_used: f64,
    pub values: Vec<f64>,
    pub domain: DomainSpec,
    #[serde(default)]
    pub truncation_radius: Option<f64>,
}

impl ModelExport {
    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// The constants of the uniform error estimate
/// `sup |F - f| ≤ κ m1^{-1} (C+1) K_d C* ω(f, n^{-1/d})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub kappa: f64,
    pub m1: f64,
    pub c_est: f64,
    #[serde(rename = "C_used")]
    pub c_used: f64,
    pub k_d: f64,
    pub c_alpha_d: ConstantPair,
    pub c_star: ConstantPair,
    /// Upper bound on `sup S(x)`: `κ K_d C_{α,d}` (with the larger variant).
    pub sum_upper: f64,
    pub coefficient_closed: f64,
    pub coefficient_tight: f64,
    /// The larger of the two coefficients; the one the verification uses.
    pub bound_coefficient: f64,
    /// `n^{-1/d}`.
    pub modulus_arg: f64,
}

impl ErrorBudget {
    pub fn bound(&self, omega: f64) -> f64 {
        self.bound_coefficient * omega
    }
}

/// Assembles the error-estimate constants for a fitted model, with `c` from
/// the report and `C` the model's `C_used`.
pub fn error_budget(model: &ShepardModel, report: &UniformityReport) -> Result<ErrorBudget> {
    let d = model.dim();
    if report.d != d || report.n != model.len() {
        return domain_err("uniformity report does not describe the model's point set");
    }
    let du = d as u32;
    let alpha = model.kernel.alpha();
    let c_alpha_d = constant_c_alpha_d(alpha, du)?;
    let c_star = constant_c_star(alpha, du)?;
    if report.c_sep > 2.0 * model.c_used {
        return Err(Error::Hypothesis(format!(
            "c_est = {} exceeds 2 C_used = {}",
            report.c_sep,
            2.0 * model.c_used
        )));
    }
    let k_d = constant_k_d(du, report.c_sep, model.c_used);
    let kappa = model.kernel.kappa();
    let m1 = model.kernel.m1();
    let lead = kappa / m1 * (model.c_used + 1.0) * k_d;
    let coefficient_closed = lead * c_star.closed;
    let coefficient_tight = lead * c_star.tight;
    Ok(ErrorBudget {
        n: model.len(),
        d,
        alpha,
        kappa,
        m1,
        c_est: report.c_sep,
        c_used: model.c_used,
        k_d,
        c_alpha_d,
        c_star,
        sum_upper: kappa * k_d * c_alpha_d.max(),
        coefficient_closed,
        coefficient_tight,
        bound_coefficient: coefficient_closed.max(coefficient_tight),
        modulus_arg: model.points().mesh_scale(),
    })
}

/// Sampled sup of a function over a probe grid with its argmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSup {
    pub value: f64,
    pub witness: Vec<f64>,
    pub probes: usize,
}

fn probe_sup<F: Fn(&[f64]) -> f64 + Sync>(domain: &DomainSpec, probes: usize, f: F) -> Result<SampledSup> {
    let grid = domain.probe_grid_with_count(probes)?;
    let (value, witness) = grid
        .par_max(f)
        .ok_or_else(|| Error::Domain("domain produced no probes".into()))?;
    Ok(SampledSup {
        value,
        witness,
        probes: grid.len(),
    })
}

/// `max |F(x) - f(x)|` over about `probes` grid points of the domain.
pub fn sup_error(model: &ShepardModel, f: &TestFunction, probes: usize) -> Result<SampledSup> {
    f.validate(model.dim())?;
    probe_sup(&model.domain, probes, |x| {
        (model.evaluate_unchecked(x) - f.eval(x)).abs()
    })
}

/// Extremes of `S(x)` over a probe grid, for checking
/// `m1 ≤ S(x) ≤ κ K_d C_{α,d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumExtremes {
    pub min: f64,
    pub min_at: Vec<f64>,
    pub max: f64,
    pub max_at: Vec<f64>,
    pub probes: usize,
}

pub fn scaled_sum_extremes(model: &ShepardModel, probes: usize) -> Result<SumExtremes> {
    let hi = probe_sup(&model.domain, probes, |x| model.scaled_sum_unchecked(x))?;
    let lo = probe_sup(&model.domain, probes, |x| -model.scaled_sum_unchecked(x))?;
    Ok(SumExtremes {
        min: -lo.value,
        min_at: lo.witness,
        max: hi.value,
        max_at: hi.witness,
        probes: hi.probes,
    })
}

/// `ω(f, n^{-1/d})` on the model's domain in catalog mode.
pub fn model_modulus(model: &ShepardModel, f: &TestFunction) -> Result<Modulus> {
    modulus_of_continuity(
        f,
        model.points().mesh_scale(),
        &model.domain,
        ModulusMode::Catalog,
    )
}
