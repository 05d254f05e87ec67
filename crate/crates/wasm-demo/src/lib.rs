//! Browser bindings. Each export returns a flat `Float64Array` so the page
//! can plot it without any glue beyond `wasm-bindgen`.
//!
//! The plain functions carry the logic and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use shepard_core::geometry::{lens_ii, lens_lower_bound, lens_quadrature, LensConfig};
use shepard_core::pointset::{
    count_annuli, gen_grid, gen_hexagonal, hexagonal_domain, uniformity_report, DomainSpec,
};
use shepard_core::shepard::{
    error_budget, kernel_gaussian, kernel_inverse_multiquadric, modulus_of_continuity, Dilation, KernelSpec,
    ModulusMode, ShepardModel, TestFunction,
};
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, String>;

fn core<T>(r: shepard_core::Result<T>) -> Result<T> {
    r.map_err(|e| e.to_string())
}

/// Rows `[r/R, closed II, lower bound, quadrature total]` for
/// `r/R = k/steps`, `k = 1..=steps`, with `R = 1`.
pub fn lens_table(d: u32, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err("steps must be positive".into());
    }
    let mut out = Vec::with_capacity(4 * steps);
    for k in 1..=steps {
        let ratio = k as f64 / steps as f64;
        let cfg = core(LensConfig::new(d, ratio, 1.0))?;
        out.extend([
            ratio,
            lens_ii(&cfg),
            lens_lower_bound(&cfg),
            lens_quadrature(&cfg).total(),
        ]);
    }
    Ok(out)
}

fn kernel(name: &str, alpha: f64) -> Result<KernelSpec> {
    core(match name {
        "imq" => kernel_inverse_multiquadric(alpha),
        "gaussian" => kernel_gaussian(alpha),
        other => return Err(format!("unknown kernel {other:?}")),
    })
}

fn curve_function(name: &str) -> Result<TestFunction> {
    Ok(match name {
        "distance" => TestFunction::DistanceToPoint {
            anchor: vec![0.5],
            scale: 1.0,
        },
        "ball" => TestFunction::DistanceToBall {
            center: vec![0.5],
            radius: 0.2,
            scale: 1.0,
        },
        "affine" => TestFunction::Affine {
            gradient: vec![2.0],
            offset: -1.0,
        },
        "sine" => TestFunction::SineSum { frequency: 3.0 },
        other => return Err(format!("unknown function {other:?}")),
    })
}

/// Fits `n` uniform nodes on `[0, 1]` and samples `samples` points.
///
/// Layout: `[sup_error, bound, x_0, f_0, F_0, x_1, f_1, F_1, ...]`, where
/// `sup_error` is the maximum over the samples and `bound` the error
/// estimate for the measured constants.
pub fn shepard_curve(
    n: usize,
    kernel_name: &str,
    alpha: f64,
    function: &str,
    samples: usize,
) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err("need at least two samples".into());
    }
    let domain = DomainSpec::unit_box(1);
    let points = core(gen_grid(1, n, &domain))?;
    let f = curve_function(function)?;
    let k = kernel(kernel_name, alpha)?;
    let model = core(ShepardModel::fit_function(
        points,
        &f,
        k,
        domain.clone(),
        Dilation::MeasuredFill,
    ))?;
    let report = core(uniformity_report(
        model.points(),
        &domain,
        model.h_measured() / 16.0,
    ))?;
    let budget = core(error_budget(&model, &report))?;
    let omega = core(modulus_of_continuity(
        &f,
        budget.modulus_arg,
        &domain,
        ModulusMode::Catalog,
    ))?;

    let mut out = vec![0.0, budget.bound(omega.value)];
    let mut sup = 0.0f64;
    for i in 0..samples {
        let x = i as f64 / (samples - 1) as f64;
        let fx = f.eval(&[x]);
        let gx = core(model.evaluate(&[x]))?;
        sup = sup.max((gx - fx).abs());
        out.extend([x, fx, gx]);
    }
    out[0] = sup;
    Ok(out)
}

/// Hexagonal lattice of about `n` points. Layout:
/// `[points, x_0, y_0, ..., x_{m-1}, y_{m-1}, shells, (count_j, bound_j)...]`,
/// with shells of thickness `h` around the domain center.
pub fn hex_annuli(n: usize) -> Result<Vec<f64>> {
    let domain = hexagonal_domain();
    let ps = core(gen_hexagonal(n, &domain))?;
    let (lo, hi) = domain.bounds();
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let report = core(uniformity_report(&ps, &domain, 0.25 * ps.mesh_scale()))?;
    let mut counts = core(count_annuli(&ps, &center, report.h))?;
    core(counts.attach_fill_bounds(2, report.c_sep, report.c_fill))?;

    let mut out = Vec::with_capacity(2 + 2 * ps.len() + 2 * counts.counts.len());
    out.push(ps.len() as f64);
    out.extend_from_slice(ps.coords());
    out.push(counts.counts.len() as f64);
    for (c, b) in counts.counts.iter().zip(&counts.bound_fill_shells) {
        out.extend([*c as f64, *b]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = lensTable)]
pub fn lens_table_js(d: u32, steps: usize) -> std::result::Result<Vec<f64>, JsError> {
    lens_table(d, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = shepardCurve)]
pub fn shepard_curve_js(
    n: usize,
    kernel: &str,
    alpha: f64,
    function: &str,
    samples: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    shepard_curve(n, kernel, alpha, function, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = hexAnnuli)]
pub fn hex_annuli_js(n: usize) -> std::result::Result<Vec<f64>, JsError> {
    hex_annuli(n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_rows_are_ordered() {
        let t = lens_table(3, 10).unwrap();
        assert_eq!(t.len(), 40);
        for row in t.chunks_exact(4) {
            let [_, ii, lower, total] = row else {
                unreachable!()
            };
            assert!(lower <= ii && ii < total, "{row:?}");
        }
        assert!(lens_table(0, 10).is_err());
        assert!(lens_table(2, 0).is_err());
    }

    #[test]
    fn curve_stays_within_bound() {
        for f in ["distance", "ball", "affine", "sine"] {
            let c = shepard_curve(40, "imq", 2.0, f, 201).unwrap();
            assert_eq!(c.len(), 2 + 3 * 201);
            assert!(c[0] <= c[1], "{f}: {} > {}", c[0], c[1]);
        }
        let exact = shepard_curve(10, "gaussian", 3.0, "affine", 11).unwrap();
        assert!(exact[0] < 0.5);
        assert!(shepard_curve(10, "cubic", 3.0, "affine", 11).is_err());
        assert!(shepard_curve(10, "imq", 3.0, "wave", 11).is_err());
    }

    #[test]
    fn hex_counts_respect_bounds() {
        let out = hex_annuli(400).unwrap();
        let m = out[0] as usize;
        let shells = out[1 + 2 * m] as usize;
        let tail = &out[2 + 2 * m..];
        assert_eq!(tail.len(), 2 * shells);
        let total: f64 = tail.chunks_exact(2).map(|p| p[0]).sum();
        assert_eq!(total as usize, m);
        assert!(tail.chunks_exact(2).all(|p| p[0] <= p[1]));
    }
}
