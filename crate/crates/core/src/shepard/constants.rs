//! Explicit constants of the operator-norm and error estimates.
//!
//! Each series constant comes in two variants: the closed form used in the
//! closed-form estimate (`closed`) and the value of the underlying series itself
//! (`tight`). The series are sums of `[(j+1)^d - j^d] j^{-2α}` type terms;
//! expanding the binomials turns them into finite combinations of Riemann
//! zeta values, which is how `tight` is evaluated. Neither variant is assumed
//! to dominate the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{binomial, zeta};

/// `K_d(c, C) = 2^{(3d+3)/2} (C/c)^d`.
pub fn constant_k_d(d: u32, c: f64, big_c: f64) -> f64 {
    2f64.powf(1.5 * (d as f64 + 1.0)) * (big_c / c).powi(d as i32)
}

/// A constant in its closed-form and series-sum variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantPair {
    pub closed: f64,
    pub tight: f64,
}

impl ConstantPair {
    pub fn max(&self) -> f64 {
        self.closed.max(self.tight)
    }

    /// Whether the closed form dominates the series it is meant to bound.
    pub fn closed_dominates(&self) -> bool {
        self.closed >= self.tight
    }
}

/// `C_{α,d}`: closed form `1 + Σ_{k=1}^d C(d,k) (2α-k+2)/(2α-k+1)` and the
/// series `1 + Σ_{j≥1} [(j+1)^d - j^d] j^{-2α}`. Requires `α > (d+1)/2`.
pub fn constant_c_alpha_d(alpha: f64, d: u32) -> Result<ConstantPair> {
    let df = d as f64;
    if d == 0 || !(alpha > 0.5 * (df + 1.0)) {
        return Err(Error::Hypothesis(format!(
            "C_alpha_d needs alpha > (d+1)/2, got alpha = {alpha}, d = {d}"
        )));
    }
    let two_a = 2.0 * alpha;
    let closed = 1.0
        + (1..=d)
            .map(|k| {
                let kf = k as f64;
                binomial(d, k) * (two_a - kf + 2.0) / (two_a - kf + 1.0)
            })
            .sum::<f64>();
    // (j+1)^d - j^d = Σ_{k<d} C(d,k) j^k
    let mut tight = 1.0;
    for k in 0..d {
        tight += binomial(d, k) * zeta(two_a - k as f64)?;
    }
    Ok(ConstantPair { closed, tight })
}

/// `C*_{α,d}`: closed form
/// `Σ_{k=0}^d C(d+1,k) (2α-k+2)/(2α-k+1) - 1/(2α-d+1)` and the series
/// `1 + Σ_{j≥1} [(j+1)^{d+1} - (j+1) j^d] j^{-2α}`. Requires `α > (d+2)/2`.
pub fn constant_c_star(alpha: f64, d: u32) -> Result<ConstantPair> {
    let df = d as f64;
    if d == 0 || !(alpha > 0.5 * (df + 2.0)) {
        return Err(Error::Hypothesis(format!(
            "C*_alpha_d needs alpha > (d+2)/2, got alpha = {alpha}, d = {d}"
        )));
    }
    let two_a = 2.0 * alpha;
    let closed = (0..=d)
        .map(|k| {
            let kf = k as f64;
            binomial(d + 1, k) * (two_a - kf + 2.0) / (two_a - kf + 1.0)
        })
        .sum::<f64>()
        - 1.0 / (two_a - df + 1.0);
    // (j+1)^{d+1} - (j+1) j^d = Σ_{k<d} C(d+1,k) j^k + d j^d
    let mut tight = 1.0 + df * zeta(two_a - df)?;
    for k in 0..d {
        tight += binomial(d + 1, k) * zeta(two_a - k as f64)?;
    }
    Ok(ConstantPair { closed, tight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_2;

    /// Partial sums plus an integral tail bracket; independent of zeta.
    fn series_oracle(alpha: f64, term: impl Fn(f64) -> f64, decay: f64) -> f64 {
        let n = 200_000;
        let s: f64 = (1..=n)
            .map(|j| term(j as f64) * (j as f64).powf(-2.0 * alpha))
            .sum();
        // tail ~ lead · Σ_{j>n} j^{-decay}, lead from the last term
        let last = term(n as f64) * (n as f64).powf(-2.0 * alpha) * (n as f64).powf(decay);
        1.0 + s + last * (n as f64).powf(1.0 - decay) / (decay - 1.0)
    }

    #[test]
    fn k_d_examples() {
        assert_relative_eq!(constant_k_d(2, 1.0, 1.0), 2f64.powf(4.5), max_relative = 1e-15);
        assert_relative_eq!(
            constant_k_d(2, 1.0, 2.0),
            4.0 * 2f64.powf(4.5),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            constant_k_d(3, 0.3, 0.9),
            constant_k_d(3, 3.0, 9.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn c_alpha_d_at_two_one() {
        let c = constant_c_alpha_d(2.0, 1).unwrap();
        assert!((c.closed - 2.25).abs() < 1e-12);
        assert!((c.tight - (1.0 + PI.powi(4) / 90.0)).abs() < 1e-12);
        assert!(c.closed_dominates());
    }

    #[test]
    fn c_star_at_two_one() {
        let c = constant_c_star(2.0, 1).unwrap();
        assert!((c.closed - 3.45).abs() < 1e-12);
        assert!((c.tight - (1.0 + ZETA3 + PI.powi(4) / 90.0)).abs() < 1e-12);
    }

    #[test]
    fn tight_values_match_direct_summation() {
        for &(alpha, d) in &[(3.0, 2u32), (2.75, 3), (4.2, 4), (1.6, 1)] {
            let dd = d as f64;
            let want = series_oracle(alpha, |j| (j + 1.0).powf(dd) - j.powf(dd), 2.0 * alpha - dd + 1.0);
            assert_relative_eq!(
                constant_c_alpha_d(alpha, d).unwrap().tight,
                want,
                max_relative = 1e-9
            );
        }
        for &(alpha, d) in &[(3.0, 2u32), (3.1, 3), (4.5, 4), (2.0, 1)] {
            let dd = d as f64;
            let want = series_oracle(
                alpha,
                |j| (j + 1.0).powf(dd + 1.0) - (j + 1.0) * j.powf(dd),
                2.0 * alpha - dd,
            );
            assert_relative_eq!(
                constant_c_star(alpha, d).unwrap().tight,
                want,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn hypotheses_enforced() {
        assert!(constant_c_alpha_d(1.0, 1).is_err());
        assert!(constant_c_alpha_d(1.5, 2).is_err());
        assert!(constant_c_star(1.5, 1).is_err());
        assert!(constant_c_star(2.0, 2).is_err());
    }

    #[test]
    fn closed_form_can_undercut_series_near_the_boundary() {
        // d = 1, alpha slightly above 1: series ≈ 1 + ζ(2α) ≈ 2.64, closed form ≈ 2.5
        let c = constant_c_alpha_d(1.01, 1).unwrap();
        assert!(!c.closed_dominates(), "{c:?}");
        assert_eq!(c.max(), c.tight);
    }
}
