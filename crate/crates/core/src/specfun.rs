//! Special functions: Gamma, Beta, Pochhammer, ball volumes, Riemann zeta and
//! the Gauss hypergeometric function.
//!
//! `₂F₁` has two independent evaluation paths. The power series is the
//! production path: it terminates exactly when `a` (or `b`) is a non-positive
//! integer and otherwise stops on a geometric tail bound. The Euler integral
//! representation is kept as a verification oracle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Result};
use crate::quadrature::{GaussLegendre, DEFAULT_NODES, DEFAULT_PANEL_TOL};

/// Default series tolerance for [`gauss_2f1`].
pub const SERIES_TOL: f64 = 1e-14;

const MAX_SERIES_TERMS: usize = 1_000_000;

/// Natural log of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain_err(format!("log_gamma requires x > 0, got {x}"));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain_err(format!("gamma requires x > 0, got {x}"));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// Rising factorial `(a)_n = a (a+1) ⋯ (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// B(x, y) = Γ(x)Γ(y)/Γ(x+y), evaluated through log-Gamma differences.
pub fn beta_fn(x: f64, y: f64) -> Result<f64> {
    Ok(log_beta(x, y)?.exp())
}

pub fn log_beta(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return domain_err(format!("beta requires positive arguments, got ({x}, {y})"));
    }
    Ok(log_gamma(x)? + log_gamma(y)? - log_gamma(x + y)?)
}

/// Volume of the `d`-dimensional ball of radius `t`: π^{d/2} t^d / Γ(d/2 + 1).
pub fn ball_volume(d: u32, t: f64) -> f64 {
    debug_assert!(d >= 1 && t >= 0.0);
    if t == 0.0 {
        return 0.0;
    }
    (log_unit_ball_volume(d) + d as f64 * t.ln()).exp()
}

/// ln of the unit-ball volume in dimension `d` (d = 0 gives the point measure 1).
pub fn log_unit_ball_volume(d: u32) -> f64 {
    let half = 0.5 * d as f64;
    half * PI.ln() - statrs::function::gamma::ln_gamma(half + 1.0)
}

/// Riemann zeta function for real `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return domain_err(format!("zeta requires s > 1, got {s}"));
    }
    // B_{2j} / (2j)!
    const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    ];
    const N: usize = 24;
    let nf = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // rising product s (s+1) ... (s+2j-2) times N^{-s-2j+1}
    let mut rising = s;
    let mut power = nf.powf(-s - 1.0);
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let k = 2.0 * j as f64;
            rising *= (s + k - 1.0) * (s + k);
            power /= nf * nf;
        }
        sum += coef * rising * power;
    }
    Ok(sum)
}

/// Parameters of `₂F₁(a, b; c; z)` restricted to real `|z| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypergeometricParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypergeometricParams {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Result<Self> {
        let p = Self { a, b, c, z };
        p.check_series()?;
        Ok(p)
    }

    /// Parameters `(-(d-1)/2, (d+1)/2; (d+3)/2; z)` arising in lens volumes.
    pub fn lens(d: u32, z: f64) -> Result<Self> {
        let df = d as f64;
        Self::new(-(df - 1.0) / 2.0, (df + 1.0) / 2.0, (df + 3.0) / 2.0, z)
    }

    fn check_series(&self) -> Result<()> {
        if !(self.z.abs() < 1.0) {
            return domain_err(format!("2F1 requires |z| < 1, got z = {}", self.z));
        }
        if self.c <= 0.0 && self.c == self.c.round() {
            return domain_err(format!("2F1 undefined for c = {} (non-positive integer)", self.c));
        }
        Ok(())
    }

    fn check_euler(&self) -> Result<()> {
        self.check_series()?;
        if !(self.c > self.b && self.b > 0.0) {
            return domain_err(format!(
                "Euler integral requires c > b > 0, got b = {}, c = {}",
                self.b, self.c
            ));
        }
        Ok(())
    }
}

/// Outcome of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Number of non-zero terms summed, counting the leading 1.
    pub terms: usize,
    /// True when the series hit an exactly vanishing term.
    pub terminated: bool,
}

/// `₂F₁` by its power series, stopping when the geometric tail bound drops
/// below `tol · |partial sum|`.
pub fn gauss_2f1_series(p: HypergeometricParams, tol: f64) -> Result<f64> {
    Ok(gauss_2f1_series_detailed(p, tol)?.value)
}

pub fn gauss_2f1_series_detailed(p: HypergeometricParams, tol: f64) -> Result<SeriesSum> {
    p.check_series()?;
    if !(tol > 0.0) {
        return domain_err(format!("series tolerance must be positive, got {tol}"));
    }
    let HypergeometricParams { a, b, c, z } = p;
    // Beyond this index the term ratio is monotone in n.
    let settle = (a.abs() + b.abs() + c.abs()).ceil() as usize + 2;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let next = term * (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        if next == 0.0 {
            return Ok(SeriesSum {
                value: sum,
                terms: n + 1,
                terminated: true,
            });
        }
        sum += next;
        term = next;
        n += 1;
        if n > settle {
            let nf = n as f64;
            let g = ((a + nf) * (b + nf) / ((c + nf) * (nf + 1.0))).abs();
            let rho = g.max(1.0) * z.abs();
            if rho < 1.0 && term.abs() * rho / (1.0 - rho) <= tol * sum.abs() {
                return Ok(SeriesSum {
                    value: sum,
                    terms: n + 1,
                    terminated: false,
                });
            }
        }
        if n >= MAX_SERIES_TERMS {
            return domain_err(format!("2F1 series failed to converge for {p:?}"));
        }
    }
}

/// `₂F₁` through Euler's integral
/// `Γ(c)/(Γ(b)Γ(c-b)) ∫₀¹ x^{b-1}(1-x)^{c-b-1}(1-zx)^{-a} dx`.
///
/// The interval is split at 1/2 and each endpoint weight is removed by a
/// power substitution before Gauss–Legendre quadrature with `quad_points`
/// nodes per panel.
pub fn gauss_2f1_euler(p: HypergeometricParams, quad_points: usize) -> Result<f64> {
    p.check_euler()?;
    if quad_points == 0 {
        return domain_err("quadrature needs at least one node");
    }
    let owned;
    let rule = if quad_points == DEFAULT_NODES {
        GaussLegendre::default_rule()
    } else {
        owned = GaussLegendre::new(quad_points);
        &owned
    };
    let HypergeometricParams { a, b, c, z } = p;
    let left_pow = b - 1.0;
    let right_pow = c - b - 1.0;
    let factor = |x: f64| (1.0 - z * x).powf(-a);
    let left = power_weighted(rule, left_pow, 0.5, &|x: f64| {
        (1.0 - x).powf(right_pow) * factor(x)
    });
    let right = power_weighted(rule, right_pow, 0.5, &|y: f64| {
        let x = 1.0 - y;
        x.powf(left_pow) * factor(x)
    });
    Ok((left + right) * (-log_beta(b, c - b)?).exp())
}

/// ∫₀^L x^p h(x) dx for p > -1 with `h` smooth on [0, L].
fn power_weighted(rule: &GaussLegendre, p: f64, upper: f64, h: &dyn Fn(f64) -> f64) -> f64 {
    if p >= 0.0 && p.fract() == 0.0 {
        let f = |x: f64| x.powf(p) * h(x);
        rule.adaptive(&f, 0.0, upper, DEFAULT_PANEL_TOL).value
    } else if (2.0 * p).fract() == 0.0 {
        // x = s²: the weight becomes s^{2p+1}, an integer power
        let f = |s: f64| 2.0 * s.powf(2.0 * p + 1.0) * h(s * s);
        rule.adaptive(&f, 0.0, upper.sqrt(), DEFAULT_PANEL_TOL).value
    } else {
        // x = u^{1/(p+1)}: the weight is absorbed entirely
        let e = p + 1.0;
        let f = |u: f64| h(u.powf(1.0 / e)) / e;
        rule.adaptive(&f, 0.0, upper.powf(e), DEFAULT_PANEL_TOL).value
    }
}

/// Production `₂F₁`: series with tail tolerance [`SERIES_TOL`].
pub fn gauss_2f1(p: HypergeometricParams) -> Result<f64> {
    gauss_2f1_series(p, SERIES_TOL)
}

/// `₂F₁(-(d-1)/2, (d+1)/2; (d+3)/2; z)`.
pub fn lens_hypergeometric(d: u32, z: f64) -> Result<f64> {
    gauss_2f1(HypergeometricParams::lens(d, z)?)
}

/// Binomial coefficient as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(5.0, 0), 1.0);
        assert_eq!(pochhammer(-0.5, 2), -0.25);
        assert_eq!(pochhammer(1.0, 4), 24.0);
    }

    #[test]
    fn beta_examples() {
        assert_relative_eq!(beta_fn(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(beta_fn(0.5, 0.5).unwrap(), PI, max_relative = 1e-14);
        assert_relative_eq!(beta_fn(1.5, 1.5).unwrap(), PI / 8.0, max_relative = 1e-14);
    }

    #[test]
    fn beta_rejects_nonpositive() {
        assert!(beta_fn(0.0, 1.0).is_err());
        assert!(beta_fn(1.0, -2.0).is_err());
        assert!(log_gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        assert_relative_eq!(ball_volume(2, 1.0), PI, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(3, 1.0), 4.0 * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(1, 2.5), 5.0, max_relative = 1e-14);
        for d in 1..12 {
            assert_eq!(ball_volume(d, 0.0), 0.0);
        }
    }

    #[test]
    fn ball_volume_large_dimension_is_finite() {
        let v = ball_volume(200, 1.0);
        assert!(v > 0.0 && v < 1e-100);
    }

    #[test]
    fn gamma_duplication_identity() {
        let mut z = 0.5;
        while z <= 10.0 + 1e-12 {
            let lhs = gamma(z).unwrap() * gamma(z + 0.5).unwrap();
            let g2z = gamma(2.0 * z).unwrap();
            let rhs = 2f64.powf(1.0 - 2.0 * z) * PI.sqrt() * g2z;
            assert!((lhs - rhs).abs() / g2z < 1e-12, "z = {z}");
            z += 0.5;
        }
    }

    #[test]
    fn zeta_known_values() {
        assert_relative_eq!(zeta(2.0).unwrap(), PI * PI / 6.0, max_relative = 1e-15);
        assert_relative_eq!(zeta(4.0).unwrap(), PI.powi(4) / 90.0, max_relative = 1e-15);
        assert_relative_eq!(zeta(3.0).unwrap(), 1.202_056_903_159_594_2, max_relative = 1e-15);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn zeta_near_pole_matches_direct_sum_with_tail() {
        // s = 1.5: partial sum to 10^6 plus integral tail and midpoint correction
        let s = 1.5;
        let n = 1_000_000usize;
        let partial: f64 = (1..=n).map(|k| (k as f64).powf(-s)).sum();
        let nf = n as f64;
        let tail = nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0);
        assert_relative_eq!(zeta(s).unwrap(), partial + tail, max_relative = 1e-12);
    }

    #[test]
    fn series_at_zero_is_one() {
        let p = HypergeometricParams::new(0.3, 1.7, 2.2, 0.0).unwrap();
        assert_eq!(gauss_2f1_series(p, 1e-14).unwrap(), 1.0);
        assert_relative_eq!(gauss_2f1_euler(p, 64).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn series_terminating_polynomial() {
        for &(b, c, z) in &[(2.0, 3.0, 0.4), (0.5, 1.5, -0.7), (4.0, 0.5, 0.9)] {
            let p = HypergeometricParams::new(-1.0, b, c, z).unwrap();
            let s = gauss_2f1_series_detailed(p, 1e-14).unwrap();
            assert!(s.terminated);
            assert_eq!(s.terms, 2);
            assert_relative_eq!(s.value, 1.0 - b / c * z, max_relative = 1e-15);
        }
    }

    #[test]
    fn euler_log_closed_form() {
        let p = HypergeometricParams::new(1.0, 1.0, 2.0, 0.5).unwrap();
        let expected = 2.0 * 2f64.ln();
        assert_relative_eq!(gauss_2f1_euler(p, 64).unwrap(), expected, max_relative = 1e-12);
        assert_relative_eq!(
            gauss_2f1_series(p, 1e-15).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn euler_handles_singular_weights() {
        // b = 0.3, c - b = 0.4: both endpoint weights singular, non-half-integer
        let p = HypergeometricParams::new(0.7, 0.3, 0.7, 0.35).unwrap();
        let series = gauss_2f1_series(p, 1e-15).unwrap();
        let euler = gauss_2f1_euler(p, 64).unwrap();
        assert_relative_eq!(series, euler, max_relative = 1e-9);
    }

    #[test]
    fn lens_parameters_cross_oracle_d2_and_d4() {
        let p = HypergeometricParams::lens(2, 0.5).unwrap();
        assert_relative_eq!(
            gauss_2f1_series(p, 1e-14).unwrap(),
            gauss_2f1_euler(p, 64).unwrap(),
            max_relative = 1e-9
        );
        let p = HypergeometricParams::lens(4, 0.3).unwrap();
        assert_relative_eq!(
            gauss_2f1_series(p, 1e-14).unwrap(),
            gauss_2f1_euler(p, 64).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn series_rejects_bad_domain() {
        assert!(HypergeometricParams::new(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(HypergeometricParams::new(1.0, 1.0, 2.0, -1.2).is_err());
        assert!(HypergeometricParams::new(1.0, 1.0, -2.0, 0.5).is_err());
        assert!(HypergeometricParams::new(1.0, 1.0, 0.0, 0.5).is_err());
        let p = HypergeometricParams::new(1.0, 1.0, 2.0, 0.5).unwrap();
        assert!(gauss_2f1_series(p, 0.0).is_err());
    }

    #[test]
    fn euler_rejects_bad_ordering() {
        let p = HypergeometricParams::new(1.0, 2.0, 1.5, 0.5).unwrap();
        assert!(gauss_2f1_euler(p, 64).is_err());
        let p = HypergeometricParams::new(1.0, -0.5, 1.5, 0.5).unwrap();
        assert!(gauss_2f1_euler(p, 64).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(6, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
