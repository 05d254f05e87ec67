//! Ball–ball intersection ("lens") volumes and annulus measures.
//!
//! The canonical lens puts the small ball (radius `r`) at the origin and the
//! large ball (radius `R`) at `(R, 0, …, 0)`, so the small ball's center lies
//! on the large ball's boundary. Slicing along the first axis splits the lens
//! into a cap of the large ball over `[0, x̃]` (`I`) and a cap of the small
//! ball over `[x̃, r]` (`II`), with `x̃ = r²/(2R)`.
//!
//! `II` has a closed form through `₂F₁`; `I` only gets a crude upper bound.
//! Both are cross-checked against one-dimensional quadrature and Monte Carlo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain_err, Result};
use crate::quadrature::GaussLegendre;
use crate::specfun::{ball_volume, lens_hypergeometric, log_gamma, log_unit_ball_volume};

/// Two balls in canonical position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensConfig {
    pub d: u32,
    /// Radius of the small ball, centered at the origin.
    pub r: f64,
    /// Radius of the large ball, centered at `(R, 0, …, 0)`.
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl LensConfig {
    pub fn new(d: u32, r: f64, big_r: f64) -> Result<Self> {
        if d == 0 {
            return domain_err("lens dimension must be at least 1");
        }
        if !(r > 0.0 && big_r > 0.0) || !r.is_finite() || !big_r.is_finite() {
            return domain_err(format!(
                "lens radii must be positive and finite, got r = {r}, R = {big_r}"
            ));
        }
        if r > 2.0 * big_r {
            return domain_err(format!("lens requires r <= 2R, got r = {r}, R = {big_r}"));
        }
        Ok(Self { d, r, big_r })
    }

    /// A = arccos(r / 2R).
    pub fn angle(&self) -> f64 {
        (self.r / (2.0 * self.big_r)).acos()
    }

    /// sin²(A/2) = (1 - r/2R)/2, evaluated without trigonometry.
    pub fn half_angle_sin_sq(&self) -> f64 {
        0.5 * (1.0 - self.r / (2.0 * self.big_r))
    }

    /// x̃ = r²/(2R), where the two spheres cross.
    pub fn crossing(&self) -> f64 {
        self.r * self.r / (2.0 * self.big_r)
    }
}

/// Closed form of the small-ball cap `II_d(r, R)`:
///
/// ```text
/// sin^{d+1}(A/2) · 2^{d+1} r^d π^{(d-1)/2} / ((d+1) Γ((d+1)/2))
///     · ₂F₁(-(d-1)/2, (d+1)/2; (d+3)/2; sin²(A/2))
/// ```
pub fn lens_ii(cfg: &LensConfig) -> f64 {
    let z = cfg.half_angle_sin_sq();
    if z == 0.0 {
        return 0.0;
    }
    let d = cfg.d as f64;
    let f = lens_hypergeometric(cfg.d, z).expect("sin²(A/2) lies in [0, 1/2)");
    let log_coef =
        0.5 * (d + 1.0) * z.ln() + (d + 1.0) * 2f64.ln() + d * cfg.r.ln() + 0.5 * (d - 1.0) * PI.ln()
            - (d + 1.0).ln()
            - log_gamma(0.5 * (d + 1.0)).expect("positive argument");
    log_coef.exp() * f
}

/// Lower bound on the lens volume obtained by dropping `I_d`; identical to
/// [`lens_ii`].
pub fn lens_lower_bound(cfg: &LensConfig) -> f64 {
    lens_ii(cfg)
}

/// Upper bound `π^{(d-1)/2} r^{d+1} / ((d+1) R Γ((d+1)/2))` on the
/// large-ball cap `I_d(r, R)`.
pub fn lens_i_upper(cfg: &LensConfig) -> f64 {
    let d = cfg.d as f64;
    let log_v = 0.5 * (d - 1.0) * PI.ln() + (d + 1.0) * cfg.r.ln()
        - (d + 1.0).ln()
        - cfg.big_r.ln()
        - log_gamma(0.5 * (d + 1.0)).expect("positive argument");
    log_v.exp()
}

/// Both lens pieces by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensQuadrature {
    pub i: f64,
    pub ii: f64,
}

impl LensQuadrature {
    pub fn total(&self) -> f64 {
        self.i + self.ii
    }
}

/// Integrates the slice volumes `V_{d-1}(√(2Rx - x²))` over `[0, x̃]` and
/// `V_{d-1}(√(r² - x²))` over `[x̃, r]`.
///
/// Square-root substitutions at the vanishing endpoints (`x = s²` and
/// `x = r - s²`) leave smooth integrands `2 s^d (2ρ - s²)^{(d-1)/2}`.
pub fn lens_quadrature(cfg: &LensConfig) -> LensQuadrature {
    let d = cfg.d as f64;
    let r = cfg.r;
    let big_r = cfg.big_r;
    let x_cross = cfg.crossing();
    let slice_coef = log_unit_ball_volume(cfg.d - 1).exp();
    let half_pow = 0.5 * (d - 1.0);
    let rule = GaussLegendre::default_rule();
    let tol = 1e-12 * r.powf(d);

    let i_integrand = |s: f64| 2.0 * s.powf(d) * (2.0 * big_r - s * s).max(0.0).powf(half_pow);
    let i = rule.adaptive(&i_integrand, 0.0, x_cross.sqrt(), tol).value;

    let ii_integrand = |s: f64| 2.0 * s.powf(d) * (2.0 * r - s * s).max(0.0).powf(half_pow);
    let ii = rule
        .adaptive(&ii_integrand, 0.0, (r - x_cross).max(0.0).sqrt(), tol)
        .value;

    LensQuadrature {
        i: slice_coef * i,
        ii: slice_coef * ii,
    }
}

/// A Monte Carlo volume estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
}

impl MonteCarloEstimate {
    fn from_hits(hits: u64, samples: u64, volume: f64) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            estimate: p * volume,
            std_error: volume * (p * (1.0 - p) / samples as f64).sqrt(),
            hits,
            samples,
        }
    }

    /// |estimate - value| measured in standard errors (infinite if the
    /// standard error is zero and the values differ).
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.estimate - value).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

/// Uniform point in the ball of radius `radius` around `center`.
pub fn sample_ball<R: Rng>(rng: &mut R, center: &[f64], radius: f64, out: &mut [f64]) {
    let d = center.len();
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v = g;
            norm2 += g * g;
        }
        if norm2 > 0.0 {
            let u: f64 = rng.random();
            let scale = radius * u.powf(1.0 / d as f64) / norm2.sqrt();
            for (v, c) in out.iter_mut().zip(center) {
                *v = c + *v * scale;
            }
            return;
        }
    }
}

/// Samples uniformly in the small ball and counts hits inside the large one.
pub fn lens_monte_carlo(cfg: &LensConfig, samples: u64, seed: u64) -> MonteCarloEstimate {
    let samples = samples.max(1);
    let d = cfg.d as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = vec![0.0; d];
    let mut x = vec![0.0; d];
    let big_r2 = cfg.big_r * cfg.big_r;
    let mut hits = 0u64;
    for _ in 0..samples {
        sample_ball(&mut rng, &origin, cfg.r, &mut x);
        let dx = x[0] - cfg.big_r;
        let dist2 = dx * dx + x[1..].iter().map(|v| v * v).sum::<f64>();
        if dist2 <= big_r2 {
            hits += 1;
        }
    }
    MonteCarloEstimate::from_hits(hits, samples, ball_volume(cfg.d, cfg.r))
}

/// Concentric annuli of common thickness. Annulus `j ≥ 1` is the shell
/// `(j-1)t ≤ |x - center| < jt`; annulus 1 is a ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusFamily {
    pub d: u32,
    pub thickness: f64,
    pub center: Vec<f64>,
}

impl AnnulusFamily {
    pub fn new(thickness: f64, center: Vec<f64>) -> Result<Self> {
        if center.is_empty() {
            return domain_err("annulus center must have at least one coordinate");
        }
        if !(thickness > 0.0) || !thickness.is_finite() {
            return domain_err(format!("annulus thickness must be positive, got {thickness}"));
        }
        Ok(Self {
            d: center.len() as u32,
            thickness,
            center,
        })
    }

    /// Inner and outer radius of annulus `j`.
    pub fn radii(&self, j: u32) -> (f64, f64) {
        (
            (j.saturating_sub(1)) as f64 * self.thickness,
            j as f64 * self.thickness,
        )
    }

    /// 1-based annulus index containing `x`.
    pub fn index_of(&self, x: &[f64]) -> u32 {
        let dist = dist(x, &self.center);
        (dist / self.thickness).floor() as u32 + 1
    }
}

/// |𝒜_j| = V_d(jt) - V_d((j-1)t).
pub fn annulus_measure(fam: &AnnulusFamily, j: u32) -> f64 {
    assert!(j >= 1, "annulus index starts at 1");
    let jd = j as f64;
    let d = fam.d as f64;
    let shell = jd.powf(d) - (jd - 1.0).powf(d);
    ball_volume(fam.d, fam.thickness) * shell
}

/// Lower bound on the volume of `𝒜_j ∩ B(q, ρ)` over centers `q` in `𝒜_j`.
///
/// The minimum is taken at a center on the outer sphere, which reduces to
/// the lens lower bound with `r = ρ`, `R = j·t`.
pub fn min_intersection_volume(fam: &AnnulusFamily, j: u32, rho: f64) -> Result<f64> {
    if j == 0 {
        return domain_err("annulus index starts at 1");
    }
    let outer = j as f64 * fam.thickness;
    if !(rho > 0.0) || rho > 2.0 * outer {
        return domain_err(format!(
            "ball radius {rho} must lie in (0, 2·outer radius = {}]",
            2.0 * outer
        ));
    }
    Ok(lens_lower_bound(&LensConfig::new(fam.d, rho, outer)?))
}

/// Monte Carlo estimate of `|𝒜_j ∩ B(ball_center, rho)|`.
pub fn annulus_ball_intersection_mc(
    fam: &AnnulusFamily,
    j: u32,
    ball_center: &[f64],
    rho: f64,
    samples: u64,
    seed: u64,
) -> MonteCarloEstimate {
    let samples = samples.max(1);
    let (inner, outer) = fam.radii(j);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; fam.d as usize];
    let mut hits = 0u64;
    for _ in 0..samples {
        sample_ball(&mut rng, ball_center, rho, &mut x);
        let r = dist(&x, &fam.center);
        if r >= inner && r < outer {
            hits += 1;
        }
    }
    MonteCarloEstimate::from_hits(hits, samples, ball_volume(fam.d, rho))
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
