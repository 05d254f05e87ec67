//! Test functions with known moduli of continuity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, Error, Result};
use crate::geometry::{dist, sample_ball};
use crate::pointset::DomainSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Constant {
        value: f64,
    },
    /// `a·x + b`.
    Affine {
        gradient: Vec<f64>,
        offset: f64,
    },
    /// `s |x - x0|`.
    DistanceToPoint {
        anchor: Vec<f64>,
        scale: f64,
    },
    /// `s · dist(x, B(c, r))`.
    DistanceToBall {
        center: Vec<f64>,
        radius: f64,
        scale: f64,
    },
    /// `Σ_i sin(k x_i)`.
    SineSum {
        frequency: f64,
    },
}

/// How `ω(f, t)` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    Exact,
    /// An upper bound (Lipschitz constant times `t`).
    Majorant,
    /// A sampled lower bound.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Modulus {
    pub value: f64,
    pub kind: ModulusKind,
}

impl Modulus {
    pub fn is_exact(&self) -> bool {
        self.kind == ModulusKind::Exact
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ModulusMode {
    Catalog,
    Empirical { samples: u64, seed: u64 },
}

impl TestFunction {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Affine { .. } => "affine",
            Self::DistanceToPoint { .. } => "distance_to_point",
            Self::DistanceToBall { .. } => "distance_to_ball",
            Self::SineSum { .. } => "sine_sum",
        }
    }

    /// Checks the parameters against the dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        let check_len = |v: &Vec<f64>| {
            if v.len() == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                })
            }
        };
        match self {
            Self::Constant { .. } | Self::SineSum { .. } => Ok(()),
            Self::Affine { gradient, .. } => check_len(gradient),
            Self::DistanceToPoint { anchor, .. } => check_len(anchor),
            Self::DistanceToBall { center, radius, .. } => {
                check_len(center)?;
                if *radius >= 0.0 {
                    Ok(())
                } else {
                    domain_err(format!("ball radius must be nonnegative, got {radius}"))
                }
            }
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Affine { gradient, offset } => {
                offset + gradient.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()
            }
            Self::DistanceToPoint { anchor, scale } => scale * dist(x, anchor),
            Self::DistanceToBall {
                center,
                radius,
                scale,
            } => scale * (dist(x, center) - radius).max(0.0),
            Self::SineSum { frequency } => x.iter().map(|v| (frequency * v).sin()).sum(),
        }
    }

    /// Global Lipschitz constant in dimension `d`.
    pub fn lipschitz(&self, d: usize) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Affine { gradient, .. } => norm(gradient),
            Self::DistanceToPoint { scale, .. } | Self::DistanceToBall { scale, .. } => scale.abs(),
            Self::SineSum { frequency } => frequency.abs() * (d as f64).sqrt(),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `max a·v` over `|v_i| ≤ w_i`, `|v| ≤ t` (the largest increment of an
/// affine function along a vector that fits in the box).
fn affine_box_increment(a: &[f64], widths: &[f64], t: f64) -> f64 {
    // The optimum is v_i = sign(a_i) min(w_i, λ|a_i|); saturate the
    // coordinates with the smallest w_i/|a_i| first.
    let mut items: Vec<(f64, f64)> = a
        .iter()
        .zip(widths)
        .filter(|(ai, _)| **ai != 0.0)
        .map(|(ai, w)| (ai.abs(), *w))
        .collect();
    items.sort_by(|x, y| (x.1 / x.0).total_cmp(&(y.1 / y.0)));
    let mut budget = t * t;
    let mut value = 0.0;
    for k in 0..items.len() {
        let rest: f64 = items[k..].iter().map(|(ai, _)| ai * ai).sum();
        let (ak, wk) = items[k];
        let lambda = (budget / rest).sqrt();
        if lambda * ak <= wk {
            return value + lambda * rest;
        }
        value += ak * wk;
        budget -= wk * wk;
    }
    value
}

/// `ω(f, t) = sup{|f(x) - f(y)| : x, y ∈ Ω, |x - y| ≤ t}`.
///
/// Catalog mode is exact for constants, affine functions and the two
/// distance functions (anchors and centers must lie in the domain); for the
/// sine sum it returns the Lipschitz majorant `L t`, flagged as such.
/// Empirical mode returns a sampled lower bound.
pub fn modulus_of_continuity(
    f: &TestFunction,
    t: f64,
    domain: &DomainSpec,
    mode: ModulusMode,
) -> Result<Modulus> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain_err(format!("modulus argument must be nonnegative, got {t}"));
    }
    let d = domain.dim();
    f.validate(d)?;
    match mode {
        ModulusMode::Catalog => catalog_modulus(f, t, domain),
        ModulusMode::Empirical { samples, seed } => Ok(Modulus {
            value: empirical_modulus(f, t, domain, samples, seed),
            kind: ModulusKind::Empirical,
        }),
    }
}

fn catalog_modulus(f: &TestFunction, t: f64, domain: &DomainSpec) -> Result<Modulus> {
    let exact = |value| {
        Ok(Modulus {
            value,
            kind: ModulusKind::Exact,
        })
    };
    match f {
        TestFunction::Constant { .. } => exact(0.0),
        TestFunction::Affine { gradient, .. } => match domain {
            DomainSpec::Box { lo, hi } => {
                let widths: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
                exact(affine_box_increment(gradient, &widths, t))
            }
            DomainSpec::Ball { radius, .. } => exact(norm(gradient) * t.min(2.0 * radius)),
        },
        TestFunction::DistanceToPoint { anchor, scale } => {
            if !domain.contains(anchor) {
                return domain_err("catalog modulus needs the anchor inside the domain");
            }
            exact(scale.abs() * t.min(domain.farthest_distance(anchor)))
        }
        TestFunction::DistanceToBall {
            center,
            radius,
            scale,
        } => {
            if !domain.contains(center) {
                return domain_err("catalog modulus needs the ball center inside the domain");
            }
            let span = (domain.farthest_distance(center) - radius).max(0.0);
            exact(scale.abs() * t.min(span))
        }
        TestFunction::SineSum { .. } => {
            let osc = 2.0 * domain.dim() as f64;
            Ok(Modulus {
                value: (f.lipschitz(domain.dim()) * t).min(osc),
                kind: ModulusKind::Majorant,
            })
        }
    }
}

/// Max of `|f(x) - f(y)|` over random pairs at distance at most `t`.
pub fn empirical_modulus(f: &TestFunction, t: f64, domain: &DomainSpec, samples: u64, seed: u64) -> f64 {
    let d = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = domain.bounds();
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut best = 0.0f64;
    for _ in 0..samples {
        loop {
            for k in 0..d {
                x[k] = rng.random_range(lo[k]..=hi[k]);
            }
            if domain.contains(&x) {
                break;
            }
        }
        // alternate interior pairs with pairs on the sphere |x - y| = t
        sample_ball(&mut rng, &x, t, &mut y);
        if rng.random_bool(0.5) {
            let r = dist(&x, &y);
            if r > 0.0 {
                for k in 0..d {
                    y[k] = x[k] + (y[k] - x[k]) * t / r;
                }
            }
        }
        if domain.contains(&y) {
            best = best.max((f.eval(&x) - f.eval(&y)).abs());
        }
    }
    best
}
