//! Radial base kernels with certified decay and positivity constants.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when certifying `m1` and `κ` on the radial grid.
const CERT_TOL: f64 = 1e-12;
const CERT_RADIUS: f64 = 100.0;
const CERT_POINTS: usize = 10_000;

/// Radial profile `φ(|x|²)`.
pub type RadialProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum KernelKind {
    /// `(1 + |x|²)^{-a}`.
    InverseMultiquadric {
        exponent: f64,
    },
    /// `exp(-|x|²)`.
    Gaussian,
    Custom(RadialProfile),
}

impl fmt::Debug for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InverseMultiquadric { exponent } => f
                .debug_struct("InverseMultiquadric")
                .field("exponent", exponent)
                .finish(),
            Self::Gaussian => f.write_str("Gaussian"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Serializable description of a built-in kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum KernelDescriptor {
    InverseMultiquadric { alpha: f64 },
    Gaussian { alpha: f64 },
}

impl KernelDescriptor {
    pub fn build(&self) -> Result<KernelSpec> {
        match *self {
            Self::InverseMultiquadric { alpha } => kernel_inverse_multiquadric(alpha),
            Self::Gaussian { alpha } => kernel_gaussian(alpha),
        }
    }
}

/// Fast evaluation path for `(1+r²)^{-a}`.
#[derive(Debug, Clone, Copy)]
enum Power {
    Int(i32),
    HalfInt(i32),
    Real(f64),
}

impl Power {
    fn of(a: f64) -> Self {
        let two_a = 2.0 * a;
        if a.fract() == 0.0 && a.abs() < 64.0 {
            Self::Int(a as i32)
        } else if two_a.fract() == 0.0 && two_a.abs() < 128.0 {
            Self::HalfInt(a.floor() as i32)
        } else {
            Self::Real(a)
        }
    }

    #[inline]
    fn inv(self, base: f64) -> f64 {
        match self {
            Self::Int(k) => base.powi(-k),
            Self::HalfInt(k) => base.powi(-k) / base.sqrt(),
            Self::Real(a) => base.powf(-a),
        }
    }
}

/// A positive radial kernel `K` with `m1 = min_{|x|≤1} K(x) > 0` and
/// `K(x) ≤ κ (1+|x|²)^{-α}`.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    name: String,
    kind: KernelKind,
    kappa: f64,
    alpha: f64,
    m1: f64,
    power: Power,
    descriptor: Option<KernelDescriptor>,
}

impl KernelSpec {
    /// A user-supplied profile `φ(|x|²)`. The claimed constants are checked
    /// on a radial grid before the kernel is accepted.
    pub fn custom(
        name: impl Into<String>,
        profile: RadialProfile,
        kappa: f64,
        alpha: f64,
        m1: f64,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            kind: KernelKind::Custom(profile),
            kappa,
            alpha,
            m1,
            power: Power::of(1.0),
            descriptor: None,
        };
        spec.certify()?;
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    /// `None` for custom kernels, which cannot be serialized.
    pub fn descriptor(&self) -> Option<&KernelDescriptor> {
        self.descriptor.as_ref()
    }

    /// `K(x)` as a function of `|x|²`.
    #[inline]
    pub fn eval_r2(&self, r2: f64) -> f64 {
        match &self.kind {
            KernelKind::InverseMultiquadric { .. } => self.power.inv(1.0 + r2),
            KernelKind::Gaussian => (-r2).exp(),
            KernelKind::Custom(p) => p(r2),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.eval_r2(x.iter().map(|v| v * v).sum())
    }

    /// The decay envelope `κ (1+r²)^{-α}`.
    pub fn envelope_r2(&self, r2: f64) -> f64 {
        self.kappa * (1.0 + r2).powf(-self.alpha)
    }

    /// Checks `m1 > 0`, `K ≥ m1` on `[0, 1]`, `K ≥ 0` and
    /// `K ≤ κ(1+r²)^{-α}` on `[0, 100]`, up to a relative `1e-12`.
    pub fn certify(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Kernel(format!("{}: {msg}", self.name)));
        if !(self.m1 > 0.0 && self.m1.is_finite()) {
            return bad(format!("m1 must be positive, got {}", self.m1));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        for i in 0..=CERT_POINTS / 10 {
            let r = i as f64 / (CERT_POINTS / 10) as f64;
            let k = self.eval_r2(r * r);
            if !(k >= self.m1 * (1.0 - CERT_TOL)) {
                return bad(format!("K = {k} < m1 = {} at |x| = {r}", self.m1));
            }
        }
        for i in 0..=CERT_POINTS {
            let r = CERT_RADIUS * i as f64 / CERT_POINTS as f64;
            let r2 = r * r;
            let k = self.eval_r2(r2);
            // exp(-r²) underflows to 0 far out; only negativity is an error
            if !k.is_finite() || k < 0.0 {
                return bad(format!("K must be nonnegative and finite, got {k} at |x| = {r}"));
            }
            let env = self.envelope_r2(r2);
            if k > env * (1.0 + CERT_TOL) {
                return bad(format!("K = {k} exceeds the envelope {env} at |x| = {r}"));
            }
        }
        Ok(())
    }
}

/// `(1 + |x|²)^{-α}` with `κ = 1` and `m1 = 2^{-α}`.
pub fn kernel_inverse_multiquadric(alpha: f64) -> Result<KernelSpec> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Kernel(format!("alpha must be positive, got {alpha}")));
    }
    let spec = KernelSpec {
        name: format!("inverse_multiquadric(alpha={alpha})"),
        kind: KernelKind::InverseMultiquadric { exponent: alpha },
        kappa: 1.0,
        alpha,
        m1: 2f64.powf(-alpha),
        power: Power::of(alpha),
        descriptor: Some(KernelDescriptor::InverseMultiquadric { alpha }),
    };
    spec.certify()?;
    Ok(spec)
}

/// `sup_{t≥0} (1+t)^α e^{-t}`: attained at `t = α - 1` when `α > 1`.
fn gaussian_kappa(alpha: f64) -> f64 {
    if alpha <= 1.0 {
        1.0
    } else {
        (alpha * alpha.ln() - (alpha - 1.0)).exp()
    }
}

/// `exp(-|x|²)` viewed as an `α`-decaying kernel: `m1 = e^{-1}` and
/// `κ = sup (1+t)^α e^{-t}`.
pub fn kernel_gaussian(alpha: f64) -> Result<KernelSpec> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Kernel(format!("alpha must be positive, got {alpha}")));
    }
    let spec = KernelSpec {
        name: format!("gaussian(alpha={alpha})"),
        kind: KernelKind::Gaussian,
        kappa: gaussian_kappa(alpha) * (1.0 + 1e-14),
        alpha,
        m1: (-1.0f64).exp(),
        power: Power::of(1.0),
        descriptor: Some(KernelDescriptor::Gaussian { alpha }),
    };
    spec.certify()?;
    Ok(spec)
}
