//! Gauss–Legendre quadrature with adaptive bisection.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Default panel rule size.
pub const DEFAULT_NODES: usize = 64;

/// Panel error above which the adaptive driver bisects.
pub const DEFAULT_PANEL_TOL: f64 = 1e-11;

const MAX_DEPTH: u32 = 48;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum over accepted panels of |coarse - refined|.
    pub error_estimate: f64,
    pub panels: usize,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 64-point rule.
    pub fn default_rule() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(DEFAULT_NODES))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fixed rule on `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        sum * half
    }

    /// Adaptive bisection: a panel is accepted once the rule on the panel and
    /// the rule on its two halves agree to `panel_tol` (absolute).
    pub fn adaptive<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, panel_tol: f64) -> Integral {
        let whole = self.integrate(f, a, b);
        let mut acc = Integral {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        };
        self.recurse(f, a, b, whole, panel_tol, 0, &mut acc);
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
        acc: &mut Integral,
    ) {
        let mid = 0.5 * (a + b);
        let left = self.integrate(f, a, mid);
        let right = self.integrate(f, mid, b);
        let refined = left + right;
        let diff = (refined - whole).abs();
        if diff <= tol || depth >= MAX_DEPTH || !(mid > a && mid < b) {
            acc.value += refined;
            acc.error_estimate += diff;
            acc.panels += 1;
            return;
        }
        self.recurse(f, a, mid, left, 0.5 * tol, depth + 1, acc);
        self.recurse(f, mid, b, right, 0.5 * tol, depth + 1, acc);
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates with the shared 64-point rule and default panel tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    GaussLegendre::default_rule()
        .adaptive(&f, a, b, DEFAULT_PANEL_TOL)
        .value
}
