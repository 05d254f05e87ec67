//! Scaled Shepard quasi-interpolation on scattered, quasi-uniform data.
//!
//! The approximant at `x` is the kernel-weighted average
//!
//! ```text
//! F_n(x) = Σ_y f(y) K(β_n (x - y)) / Σ_y K(β_n (x - y)),   β_n = n^{1/d} / C
//! ```
//!
//! where `K` is positive, bounded below on the unit ball and decays like
//! `κ (1 + |x|²)^{-α}`. Tying the dilation `β_n` to the fill distance of the
//! data gives an error of order `ω(f, n^{-1/d})` with a fully explicit
//! constant.
//!
//! The crate is organised around that estimate and the machinery that
//! verifies it:
//!
//! * [`specfun`]: Gamma/Beta/Pochhammer, ball volumes, Riemann zeta and the
//!   Gauss hypergeometric function `₂F₁` (power series plus an Euler-integral
//!   oracle).
//! * [`geometry`]: ball–ball lens volumes, annulus measures and their
//!   quadrature and Monte Carlo oracles.
//! * [`pointset`]: quasi-uniform point families, separation radius, fill
//!   distance and annulus occupancy bounds.
//! * [`shepard`]: the kernel class, the operator, its explicit constants and
//!   the error-verification harness.
//!
//! The classical Shepard base `|x|^{-λ}` is singular at the origin and so is
//! not a member of the kernel class used here; the approximants built by this
//! crate are quasi-interpolants and do not reproduce data values at the sites.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod pointset;
pub mod quadrature;
pub mod shepard;
pub mod specfun;

pub use error::{Error, Result};
