//! Linear and nonlinear Schrödinger evolution in one dimension with point
//! interactions.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`]: uniform-grid complex functions, trapezoid integration, FFT convolution.
//! - [`lorentz`]: decreasing rearrangements, weak-Lᵖ and Lorentz norms.
//! - [`spectral`]: bound states, scattering data, generalized eigenfunctions.
//! - [`propagator`]: free, δ, δ′ and two-δ propagators plus decay diagnostics.
//! - [`nls`]: weighted-space Picard solver for `i u_t + Δ_σ u = λ|u|^{ρ-1}u`.
//! - [`wiener`]: Fourier-side solvers in ℓ¹ and on atomic measures.
//! - [`acceptance`]: end-to-end checks shared by the test suite and the CLI.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod error;
pub mod grid;
pub mod lorentz;
pub mod nls;
pub mod propagator;
pub mod quadrature;
pub mod spectral;
pub mod wiener;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use num_complex::Complex64 as C64;
pub use spectral::PointInteraction;

/// Library version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
