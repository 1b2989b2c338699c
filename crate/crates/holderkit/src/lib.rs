//! Numerical toolkit for Hölder regularity of centered Gaussian processes.
//!
//! The crate is organized around the equivalence between metric-side and
//! path-side regularity: a power bound on the increment metric
//! `d_X(t,s) <= c |t-s|^(H-eps)` on one side, pathwise Hölder constants with
//! finite exponential moments on the other.
//!
//! - [`covariance`]: covariance models (fBm, Brownian motion, OU, spectral,
//!   Volterra-kernel and self-similar representations) and their increment
//!   metrics.
//! - [`regularity`]: exponent fitting, metric-decay checks, divergence
//!   scans, and the kernel-based sufficient conditions.
//! - [`simulate`]: exact Gaussian sampling (Cholesky and circulant
//!   embedding) with reproducible parallel streams.
//! - [`pathstats`]: pathwise Hölder constants and exponents, the
//!   Garsia–Rodemich–Rumsey functional, and exponential-moment estimates.
//! - [`cli`]: config-driven orchestration producing `report.json` and CSVs.
//!
//! Start with the `examples/` directory: each major capability has a
//! runnable example.

pub mod covariance;
pub mod error;
pub mod matrix;
pub mod pathstats;
pub mod quad;
pub mod regularity;
pub mod simulate;

pub mod cli;

pub use error::{Error, Result};
