//! Numerical laboratory for random Fourier-Jacobi series.
//!
//! The crate provides the pieces needed to study series of the form
//! `sum_n d_n R_n(omega) phi_n(y)` where `phi_n` is a Jacobi-type basis,
//! `d_n` are deterministic Fourier-Jacobi coefficients of a test function
//! and `R_n(omega)` are stochastic integrals of basis elements against a
//! Wiener or symmetric alpha-stable process:
//!
//! * [`jacobi`] - the three polynomial families and their weights,
//! * [`quadrature`] - Gauss-Jacobi rules and coefficient expansion,
//! * [`functions`] - a catalog of test functions with smoothness diagnostics,
//! * [`rng`] / [`paths`] - reproducible counter-based sampling of process paths,
//! * [`integral`] - discretized stochastic integrals and random coefficients,
//! * [`series`] - partial sums, kernels and reference limits,
//! * [`diagnostics`] - Monte Carlo convergence and continuity experiments.

pub mod diagnostics;
pub mod error;
pub mod functions;
pub mod gamma;
pub mod integral;
pub mod jacobi;
pub mod numeric;
pub mod paths;
pub mod quadrature;
pub mod rng;
pub mod series;

pub use error::{Error, Result};
