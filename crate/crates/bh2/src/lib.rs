//! Numerical toolkit for the attractive two-site Bose-Hubbard model.
//!
//! The crate computes exact spectra of the reduced tridiagonal Hamiltonian,
//! solves the Bethe equations for the ground and first-excited states,
//! evaluates the closed-form energy approximations with their validity
//! regimes, and expands Bethe vectors into Fock space for expectation
//! values.

pub mod approx;
pub mod bethe;
mod dd;
pub mod exact;
pub mod fock;
pub mod model;
#[doc(hidden)]
pub mod oracles;

/// Format a float with 17 significant digits, stable across runs.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Relative difference |a-b| / max(1, |b|), the comparison used throughout
/// the test suites.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
