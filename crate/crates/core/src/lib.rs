//! Spectral analysis of 2x2 Dirac-type boundary value problems on `[0, 1]`.
//!
//! The crate models first-order systems `-i B^{-1} y' + Q(x) y = λ y` with a
//! diagonal weight matrix `B = diag(b1, b2)`, `b1 < 0 < b2`, an off-diagonal
//! potential `Q`, and two-point boundary conditions. It provides:
//!
//! * boundary-condition algebra: canonical form, regularity, strict-regularity
//!   classification, adjoint conditions and self-adjointness tests ([`bc`]);
//! * the unperturbed characteristic function and its zero set, via closed
//!   forms, a polynomial reduction for commensurable weights, or an
//!   argument-principle contour solver ([`det0`]);
//! * the perturbed problem: fundamental matrices, characteristic determinants,
//!   localized zeros and eigenfunctions ([`perturbed`]);
//! * diagnostics for Riesz/Bari-type basis behaviour of eigenvector pairs
//!   ([`bari`]);
//! * reduction of a damped-string evolution problem to a Dirac-type system
//!   ([`damped_string`]).

pub mod bari;
pub mod bc;
pub mod contour;
pub mod damped_string;
pub mod det0;
pub mod perturbed;
pub mod polyroots;
pub mod potential;
pub mod quad;
pub mod weights;

mod ode;

pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub(crate) type C64 = num_complex::Complex64;

/// Absolute tolerance for determinant-style degeneracy tests, scaled by the
/// magnitude of the participating entries.
pub fn tol_det(scale: f64) -> f64 {
    1e-12 * (1.0 + scale)
}

/// Tolerance used for all self-adjointness relation residuals.
pub const TOL_SA: f64 = 1e-10;

/// Target accuracy of the fundamental-matrix integrator per unit interval.
pub const ODE_TOL: f64 = 1e-10;

/// Relative tolerance of quadrature-based comparisons.
pub const QUAD_TOL: f64 = 1e-8;

/// Distance below which two zeros are treated as one multiple zero.
pub const MULT_TOL: f64 = 1e-6;

/// Residual tolerance for accepting `value` as a zero of the characteristic
/// function of the boundary condition `bc`.
pub fn res_tol(bc: &bc::CanonicalBc) -> f64 {
    1e-10 * (2.0 + bc.a.norm() + bc.d.norm() + bc.u().norm())
}
