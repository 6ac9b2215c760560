//! Hilbert–Schmidt separable volumes of two-qubit density matrices.
//!
//! The Bloore parameterization `ρ_ij = √(ρ_ii ρ_jj) z_ij` decouples the
//! positivity conditions from the diagonal entries, and the determinant of
//! the partial transpose depends on the diagonal only through the ratio
//! `ν = ρ11 ρ44 / (ρ22 ρ33)`. The separable volume therefore reduces to a
//! one-dimensional integral `2 ∫₀¹ Jac(ν) F(ν) dν`, where `Jac` is a known
//! closed form and `F` is estimated by quasi-Monte Carlo over the Bloore
//! variables.
//!
//! Modules, in pipeline order:
//!
//! * [`bloore`] – density-matrix algebra, PSD/PPT tests, CAD bounds.
//! * [`qmc`] – scrambled generalized Faure sequences.
//! * [`jacobian`] – stable evaluation of `Jac_real` and `Jac_complex`.
//! * [`estimator`] – the `F(ν)` campaign and total-volume validation.
//! * [`betafit`] – incomplete beta function, the fitted models, least squares.
//! * [`volume`] – separable volumes, probabilities and hyperareas.
//! * [`verify`] – desk-scale acceptance checks, shared by the CLI and tests.

// `!(x >= 0.0)` is used on purpose to reject NaN alongside negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod betafit;
pub mod bloore;
mod case;
pub mod cli;
mod dd;
mod error;
pub mod estimator;
pub mod jacobian;
pub mod qmc;
pub mod quadrature;
pub mod verify;
pub mod volume;

pub use case::Case;
pub use error::{Error, Result};
