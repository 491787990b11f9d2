//! Numerical laboratory for travelling fronts in a population structured by
//! space and a motility trait.
//!
//! * [`domain`]: parameters, grids, density fields and initial data.
//! * [`spectral`]: the trait eigenvalue problem, the dispersion curve and
//!   the minimal speed `c*`.
//! * [`pde`]: time integration of the nonlocal reaction-diffusion system.
//! * [`hj`]: the constrained Hamilton-Jacobi limit and its explicit front law.
//! * [`verify`]: cross-module checks producing a [`verify::VerificationReport`].

// Validation negates comparisons so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod error;
pub mod hj;
pub mod pde;
pub mod search;
pub mod spectral;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
