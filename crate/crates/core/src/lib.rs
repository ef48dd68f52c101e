//! Numerical laboratory for operator algebras with contractive approximate
//! identities, realized on finite-dimensional matrix algebras.
//!
//! The central object is the cone `F_A = {x : ‖1 - x‖ ≤ 1}` and its half
//! `½F_A = {x : ‖1 - 2x‖ ≤ 1}`. Around it the crate provides the root
//! functional calculus, support and peak projections, spectral tests,
//! finite-dimensional algebras and their ideals, a discretized radical
//! convolution algebra, and completely positive map machinery.

pub mod algebra;
pub mod calculus;
pub mod cone;
pub mod domar;
pub mod error;
pub mod examples;
pub mod matrix;
pub mod ocpmap;
pub mod sample;
pub mod spectral;
pub mod suites;
pub mod subspace;
pub mod support;
pub mod tol;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use subspace::Subspace;
pub use tol::Tolerances;
