//! Finite-dimensional quantum feedback thermodynamics.
//!
//! This crate simulates discrete measurement-feedback protocols on a system
//! coupled to finite heat baths, computes the QC-mutual information and the
//! related entropy functionals, and numerically verifies the generalized
//! second-law bounds (entropy inequality, exact second law, Clausius,
//! isothermal and two-bath work bounds) on both randomized instances and the
//! analytically saturating Szilard / Carnot-with-feedback scenarios.
//!
//! Layout:
//! - [`operators`]: dense complex-matrix substrate (tensor products, partial
//!   traces, Hermitian spectral calculus, validity checks).
//! - [`thermo`]: Gibbs states, partition functions, free and internal energy.
//! - [`measurement`]: measurement channels, POVMs, outcome statistics, and
//!   seeded random instance generators.
//! - [`information`]: entropy and information functionals (von Neumann,
//!   Shannon, QC-mutual information, Holevo chi, proof constructions).
//! - [`protocol`]: the five-stage protocol engine and inequality verifiers.
//! - [`scenarios`]: closed-form Szilard and Carnot-with-feedback ledgers.
//! - [`campaign`]: randomized verification campaigns over seeded instances.
//! - [`report`]: JSON/text report emission and the protocol-spec wire format.

pub mod campaign;
pub mod error;
pub mod information;
pub mod measurement;
pub mod operators;
pub mod protocol;
pub mod report;
pub mod scenarios;
pub mod thermo;
pub mod tol;

pub use error::{Error, Result};
pub use operators::{CMatrix, Complex64, CompositeSpace, DensityOperator, HermitianOperator};
