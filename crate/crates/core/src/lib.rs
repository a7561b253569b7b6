//! Numerical toolkit for subharmonic almost periodic functions on a
//! horizontal strip `S = {z : y_low < Im z < y_high}`.
//!
//! The crate is organised by concern:
//!
//! * [`model`] – strip geometry, symbolic generators ([`FunctionExpr`]) and
//!   sampled fields ([`GridField`]).
//! * [`metrics`] – uniform and Stepanov distances, almost-period search.
//! * [`fourier`] – mean values, Fourier–Bohr coefficients, spectra, Bessel
//!   deficits and Bochner–Fejér approximants.
//! * [`potential`] – Green potentials, Riesz measures and decomposition, the
//!   strip kernel, sub-mean-value checks.
//! * [`harness`] – reproducible experiments over a fixed generator corpus.
//! * [`cli`] – the `apstrip` command-line front end.

pub mod cli;
pub mod error;
pub mod fourier;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod potential;

pub use error::{Error, Result};
pub use model::{Complex, FunctionExpr, GridField, StripSpec};
