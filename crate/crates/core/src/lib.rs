//! Tail correlation functions of stationary max-stable processes.
//!
//! The crate evaluates, inverts, transforms, tests and simulates TCFs:
//!
//! * [`numerics`]: special functions, quadrature, differentiation, Taylor series
//! * [`tcf_models`]: TCFs of the process classes and of parametric families
//! * [`recovery`]: shapes and radius laws that realize a given TCF
//! * [`operators`]: correlation transforms, turning bands, φ_d and friends
//! * [`membership`]: necessary-condition tests for TCF classes
//! * [`simulate`]: max-stable fields on grids and the extremal-coefficient estimator

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod membership;
pub mod numerics;
pub mod operators;
pub mod recovery;
pub mod simulate;
pub mod tcf_models;

pub use error::{Error, Result};
