//! Special functions, adaptive quadrature, numerical differentiation and
//! truncated Taylor series.
//!
//! Everything here is pure. Fallible routines return [`NumericsError`] and
//! never swallow a failed convergence: a quadrature that runs out of
//! subdivisions reports its best estimate inside the error.

mod bessel;
mod diff;
mod quadrature;
mod series;
mod special;

pub use bessel::{bessel_k, whittle_matern};
pub use diff::{derivative, high_order_derivative, num_derivative, one_sided_derivative, Side};
pub use quadrature::{quadrature, Endpoint, Quadrature};
pub use series::Series;
pub use special::{
    beta, erf, erf_inv, erfc, erfc_inv, gamma, ln_gamma, projected_tent_slope, sphere_area, unit_ball_volume,
};

use thiserror::Error;

/// A numerical value together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

impl Estimate {
    pub fn new(value: f64, abs_error: f64) -> Self {
        Estimate { value, abs_error }
    }

    /// An exact value (zero error).
    pub fn exact(value: f64) -> Self {
        Estimate { value, abs_error: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("{function}: argument {value} outside domain {domain}")]
    Domain {
        function: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error(
        "quadrature did not converge: best estimate {} with error {} after {evaluations} evaluations",
        .estimate.value, .estimate.abs_error
    )]
    NotConverged { estimate: Estimate, evaluations: usize },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("x = {x} lies within the stencil reach {reach} of declared kink {kink}")]
    NearKink { x: f64, kink: f64, reach: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;
