//! Ready-made models sharing a common TCF.
//!
//! erfc(√t) is realized as an M2r process and an M3b process in ℝ³ and as an
//! MPS process in ℝ². erfc(0.45 √(1 - e^{-t})) is realized as a BR, an EG and
//! an EBG process built from the exponential correlation.

use std::f64::consts::PI;

use crate::error::Result;
use crate::numerics::{erf, erfc};
use crate::operators::{transform_s, transform_t};

use super::distribution::Distribution1D;
use super::gaussian::{Correlation, Variogram};
use super::radial::RadialFunction;
use super::{ModelKind, TcfModel};

/// Rate λ with √(λ/8) = 0.45.
pub const DAMPED_RATE: f64 = 1.62;

/// f(u) = (1 + 4u) e^{-2u} / (π^{3/2} (2u)^{5/2}), the shape in ℝ³.
pub fn erfc_sqrt_shape(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::INFINITY;
    }
    (1.0 + 4.0 * u) * (-2.0 * u).exp() / (PI.powf(1.5) * (2.0 * u).powf(2.5))
}

pub fn erfc_sqrt_shape_radial() -> RadialFunction {
    RadialFunction::new("erfc-sqrt shape", erfc_sqrt_shape)
}

/// k(s) = (4s² + 8s + 5) e^{-s} / (12 √(π s)), density of the diameter 2R.
pub fn erfc_sqrt_diameter_density(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    (4.0 * s * s + 8.0 * s + 5.0) * (-s).exp() / (12.0 * (PI * s).sqrt())
}

fn erfc_sqrt_diameter_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    // lower incomplete gammas γ(n + 1/2, s) by recursion from γ(1/2, s)
    let g12 = PI.sqrt() * erf(s.sqrt());
    let g32 = 0.5 * g12 - s.sqrt() * (-s).exp();
    let g52 = 1.5 * g32 - s.powf(1.5) * (-s).exp();
    ((4.0 * g52 + 8.0 * g32 + 5.0 * g12) / (12.0 * PI.sqrt())).clamp(0.0, 1.0)
}

/// Law of the diameter 2R of the M3b balls.
pub fn erfc_sqrt_diameter_law() -> Distribution1D {
    Distribution1D::continuous("erfc-sqrt diameter", erfc_sqrt_diameter_cdf, (0.0, f64::INFINITY))
        .expect("valid support")
        .with_density(erfc_sqrt_diameter_density)
        .with_lower_exponent(-0.5)
}

/// Law of the radius R.
pub fn erfc_sqrt_radius_law() -> Distribution1D {
    erfc_sqrt_diameter_law().scaled(0.5).expect("positive scale")
}

/// F(s) = (2/π) arctan √(2s/π - 1) on (π/2, ∞), the MPS mixing law in ℝ².
pub fn erfc_sqrt_mps_law() -> Distribution1D {
    let lo = PI / 2.0;
    Distribution1D::continuous(
        "erfc-sqrt MPS mixing",
        move |s| {
            if s <= lo {
                0.0
            } else {
                2.0 / PI * (2.0 * s / PI - 1.0).sqrt().atan()
            }
        },
        (lo, f64::INFINITY),
    )
    .expect("valid support")
    .with_density(|s| 1.0 / (PI * s * (2.0 * s / PI - 1.0).sqrt()))
    .with_quantile(move |p| lo * (1.0 + (0.5 * PI * p).tan().powi(2)))
    .with_lower_exponent(-0.5)
    .with_tail_decay(1.5)
}

pub fn erfc_sqrt_m2r() -> Result<TcfModel> {
    TcfModel::new(3, ModelKind::M2r(erfc_sqrt_shape_radial()))
}

pub fn erfc_sqrt_m3b() -> Result<TcfModel> {
    TcfModel::new(3, ModelKind::M3b(erfc_sqrt_radius_law()))
}

pub fn erfc_sqrt_mps() -> Result<TcfModel> {
    TcfModel::new(2, ModelKind::Mps(erfc_sqrt_mps_law()))
}

/// erfc(0.45 √(1 - e^{-t})).
pub fn damped_tcf(t: f64) -> f64 {
    erfc(0.45 * (-(-t.abs()).exp_m1()).sqrt())
}

fn damped_erf(t: f64) -> f64 {
    erf(0.45 * (-(-t.abs()).exp_m1()).sqrt())
}

/// 1 - 2 erf(0.45 √(1 - e^{-t}))², written out directly.
pub fn damped_eg_closed(t: f64) -> f64 {
    1.0 - 2.0 * damped_erf(t).powi(2)
}

/// cos(π erf(0.45 √(1 - e^{-t}))), written out directly.
pub fn damped_ebg_closed(t: f64) -> f64 {
    (PI * damped_erf(t)).cos()
}

fn unit_exponential() -> Correlation {
    Correlation::Exponential { scale: 1.0 }
}

/// BR with γ(t) = 1.62 (1 - e^{-t}).
pub fn damped_br(dim: usize) -> Result<TcfModel> {
    TcfModel::new(
        dim,
        ModelKind::BrownResnick(Variogram::Bounded {
            lambda: DAMPED_RATE,
            correlation: unit_exponential(),
        }),
    )
}

/// ρ_EG(t) = S_{1.62}(e^{-t}).
pub fn damped_eg_correlation() -> RadialFunction {
    RadialFunction::new("S_1.62(exp(-t))", |t: f64| transform_s(DAMPED_RATE, (-t.abs()).exp()))
}

/// ρ_EBG(t) = T_{1.62}(e^{-t}).
pub fn damped_ebg_correlation() -> RadialFunction {
    RadialFunction::new("T_1.62(exp(-t))", |t: f64| transform_t(DAMPED_RATE, (-t.abs()).exp()))
}

pub fn damped_eg(dim: usize) -> Result<TcfModel> {
    TcfModel::new(
        dim,
        ModelKind::ExtremalGaussian(Correlation::User(damped_eg_correlation())),
    )
}

pub fn damped_ebg(dim: usize) -> Result<TcfModel> {
    TcfModel::new(
        dim,
        ModelKind::ExtremalBinaryGaussian(Correlation::User(damped_ebg_correlation())),
    )
}
