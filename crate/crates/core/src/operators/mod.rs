//! Operators that map TCFs to TCFs, and the explicit functions used to probe
//! the boundaries between TCF classes.

mod transforms;
mod turning_bands;

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    erf, erf_inv, erfc, erfc_inv, gamma, projected_tent_slope, Endpoint, Estimate, Quadrature, Series,
};
use crate::tcf_models::{h_d, h_d_radial, Distribution1D, RadialFunction, ShapeEnsemble};

pub use crate::tcf_models::{phi_d, phi_d_neg_deriv_sqrt, phi_d_radial};
pub use transforms::{
    is_admissible, r_coefficient, taylor_abs_monotone, transform_bound, transform_r, transform_s, transform_t,
    TaylorReport, TransformMap, TransformSpec,
};
pub use turning_bands::{
    turning_bands, turning_bands_monte_carlo, turning_bands_radial, turning_bands_tol, TurningBandsSpec,
};

/// 1 - erf(√x)², computed as erfc(√x)(1 + erf(√x)).
pub fn erf_sqrt_complement(x: f64) -> f64 {
    let s = x.max(0.0).sqrt();
    erfc(s) * (1.0 + erf(s))
}

/// ∫_0^1 s^{2j} e^{-y s²} ds = e^{-y} Σ_m (2y)^m / ((2j+1)(2j+3)⋯(2j+2m+1)).
fn gaussian_moment(j: usize, y: f64) -> f64 {
    let mut term = 1.0 / (2 * j + 1) as f64;
    let mut sum = term;
    for m in 1..10_000 {
        term *= 2.0 * y / (2 * j + 2 * m + 1) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    (-y).exp() * sum
}

/// The derivative -(2/√π) erf(√x)/√x e^{-x}.
pub fn erf_sqrt_complement_derivative(x: f64) -> f64 {
    let x = x.max(0.0);
    let ratio = if x < 1.0 {
        2.0 / PI.sqrt() * gaussian_moment(0, x)
    } else {
        erf(x.sqrt()) / x.sqrt()
    };
    -2.0 / PI.sqrt() * ratio * (-x).exp()
}

/// Taylor coefficients of 1 - erf(√y)² about y0 ≥ 0.
///
/// The derivative is -(4/π) e^{-y} ∫_0^1 e^{-y s²} ds, a product of two
/// series whose coefficients alternate in sign, so every coefficient is a
/// sum of like-signed terms.
pub fn erf_sqrt_complement_taylor(y0: f64, len: usize) -> Vec<f64> {
    let mut fact = 1.0;
    let mut g = Vec::with_capacity(len);
    let mut e = Vec::with_capacity(len);
    for j in 0..len {
        if j > 0 {
            fact *= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        g.push(sign * gaussian_moment(j, y0) / fact);
        e.push(sign * (-y0).exp() / fact);
    }
    let mut out = vec![erf_sqrt_complement(y0)];
    for k in 1..len {
        let p: f64 = (0..k).map(|i| g[i] * e[k - 1 - i]).sum();
        out.push(-4.0 / PI * p / k as f64);
    }
    out
}

/// Source of the covariogram factor in [`multiply_overlap`].
#[derive(Debug, Clone)]
pub enum OverlapModel {
    /// Random balls of radius R in ℝ^d.
    Ball { radius: Distribution1D, dim: usize },
    /// Random sets given by their normalized covariograms
    /// t ↦ ∫B(z)B(z-t)dz / ∫B(z)dz, averaged by Monte Carlo.
    Ensemble(ShapeEnsemble),
}

/// E_B[normalized covariogram of B at t].
pub fn overlap_factor(model: &OverlapModel, t: f64, tol: f64) -> Result<Estimate> {
    if t == 0.0 {
        return Ok(Estimate::exact(1.0));
    }
    match model {
        OverlapModel::Ball { radius, dim } => {
            let d = *dim;
            radius.expect_with(|r| h_d(t / (2.0 * r), d), &[0.5 * t], tol)
        }
        OverlapModel::Ensemble(ens) => {
            let mut rng = ChaCha8Rng::seed_from_u64(ens.seed);
            let n = ens.samples.max(1);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let v = ens.sample(&mut rng).eval(t);
                s += v;
                s2 += v * v;
            }
            let mean = s / n as f64;
            let var = (s2 / n as f64 - mean * mean).max(0.0);
            Ok(Estimate::new(mean, (var / n as f64).sqrt()))
        }
    }
}

/// overlap_factor(t)·χ(t), the TCF of the process multiplied by random sets.
pub fn multiply_overlap(chi: &RadialFunction, model: &OverlapModel, t: f64, tol: f64) -> Result<Estimate> {
    let f = overlap_factor(model, t, tol)?;
    let c = chi.eval(t);
    Ok(Estimate::new(f.value * c, f.abs_error * c.abs()))
}

pub fn multiply_overlap_radial(chi: &RadialFunction, model: &OverlapModel, tol: f64) -> RadialFunction {
    let (c, m) = (chi.clone(), model.clone());
    let out = RadialFunction::new(format!("overlap·{}", chi.name()), move |t| {
        multiply_overlap(&c, &m, t, tol).map_or(f64::NAN, |e| e.value)
    });
    match model {
        OverlapModel::Ball { radius, .. } if radius.is_atomic() => {
            let kinks: Vec<f64> = radius
                .atoms()
                .iter()
                .map(|a| 2.0 * a.0)
                .chain(chi.kinks().iter().copied())
                .collect();
            out.with_kinks(&kinks)
        }
        _ => out.with_kinks(chi.kinks()),
    }
}

/// χ_d(t) = φ_d(2t) h_d(t).
pub fn chi_d(t: f64, d: usize) -> f64 {
    phi_d(2.0 * t, d) * h_d(t, d)
}

pub fn chi_d_radial(d: usize) -> RadialFunction {
    phi_d_radial(d)
        .scale_argument(2.0)
        .product(&h_d_radial(d))
        .renamed(format!("chi_{d}"))
}

/// t ↦ -f'(√t); requires a jet.
pub fn neg_deriv_sqrt(f: &RadialFunction) -> Result<RadialFunction> {
    let nd = f
        .negative_derivative()
        .ok_or_else(|| Error::Precondition(format!("'{}' has no jet", f.name())))?;
    Ok(nd.compose_sqrt())
}

/// c(t) = ∫_0^t √(v/(t - v)) (-φ_d'(1/√v)) dv.
pub fn counterexample_c(t: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(crate::error::domain("d", d as f64, "{2, 3, …}"));
    }
    if !(t > 0.0) {
        return Err(crate::error::domain("t", t, "(0, ∞)"));
    }
    let b = projected_tent_slope(d);
    let e = 0.5 * (d as f64 - 1.0);
    // v = t(1 - w²): c(t) = 2t ∫_0^1 √(1 - w²) (-φ_d'(1/√v)) dw, where
    // -φ_d'(1/√v) is β_d for v ≥ 1 and β_d (1 - (1 - v)^{(d-1)/2}) below
    let (w_kink, mut total) = if t > 1.0 {
        let u = (1.0 / t).sqrt();
        (
            (1.0 - 1.0 / t).sqrt(),
            b * t * (0.5 * PI - u.asin() + u * (1.0 - u * u).sqrt()),
        )
    } else {
        (0.0, 0.0)
    };
    let left = if t > 1.0 && e.fract() != 0.0 {
        Endpoint::Singular(e)
    } else {
        Endpoint::Regular
    };
    let part = Quadrature::new(1e-15)
        .rel_tol(1e-14)
        .left(left)
        .right(Endpoint::Singular(0.5))
        .integrate(
            |w| {
                let gap = (1.0 - t + t * w * w).max(0.0);
                2.0 * t * (1.0 - w * w).max(0.0).sqrt() * b * (1.0 - gap.powf(e))
            },
            w_kink,
            1.0,
        )?;
    total += part.value;
    Ok(total)
}

/// c''(1) = -β_d (d-1) 3√π Γ(d/2 - 2) / (16 Γ((d+1)/2)) for d ≥ 6.
pub fn c_second_deriv_at_1(d: usize) -> Result<f64> {
    if d < 6 {
        return Err(crate::error::domain("d", d as f64, "{6, 7, …}"));
    }
    let df = d as f64;
    Ok(
        -projected_tent_slope(d) * (df - 1.0) * 3.0 * PI.sqrt() * gamma(0.5 * df - 2.0)
            / (16.0 * gamma(0.5 * (df + 1.0))),
    )
}

fn mixture_target(r: &Series) -> (Series, bool) {
    // 0.25 erfc(√r) + 0.75 erfc(5√r), or its complement when that is small
    let s = r.sqrt();
    let m = &s.erfc().scale(0.25) + &s.scale(5.0).erfc().scale(0.75);
    if m.value() > 0.5 {
        (&s.erf().scale(0.25) + &s.scale(5.0).erf().scale(0.75), true)
    } else {
        (m, false)
    }
}

/// Series Y with erfc(Y) = m (or erf(Y) = 1 - m) by Newton iteration.
fn inverse_series(target: &Series, via_erf: bool) -> Result<Series> {
    let n = target.len();
    let y0 = if via_erf {
        erf_inv(target.value())?
    } else {
        erfc_inv(target.value())?
    };
    let mut y = Series::constant(y0, n);
    for _ in 0..=n {
        let (val, slope) = if via_erf {
            (y.erf(), (&y * &y).scale(-1.0).exp().scale(2.0 / PI.sqrt()))
        } else {
            (y.erfc(), (&y * &y).scale(-1.0).exp().scale(-2.0 / PI.sqrt()))
        };
        y = &y - &(&val - target).div(&slope);
    }
    Ok(y)
}

/// ψ(r) = erfc_inv(0.25 erfc(√r) + 0.75 erfc(5√r))².
pub fn psi_bernstein_counterexample(r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(psi_jet(r, 1)?.value())
}

/// Taylor jet of ψ about r > 0 with `len` coefficients.
pub fn psi_jet(r: f64, len: usize) -> Result<Series> {
    if !(r > 0.0) {
        return Err(crate::error::domain("r", r, "(0, ∞)"));
    }
    let (target, via_erf) = mixture_target(&Series::variable(r, len));
    let y = inverse_series(&target, via_erf)?;
    Ok(&y * &y)
}

/// A local minimum of ψ''.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiMinimum {
    pub location: f64,
    pub second_derivative: f64,
}

/// Local minima of ψ'' on [lo, hi]: sign changes of ψ''' from - to + on a log
/// grid, refined by golden-section search on ψ''.
pub fn psi_second_derivative_minima(lo: f64, hi: f64, points: usize) -> Result<Vec<PsiMinimum>> {
    let d2 = |r: f64| -> Result<f64> { Ok(psi_jet(r, 3)?.derivative_at(2).unwrap_or(f64::NAN)) };
    let d3 = |r: f64| -> Result<f64> { Ok(psi_jet(r, 4)?.derivative_at(3).unwrap_or(f64::NAN)) };
    let (la, lb) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..points)
        .map(|i| (la + (lb - la) * i as f64 / (points - 1) as f64).exp())
        .collect();
    let slopes = grid.iter().map(|&r| d3(r)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 1..points {
        if slopes[i - 1] < 0.0 && slopes[i] >= 0.0 {
            let (mut a, mut b) = (grid[i - 1], grid[i]);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut c = b - g * (b - a);
            let mut e = a + g * (b - a);
            let (mut fc, mut fe) = (d2(c)?, d2(e)?);
            while b - a > 1e-12 * b {
                if fc < fe {
                    b = e;
                    e = c;
                    fe = fc;
                    c = b - g * (b - a);
                    fc = d2(c)?;
                } else {
                    a = c;
                    c = e;
                    fc = fe;
                    e = a + g * (b - a);
                    fe = d2(e)?;
                }
            }
            let location = 0.5 * (a + b);
            out.push(PsiMinimum {
                location,
                second_derivative: d2(location)?,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{num_derivative, Side};

    #[test]
    fn erf_sqrt_complement_values() {
        assert_eq!(erf_sqrt_complement(0.0), 1.0);
        assert!(erf_sqrt_complement(36.0) < 1e-15);
        for &x in &[0.01, 0.3, 2.0, 7.0] {
            let fd = num_derivative(erf_sqrt_complement, x, 1, None, &[]).unwrap().value;
            assert!((fd - erf_sqrt_complement_derivative(x)).abs() < 1e-8, "x={x}");
        }
        assert!((erf_sqrt_complement_derivative(0.0) + 4.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn erf_sqrt_complement_taylor_matches_series_arithmetic() {
        let y0 = 0.4;
        let t = erf_sqrt_complement_taylor(y0, 8);
        let s = Series::variable(y0, 8).sqrt().erf();
        let direct = (&s * &s).scale(-1.0).add_const(1.0);
        for (k, (&tk, &dk)) in t.iter().zip(direct.coeffs()).enumerate() {
            assert!((tk - dk).abs() < 1e-13, "k={k}");
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!(sign * tk > 0.0);
        }
    }

    #[test]
    fn ball_overlap_reduces_to_h_d() {
        let m = OverlapModel::Ball {
            radius: Distribution1D::point_mass(0.5).unwrap(),
            dim: 3,
        };
        let one = RadialFunction::new("1", |_| 1.0);
        for &t in &[0.0, 0.3, 0.9, 1.2] {
            let v = multiply_overlap(&one, &m, t, 1e-12).unwrap().value;
            assert!((v - h_d(t, 3)).abs() < 1e-14);
        }
    }

    #[test]
    fn chi_3_kink_slopes() {
        let g = neg_deriv_sqrt(&chi_d_radial(3)).unwrap();
        let l = g.one_sided_derivative(1, 0.25, Side::Left).unwrap().value;
        let r = g.one_sided_derivative(1, 0.25, Side::Right).unwrap().value;
        assert!((l + 3.0).abs() < 1e-4, "{l}");
        assert!((r + 4.25).abs() < 1e-4, "{r}");
    }

    #[test]
    fn c_closed_form_second_derivative() {
        for d in 6..=8 {
            let want = c_second_deriv_at_1(d).unwrap();
            let got = num_derivative(|t| counterexample_c(t, d).unwrap(), 1.0, 2, Some(1e-3), &[])
                .unwrap()
                .value;
            assert!(want < 0.0);
            assert!((got / want - 1.0).abs() < 1e-4, "d={d}: {got} vs {want}");
        }
        assert!(counterexample_c(1e-12, 3).unwrap().abs() < 1e-15);
    }

    #[test]
    fn psi_has_a_second_derivative_dip() {
        assert_eq!(psi_bernstein_counterexample(0.0).unwrap(), 0.0);
        let v = psi_bernstein_counterexample(0.5).unwrap();
        let m = 0.25 * erfc(0.5f64.sqrt()) + 0.75 * erfc(5.0 * 0.5f64.sqrt());
        assert!((erfc(v.sqrt()) - m).abs() < 1e-13);
        let mins = psi_second_derivative_minima(1e-4, 10.0, 2000).unwrap();
        assert!(!mins.is_empty());
    }
}
