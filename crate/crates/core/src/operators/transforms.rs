//! Correlation-to-correlation maps R, S_λ, T_λ = R ∘ S_λ, their α-shifted
//! versions x ↦ A((1 - α)x + α), and the Taylor data behind their
//! admissibility.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::numerics::{erf, erf_inv, ln_gamma, Series};

use super::erf_sqrt_complement_taylor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMap {
    R,
    S,
    T,
}

impl TransformMap {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "R" | "r" => Some(TransformMap::R),
            "S" | "s" => Some(TransformMap::S),
            "T" | "t" => Some(TransformMap::T),
            _ => None,
        }
    }
}

/// A map with its rate λ (ignored by R) and shift α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSpec {
    pub map: TransformMap,
    pub lambda: f64,
    pub alpha: f64,
}

impl TransformSpec {
    pub fn new(map: TransformMap, lambda: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(crate::error::domain("alpha", alpha, "[0, 1]"));
        }
        if map != TransformMap::R && !(lambda > 0.0 && lambda.is_finite()) {
            return Err(crate::error::domain("lambda", lambda, "(0, ∞)"));
        }
        Ok(TransformSpec { map, lambda, alpha })
    }

    /// A((1 - α)x + α).
    pub fn apply(&self, x: f64) -> f64 {
        let y = (1.0 - self.alpha) * x + self.alpha;
        match self.map {
            TransformMap::R => transform_r(y),
            TransformMap::S => transform_s(self.lambda, y),
            TransformMap::T => transform_t(self.lambda, y),
        }
    }

    /// Rate of the unshifted map equal to this one: S_{λ,α} = S_{λ(1-α)}.
    fn effective_lambda(&self) -> f64 {
        self.lambda * (1.0 - self.alpha)
    }
}

/// R(x) = cos(π √((1 - x)/2)).
pub fn transform_r(x: f64) -> f64 {
    (PI * (0.5 * (1.0 - x)).max(0.0).sqrt()).cos()
}

fn half_erf(lambda: f64, x: f64) -> f64 {
    erf((lambda * (1.0 - x) / 8.0).max(0.0).sqrt())
}

/// S_λ(x) = 1 - 2 erf(√(λ(1 - x)/8))².
pub fn transform_s(lambda: f64, x: f64) -> f64 {
    let e = half_erf(lambda, x);
    1.0 - 2.0 * e * e
}

/// T_λ(x) = cos(π erf(√(λ(1 - x)/8))).
pub fn transform_t(lambda: f64, x: f64) -> f64 {
    (PI * half_erf(lambda, x)).cos()
}

/// Largest λ(1 - α) keeping S (or T) absolutely monotone; `None` for R,
/// whose constraint is α ≥ 1/2 instead. Infinite at α = 1.
pub fn transform_bound(map: TransformMap, alpha: f64) -> Option<f64> {
    let base = match map {
        TransformMap::R => return None,
        TransformMap::S => erf_inv(FRAC_1_SQRT_2).ok()?,
        TransformMap::T => erf_inv(0.5).ok()?,
    };
    if alpha >= 1.0 {
        return Some(f64::INFINITY);
    }
    Some(8.0 * base * base / (1.0 - alpha))
}

pub fn is_admissible(spec: &TransformSpec) -> bool {
    match spec.map {
        TransformMap::R => spec.alpha >= 0.5,
        m => spec.lambda <= transform_bound(m, spec.alpha).unwrap_or(f64::NAN),
    }
}

/// Taylor coefficient of x^k in R(x) for k ≥ 1:
/// π^{2k}/(4^k k!) Σ_n (-1)^n π^{2n}/(2^n (2n)!) / ((2n+1)(2n+3)⋯(2n+2k-1)).
pub fn r_coefficient(k: usize) -> f64 {
    if k == 0 {
        return transform_r(0.0);
    }
    let kf = k as f64;
    let ln_pre = 2.0 * kf * PI.ln() - kf * 4f64.ln() - ln_gamma(kf + 1.0);
    let mut sum = 0.0;
    for n in 0..200 {
        let nf = n as f64;
        // (2n+1)(2n+3)⋯(2n+2k-1) = 2^k Γ(n+k+1/2)/Γ(n+1/2)
        let ln_prod = kf * 2f64.ln() + ln_gamma(nf + kf + 0.5) - ln_gamma(nf + 0.5);
        let ln_mag = 2.0 * nf * PI.ln() - nf * 2f64.ln() - ln_gamma(2.0 * nf + 1.0) - ln_prod;
        let term = if n % 2 == 0 { 1.0 } else { -1.0 } * (ln_pre + ln_mag).exp();
        sum += term;
        if term.abs() < 1e-18 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

/// Taylor coefficients of R about p, from the coefficients at 0.
fn r_taylor_at(p: f64, len: usize) -> Vec<f64> {
    let c: Vec<f64> = (0..len + 80).map(r_coefficient).collect();
    (0..len)
        .map(|m| {
            let mut acc = 0.0;
            let mut binom = 1.0;
            let mut pw = 1.0;
            for (j, &cj) in c.iter().enumerate().skip(m) {
                if j > m {
                    binom *= j as f64 / (j - m) as f64;
                    pw *= p;
                }
                let term = cj * binom * pw;
                acc += term;
                if j > m + 2 && term.abs() < 1e-18 * acc.abs() {
                    break;
                }
            }
            acc
        })
        .collect()
}

/// Taylor coefficients at 0 of S_{λ'}; positive or sign-definite pieces only,
/// so high orders keep full relative accuracy.
fn s_taylor(lambda: f64, len: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return v;
    }
    // S(x) = 2 f(λ(1-x)/8) - 1 with f(y) = 1 - erf(√y)²
    let q = lambda / 8.0;
    let f = erf_sqrt_complement_taylor(q, len);
    (0..len)
        .map(|k| {
            if k == 0 {
                2.0 * f[0] - 1.0
            } else {
                2.0 * f[k] * (-q).powi(k as i32)
            }
        })
        .collect()
}

/// Outcome of the Taylor-coefficient admissibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorReport {
    pub coeffs: Vec<f64>,
    pub coeff0: f64,
    pub all_nonneg_from_1: bool,
    /// Magnitude of the last coefficient, a proxy for the omitted tail.
    pub tail: f64,
}

/// Taylor coefficients at 0 of the α-shifted map up to `order`.
pub fn taylor_abs_monotone(spec: &TransformSpec, order: usize) -> Result<TaylorReport> {
    if order > 60 {
        return Err(crate::error::domain("order", order as f64, "{0, …, 60}"));
    }
    let len = order + 1;
    let coeffs = match spec.map {
        TransformMap::R => {
            let b = r_taylor_at(spec.alpha, len);
            let s = 1.0 - spec.alpha;
            b.iter()
                .enumerate()
                .map(|(k, c)| c * s.powi(k as i32))
                .collect::<Vec<_>>()
        }
        TransformMap::S => s_taylor(spec.effective_lambda(), len),
        TransformMap::T => {
            let s = Series::from_coeffs(s_taylor(spec.effective_lambda(), len));
            let b = r_taylor_at(s.value(), len);
            let z = s.add_const(-s.value());
            let mut out = Series::constant(0.0, len);
            for c in b.iter().rev() {
                out = (&out * &z).add_const(*c);
            }
            out.coeffs().to_vec()
        }
    };
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerics(crate::numerics::NumericsError::Invalid(
            "Taylor tail did not converge".into(),
        )));
    }
    let tail = coeffs.last().map_or(0.0, |c| c.abs());
    Ok(TaylorReport {
        coeff0: coeffs[0],
        all_nonneg_from_1: coeffs.iter().skip(1).all(|&c| c >= 0.0),
        tail,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_values() {
        assert_eq!(transform_r(1.0), 1.0);
        assert!(transform_r(0.5).abs() < 1e-16);
        assert_eq!(transform_s(2.0, 1.0), 1.0);
        assert_eq!(transform_t(2.0, 1.0), 1.0);
        for i in 0..=40 {
            let x = -1.0 + i as f64 / 20.0;
            let lhs = transform_t(1.7, x);
            let rhs = transform_r(transform_s(1.7, x));
            assert!((lhs - rhs).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn bounds() {
        let s = transform_bound(TransformMap::S, 0.0).unwrap();
        let t = transform_bound(TransformMap::T, 0.0).unwrap();
        assert!((s - 4.425098).abs() < 1e-5, "{s}");
        assert!((t - 1.8197).abs() < 1e-4, "{t}");
        assert!((transform_bound(TransformMap::S, 0.5).unwrap() - 2.0 * s).abs() < 1e-12);
        assert_eq!(transform_bound(TransformMap::T, 1.0), Some(f64::INFINITY));
        assert_eq!(transform_bound(TransformMap::R, 0.3), None);
        let spec = TransformSpec::new(TransformMap::R, 0.0, 0.4).unwrap();
        assert!(!is_admissible(&spec));
    }

    #[test]
    fn r_coefficients_sum_to_r() {
        let c: Vec<f64> = (0..40).map(r_coefficient).collect();
        for &x in &[-1.0f64, -0.3, 0.0, 0.6, 1.0] {
            let v: f64 = c.iter().enumerate().map(|(k, a)| a * x.powi(k as i32)).sum();
            assert!((v - transform_r(x)).abs() < 1e-14, "x={x}");
        }
        let at = r_taylor_at(0.4, 3);
        assert!((at[0] - transform_r(0.4)).abs() < 1e-14);
    }

    #[test]
    fn taylor_signs() {
        let r = taylor_abs_monotone(&TransformSpec::new(TransformMap::R, 0.0, 0.5).unwrap(), 40).unwrap();
        assert!(r.coeff0.abs() < 1e-15 && r.all_nonneg_from_1);
        let bound = transform_bound(TransformMap::S, 0.0).unwrap();
        let above = TransformSpec::new(TransformMap::S, bound * 1.001, 0.0).unwrap();
        let s = taylor_abs_monotone(&above, 40).unwrap();
        assert!(s.coeff0 < 0.0 && s.all_nonneg_from_1);
        let below = TransformSpec::new(TransformMap::S, bound * 0.999, 0.0).unwrap();
        assert!(taylor_abs_monotone(&below, 40).unwrap().coeff0 > 0.0);
        let tb = transform_bound(TransformMap::T, 0.0).unwrap();
        let t = taylor_abs_monotone(&TransformSpec::new(TransformMap::T, tb * 0.999, 0.0).unwrap(), 30).unwrap();
        assert!(t.coeff0 > 0.0 && t.all_nonneg_from_1, "{:?}", t.coeffs);
        let t = taylor_abs_monotone(&TransformSpec::new(TransformMap::T, tb * 1.001, 0.0).unwrap(), 30).unwrap();
        assert!(t.coeff0 < 0.0);
    }

    #[test]
    fn series_match_function_values() {
        let spec = TransformSpec::new(TransformMap::T, 1.2, 0.3).unwrap();
        let rep = taylor_abs_monotone(&spec, 60).unwrap();
        for &x in &[-0.8f64, 0.2, 0.9] {
            let v: f64 = rep.coeffs.iter().enumerate().map(|(k, a)| a * x.powi(k as i32)).sum();
            assert!((v - spec.apply(x)).abs() < 1e-12, "x={x}");
        }
    }
}
