//! Turning bands tb_k^d: the average of f(A^⊤t) over uniformly random
//! orthonormal k-frames A in ℝ^d.
//!
//! For radial f, ‖A^⊤t‖² = ‖t‖² B with B ~ Beta(k/2, (d-k)/2), and with
//! B = w² the operator becomes the one-dimensional integral
//!
//! tb(f)(r) = 2/B(k/2, (d-k)/2) ∫_0^1 f(rw) w^{k-1} (1 - w²)^{(d-k-2)/2} dw.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::numerics::{beta, Endpoint, Estimate, Quadrature};
use crate::tcf_models::RadialFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TurningBandsSpec {
    k: usize,
    d: usize,
}

impl TurningBandsSpec {
    pub fn new(k: usize, d: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(crate::error::Error::InvalidModel(format!(
                "turning bands needs 1 ≤ k ≤ d, got k = {k}, d = {d}"
            )));
        }
        Ok(TurningBandsSpec { k, d })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// tb_k^d(f)(r).
pub fn turning_bands(f: &RadialFunction, spec: TurningBandsSpec, r: f64) -> Result<Estimate> {
    turning_bands_tol(f, spec, r, 1e-12)
}

pub fn turning_bands_tol(f: &RadialFunction, spec: TurningBandsSpec, r: f64, tol: f64) -> Result<Estimate> {
    let (k, d) = (spec.k, spec.d);
    if !(r >= 0.0) {
        return Err(crate::error::domain("r", r, "[0, ∞)"));
    }
    if k == d || r == 0.0 {
        return Ok(Estimate::exact(f.eval(r)));
    }
    let e = 0.5 * (d - k) as f64 - 1.0;
    let norm = 2.0 / beta(0.5 * k as f64, 0.5 * (d - k) as f64);
    let right = if e.fract() == 0.0 && e >= 0.0 {
        Endpoint::Regular
    } else {
        Endpoint::Singular(e)
    };
    let mut cuts: Vec<f64> = f
        .kinks()
        .iter()
        .map(|&t| t / r)
        .filter(|&w| w > 0.0 && w < 1.0)
        .collect();
    if let Some(b) = f.support_bound() {
        if b / r < 1.0 {
            cuts.push(b / r);
        }
    }
    let q = Quadrature::new(tol).rel_tol(tol).right(right).breakpoints(&cuts);
    let est = q.integrate(
        |w| {
            let weight = w.powi(k as i32 - 1) * (1.0 - w * w).powf(e);
            if weight == 0.0 {
                0.0
            } else {
                f.eval(r * w) * weight
            }
        },
        0.0,
        1.0,
    )?;
    Ok(Estimate::new(norm * est.value, norm * est.abs_error))
}

/// tb_k^d(f) as a radial function; failed evaluations become NaN.
pub fn turning_bands_radial(f: &RadialFunction, spec: TurningBandsSpec) -> RadialFunction {
    let inner = f.clone();
    let out = RadialFunction::new(format!("tb_{}^{}({})", spec.k, spec.d, f.name()), move |r| {
        turning_bands(&inner, spec, r).map_or(f64::NAN, |e| e.value)
    });
    match f.support_bound() {
        Some(b) if spec.k == spec.d => out.with_support_bound(b),
        _ => out,
    }
}

/// Monte Carlo over random orthonormal k-frames, obtained by orthonormalizing
/// d×k standard Gaussian matrices; the probe direction is the first axis.
pub fn turning_bands_monte_carlo(
    f: &RadialFunction,
    spec: TurningBandsSpec,
    r: f64,
    samples: usize,
    seed: u64,
) -> Estimate {
    let (k, d) = (spec.k, spec.d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let g = DMatrix::<f64>::from_fn(d, k, |_, _| StandardNormal.sample(&mut rng));
        let q = g.qr().q();
        let proj = q.row(0).norm();
        let v = f.eval(r * proj);
        sum += v;
        sum2 += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    Estimate::new(mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcf_models::{phi_d, tent};

    #[test]
    fn identity_when_k_equals_d() {
        let f = crate::tcf_models::erfc_sqrt();
        let spec = TurningBandsSpec::new(2, 2).unwrap();
        assert_eq!(turning_bands(&f, spec, 0.7).unwrap().value, f.eval(0.7));
        assert!(TurningBandsSpec::new(3, 2).is_err());
    }

    #[test]
    fn exponential_from_damped_line() {
        let f = RadialFunction::new("(1-t)e^-t", |t: f64| (1.0 - t) * (-t).exp());
        let spec = TurningBandsSpec::new(1, 3).unwrap();
        for i in 0..=20 {
            let r = i as f64 * 0.5;
            let v = turning_bands(&f, spec, r).unwrap().value;
            assert!((v - (-r).exp()).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn tent_gives_phi_3() {
        let spec = TurningBandsSpec::new(1, 3).unwrap();
        for &r in &[0.0, 0.3, 1.0, 1.7, 8.0] {
            let v = turning_bands(&tent(), spec, r).unwrap().value;
            assert!((v - phi_d(r, 3)).abs() < 1e-10, "r={r}");
        }
        let v = turning_bands(&tent(), TurningBandsSpec::new(1, 5).unwrap(), 2.5)
            .unwrap()
            .value;
        assert!((v - phi_d(2.5, 5)).abs() < 1e-10);
    }

    #[test]
    fn composition() {
        let f = crate::tcf_models::erfc_sqrt();
        let inner = turning_bands_radial(&f, TurningBandsSpec::new(2, 3).unwrap());
        let s12 = TurningBandsSpec::new(1, 2).unwrap();
        let s13 = TurningBandsSpec::new(1, 3).unwrap();
        for &r in &[0.2, 1.0, 3.0] {
            let a = turning_bands_tol(&inner, s12, r, 1e-9).unwrap().value;
            let b = turning_bands(&f, s13, r).unwrap().value;
            assert!((a - b).abs() < 1e-6, "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn monte_carlo_oracle() {
        let f = crate::tcf_models::exponential(1.0);
        let spec = TurningBandsSpec::new(2, 4).unwrap();
        let mc = turning_bands_monte_carlo(&f, spec, 1.3, 20_000, 7);
        let exact = turning_bands(&f, spec, 1.3).unwrap().value;
        assert!((mc.value - exact).abs() < 4.0 * mc.abs_error, "{mc:?} vs {exact}");
    }
}
