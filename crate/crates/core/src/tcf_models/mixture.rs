//! Scale mixtures of the complementary error function: pairs of a mixing law
//! G on (0, ∞) and φ(t) = ∫ erfc(st) dG(s) in closed form.

use std::f64::consts::PI;

use crate::error::Result;
use crate::numerics::{self, erf_inv, gamma, Estimate, Quadrature};

use super::distribution::Distribution1D;
use super::radial::{self, RadialFunction};

/// One catalog row: the closed-form φ and its mixing law.
#[derive(Debug, Clone)]
pub struct ErfcMixtureEntry {
    pub row: u8,
    pub param: f64,
    pub phi: RadialFunction,
    pub mixing: Distribution1D,
}

/// E_G[erfc(S x)].
pub fn erfc_scale_mixture(g: &Distribution1D, x: f64, tol: f64) -> Result<Estimate> {
    if x == 0.0 {
        return Ok(Estimate::exact(1.0));
    }
    g.expect(|s| numerics::erfc(s * x), tol)
}

/// Mixing density of the Whittle–Matérn row, 0 < ν < 1/2.
///
/// The defining integral ∫_0^s x^{2ν-3} e^{-1/(4x²)} (s²-x²)^{-ν-1/2} dx is
/// rescaled to y = x/s ∈ (0, 1). On (0, 1/2] it runs in log y, which keeps
/// the peak near y = 1/(2s) resolved for huge s; on [1/2, 1) the endpoint
/// singularity is removed by 1 - y = w^m with m = 1/(1/2 - ν).
pub fn matern_mixing_density(nu: f64, s: f64) -> f64 {
    if !(s > 0.0) {
        return 0.0;
    }
    let c = PI.sqrt() / (gamma(nu) * gamma(0.5 - nu));
    let m = 1.0 / (0.5 - nu);
    let inv4s2 = 0.25 / (s * s);
    let log_core = |y: f64| (2.0 * nu - 3.0) * y.ln() - inv4s2 / (y * y);
    let near_one = |w: f64| {
        let y = 1.0 - w.powf(m);
        if y <= 0.0 {
            return 0.0;
        }
        m * (log_core(y) - (nu + 0.5) * (1.0 + y).ln()).exp()
    };
    // y = e^{-v}, dy = y dv
    let near_zero = |v: f64| {
        let y = (-v).exp();
        let log = (3.0 - 2.0 * nu) * v - inv4s2 * (2.0 * v).exp() - v;
        (log - (nu + 0.5) * (-y * y).ln_1p()).exp()
    };
    let q = Quadrature::new(1e-300).rel_tol(1e-13);
    let peak = (2.0 * s).ln();
    let bps: Vec<f64> = if peak > std::f64::consts::LN_2 {
        vec![peak]
    } else {
        vec![]
    };
    let low = settle(
        q.clone()
            .breakpoints(&bps)
            .integrate(near_zero, std::f64::consts::LN_2, f64::INFINITY),
    );
    let high = settle(q.integrate(near_one, 0.0, 0.5f64.powf(1.0 / m)));
    c * (low + high) / (s * s * s)
}

fn settle(r: numerics::Result<Estimate>) -> f64 {
    match r {
        Ok(e) => e.value,
        Err(numerics::NumericsError::NotConverged { estimate, .. }) => estimate.value,
        Err(_) => f64::NAN,
    }
}

fn check_param(row: u8, p: f64) -> Result<()> {
    if row == 2 {
        if !(p > 0.0 && p < 0.5) {
            return Err(crate::error::domain("nu", p, "(0, 1/2)"));
        }
    } else if !(p > 0.0 && p.is_finite()) {
        return Err(crate::error::domain("a", p, "(0, ∞)"));
    }
    Ok(())
}

/// Catalog row 1..=4 with scale a (rows 1, 3, 4) or smoothness ν (row 2).
pub fn erfc_mixture(row: u8, param: f64) -> Result<ErfcMixtureEntry> {
    if !(1..=4).contains(&row) {
        return Err(crate::error::domain("row", row as f64, "{1, 2, 3, 4}"));
    }
    check_param(row, param)?;
    let a = param;
    let inf = (0.0, f64::INFINITY);
    let (phi, mixing) = match row {
        1 => (
            radial::exponential(0.5 * a).renamed(format!("exp(-2t/{a})")),
            Distribution1D::continuous(
                format!("G1(a={a})"),
                move |s| if s > 0.0 { (-(a * s).powi(-2)).exp() } else { 0.0 },
                inf,
            )?
            .with_density(move |s| {
                if s > 0.0 {
                    2.0 / (a * a * s.powi(3)) * (-(a * s).powi(-2)).exp()
                } else {
                    0.0
                }
            })
            .with_quantile(move |p| 1.0 / (a * (-p.ln()).sqrt()))
            .with_tail_decay(3.0),
        ),
        2 => {
            let nu = param;
            let phi = super::parametric::Parametric::new(super::parametric::Family::WhittleMatern, nu).radial();
            let cdf = move |s: f64| {
                if s <= 0.0 {
                    return 0.0;
                }
                Quadrature::new(1e-13)
                    .integrate(|x| matern_mixing_density(nu, x), 0.0, s)
                    .map(|e| e.value.min(1.0))
                    .unwrap_or(f64::NAN)
            };
            (
                phi,
                Distribution1D::continuous(format!("G2(nu={nu})"), cdf, inf)?
                    .with_density(move |s| matern_mixing_density(nu, s))
                    .with_tail_decay(1.0 + 2.0 * nu),
            )
        }
        3 => (
            RadialFunction::new(format!("1-(2/pi)atan(t/{a})"), move |t| 1.0 - 2.0 / PI * (t / a).atan())
                .with_jet(move |s| s.scale(1.0 / a).atan().scale(-2.0 / PI).add_const(1.0)),
            Distribution1D::continuous(format!("G3(a={a})"), move |s| numerics::erf(a * s.max(0.0)), inf)?
                .with_density(move |s| {
                    if s >= 0.0 {
                        2.0 * a / PI.sqrt() * (-(a * s).powi(2)).exp()
                    } else {
                        0.0
                    }
                })
                .with_quantile(move |p| erf_inv(p).unwrap_or(f64::INFINITY) / a),
        ),
        _ => (
            RadialFunction::new(format!("dagum(a={a})"), move |t| {
                if t == 0.0 {
                    1.0
                } else {
                    1.0 - (1.0 + (t / a).powi(-2)).powf(-0.5)
                }
            })
            .with_jet(move |s| {
                let r = s.scale(1.0 / a);
                (&r * &r).recip().add_const(1.0).powf(-0.5).scale(-1.0).add_const(1.0)
            }),
            Distribution1D::continuous(
                format!("G4(a={a})"),
                move |s| -(-(a * s.max(0.0)).powi(2)).exp_m1(),
                inf,
            )?
            .with_density(move |s| {
                if s >= 0.0 {
                    2.0 * a * a * s * (-(a * s).powi(2)).exp()
                } else {
                    0.0
                }
            })
            .with_quantile(move |p| (-(-p).ln_1p()).sqrt() / a),
        ),
    };
    Ok(ErfcMixtureEntry {
        row,
        param,
        phi,
        mixing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_reference_values() {
        let r1 = erfc_mixture(1, 1.0).unwrap();
        assert!((r1.phi.eval(0.7) - (-1.4f64).exp()).abs() < 1e-15);
        assert!((r1.mixing.cdf(2.0) - (-0.25f64).exp()).abs() < 1e-15);
        let r3 = erfc_mixture(3, 1.0).unwrap();
        assert_eq!(r3.phi.eval(0.0), 1.0);
        let r4 = erfc_mixture(4, 1.0).unwrap();
        assert!((r4.phi.eval(1.0) - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!(erfc_mixture(2, 0.5).is_err());
        assert!(erfc_mixture(5, 1.0).is_err());
    }

    #[test]
    fn quantiles_invert_cdfs() {
        for row in [1u8, 3, 4] {
            let e = erfc_mixture(row, 1.3).unwrap();
            for &p in &[0.01, 0.3, 0.9, 0.999] {
                let x = e.mixing.quantile(p);
                assert!((e.mixing.cdf(x) - p).abs() < 1e-12, "row {row} p {p}");
            }
        }
    }

    #[test]
    fn matern_density_is_normalized() {
        for &nu in &[0.1, 0.3, 0.49] {
            let e = erfc_mixture(2, nu).unwrap();
            let total = e.mixing.expect(|_| 1.0, 1e-10).unwrap();
            assert!((total.value - 1.0).abs() < 1e-7, "nu {nu}: {}", total.value);
        }
    }

    #[test]
    fn mixtures_reproduce_closed_forms() {
        for (row, p) in [(1u8, 1.0), (2, 0.3), (3, 0.8), (4, 1.5)] {
            let e = erfc_mixture(row, p).unwrap();
            for &t in &[0.05, 0.5, 3.0] {
                let v = erfc_scale_mixture(&e.mixing, t, 1e-11).unwrap().value;
                assert!((v - e.phi.eval(t)).abs() < 1e-7, "row {row} t {t}");
            }
        }
    }
}
