//! Modified Bessel function of the second kind for real order.
//!
//! Temme's method: K_μ and K_{μ+1} for |μ| <= 1/2 come from the Temme series
//! when x < 2 and from Steed's continued fraction otherwise, followed by
//! forward recurrence in the order.

use std::f64::consts::PI;

use super::special::{gamma, ln_gamma};
use super::{NumericsError, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Taylor coefficients of 1/Γ(z) at 0, starting with z^2 (even indices only
/// are needed: c_2, c_4, ..., c_16).
const RGAMMA_EVEN: [f64; 8] = [
    0.577_215_664_901_532_860_6,
    -0.042_002_635_034_095_235_53,
    -0.042_197_734_555_544_336_75,
    0.007_218_943_246_663_099_542,
    -0.000_215_241_674_114_950_972_8,
    -0.000_020_134_854_780_788_238_66,
    0.000_001_133_027_231_981_695_882,
    6.116_095_104_481_415_818e-9,
];

/// Returns (gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ)) for |μ| <= 1/2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = 1.0 / gamma(1.0 + mu);
    let gammi = 1.0 / gamma(1.0 - mu);
    let gam2 = 0.5 * (gammi + gampl);
    let gam1 = if mu.abs() < 0.2 {
        let m2 = mu * mu;
        -RGAMMA_EVEN.iter().rev().fold(0.0, |acc, &c| acc * m2 + c)
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    (gam1, gam2, gampl, gammi)
}

/// K_ν(x) for ν >= 0 and x > 0.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(NumericsError::Domain {
            function: "bessel_k",
            value: x,
            domain: "x in (0, inf)",
        });
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(NumericsError::Domain {
            function: "bessel_k",
            value: nu,
            domain: "nu in [0, inf)",
        });
    }
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let mu2 = mu * mu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    let (mut k_mu, mut k_mu1) = if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..=MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= d / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(NumericsError::Invalid(format!(
                "bessel_k series did not converge at nu = {nu}, x = {x}"
            )));
        }
        (sum, sum1 * xi2)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..=MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(NumericsError::Invalid(format!(
                "bessel_k continued fraction did not converge at nu = {nu}, x = {x}"
            )));
        }
        let h = a1 * h;
        let k = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        (k, k * (mu + x + 0.5 - h) * xi)
    };

    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    Ok(k_mu)
}

/// Whittle–Matérn correlation 2^{1-ν}/Γ(ν) t^ν K_ν(t), equal to 1 at t = 0.
pub fn whittle_matern(nu: f64, t: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(NumericsError::Domain {
            function: "whittle_matern",
            value: nu,
            domain: "nu in (0, inf)",
        });
    }
    if t < 0.0 || t.is_nan() {
        return Err(NumericsError::Domain {
            function: "whittle_matern",
            value: t,
            domain: "t in [0, inf)",
        });
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    if t > 745.0 {
        return Ok(0.0);
    }
    let k = bessel_k(nu, t)?;
    let log_pref = (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + nu * t.ln();
    Ok((log_pref.exp() * k).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn half_order_closed_form() {
        for &x in &[0.01, 0.3, 1.0, 1.99, 2.0, 2.01, 7.5, 40.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!(rel(bessel_k(0.5, x).unwrap(), exact) < 1e-13, "x = {x}");
            assert!(rel(whittle_matern(0.5, x).unwrap(), (-x).exp()) < 1e-13);
        }
        let at_one = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert!(rel(bessel_k(0.5, 1.0).unwrap(), at_one) < 1e-14);
    }

    #[test]
    fn reference_values() {
        let cases = [
            (0.3, 1.7, 0.169_073_052_272_134_39),
            (2.7, 0.01, 1_260_621.683_748_959_1),
            (0.49, 30.0, 2.140_889_991_008_959e-14),
            (0.1, 0.5, 0.930_086_529_131_478_5),
            (5.5, 3.0, 1.757_267_496_982_739_6),
            (1.0, 2.0, 0.139_865_881_816_522_43),
            (3.0, 50.0, 3.727_936_773_826_211_4e-23),
        ];
        for (nu, x, want) in cases {
            assert!(rel(bessel_k(nu, x).unwrap(), want) < 1e-12, "nu = {nu}, x = {x}");
        }
    }

    #[test]
    fn matern_origin_limit() {
        // the leading correction is of order t^{2ν} for ν < 1
        for &(nu, t) in &[(0.1, 1e-40), (0.3, 1e-12), (0.49, 1e-8), (1.5, 1e-6), (3.2, 1e-6)] {
            assert!((whittle_matern(nu, t).unwrap() - 1.0).abs() < 1e-5, "nu = {nu}");
            assert_eq!(whittle_matern(nu, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(0.5, 0.0).is_err());
        assert!(bessel_k(0.5, -1.0).is_err());
        assert!(bessel_k(-0.5, 1.0).is_err());
        assert!(whittle_matern(0.0, 1.0).is_err());
    }
}
