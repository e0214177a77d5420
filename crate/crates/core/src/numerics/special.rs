use std::f64::consts::PI;

use super::{NumericsError, Result};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Giles' single-precision approximation of erf_inv, parameterized by
/// w = -ln((1-p)(1+p)) so that tail arguments keep their precision.
fn erf_inv_guess(w: f64) -> f64 {
    if w < 5.0 {
        let w = w - 2.5;
        [
            2.810_226_36e-8,
            3.432_739_39e-7,
            -3.523_387_7e-6,
            -4.391_506_54e-6,
            2.185_808_7e-4,
            -1.253_725_03e-3,
            -4.177_681_64e-3,
            2.466_407_27e-1,
            1.501_409_41,
        ]
        .iter()
        .fold(0.0, |p, &c| c + p * w)
    } else if w < 16.0 {
        let w = w.sqrt() - 3.0;
        [
            -2.002_142_57e-4,
            1.009_505_58e-4,
            1.349_343_22e-3,
            -3.673_428_44e-3,
            5.739_507_73e-3,
            -7.622_461_3e-3,
            9.438_870_47e-3,
            1.001_674_06,
            2.832_976_82,
        ]
        .iter()
        .fold(0.0, |p, &c| c + p * w)
    } else {
        // erfc(x) ~ e^{-x^2}/(x√π) with -ln erfc(x) = w + ln 2 in the tail
        let t = w + std::f64::consts::LN_2;
        (t - 0.5 * (PI * t).ln()).sqrt()
    }
}

/// Inverse error function on (-1, 1).
///
/// A rational initial guess is polished with Halley steps. For |p| >= 1/2 the
/// residual is formed through `erfc` so that the tail keeps full relative
/// precision.
pub fn erf_inv(p: f64) -> Result<f64> {
    if !(p > -1.0 && p < 1.0) {
        return Err(NumericsError::Domain {
            function: "erf_inv",
            value: p,
            domain: "(-1, 1)",
        });
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p.abs() >= 0.5 {
        let x = erfc_inv(1.0 - p.abs())?;
        return Ok(x.copysign(p));
    }
    let mut x = erf_inv_guess(-((1.0 - p) * (1.0 + p)).ln()) * p;
    for _ in 0..4 {
        let r = erf(x) - p;
        let slope = TWO_OVER_SQRT_PI * (-x * x).exp();
        let step = r / slope;
        x -= step / (1.0 + x * step);
        if step.abs() <= 1e-17 * x.abs() {
            break;
        }
    }
    Ok(x)
}

/// Inverse complementary error function on (0, 2).
pub fn erfc_inv(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 2.0) {
        return Err(NumericsError::Domain {
            function: "erfc_inv",
            value: q,
            domain: "(0, 2)",
        });
    }
    if q == 1.0 {
        return Ok(0.0);
    }
    if q > 1.0 {
        return Ok(-erfc_inv(2.0 - q)?);
    }
    let w = -(q.ln() + (2.0 - q).ln());
    let mut x = if w < 16.0 {
        erf_inv_guess(w) * (1.0 - q)
    } else {
        erf_inv_guess(w)
    };
    for _ in 0..8 {
        let r = erfc(x) - q;
        let slope = -TWO_OVER_SQRT_PI * (-x * x).exp();
        if slope == 0.0 {
            break;
        }
        let step = r / slope;
        x -= step / (1.0 + x * step);
        if step.abs() <= 1e-17 * x.abs() {
            break;
        }
    }
    Ok(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Euler's Beta function B(a, b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    (h * PI.ln() - ln_gamma(1.0 + h)).exp()
}

/// Surface area of the unit sphere in R^d, i.e. d times the ball volume.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// Slope of the projected tent on [0, 1]: Γ(d/2) / (√π Γ((d+1)/2)).
///
/// Also the mean of |U_1| for U uniform on the sphere in R^d.
pub fn projected_tent_slope(d: usize) -> f64 {
    let d = d as f64;
    (ln_gamma(d / 2.0) - ln_gamma((d + 1.0) / 2.0)).exp() / PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn erfc_reference_values() {
        assert_eq!(erfc(0.0), 1.0);
        assert!(rel(erfc(1.0), 0.157_299_207_050_285_13) < 1e-15);
        assert!(rel(erf(0.5), 0.520_499_877_813_046_54) < 1e-15);
        assert!(rel(erfc(5.0), 1.537_459_794_428_034_85e-12) < 1e-14);
        assert!(rel(erfc(-0.3), 1.328_626_759_459_127_4) < 1e-15);
    }

    #[test]
    fn erfc_reflection() {
        for i in -400..=400 {
            let x = i as f64 / 50.0;
            assert!((erfc(-x) - (2.0 - erfc(x))).abs() <= 1e-13);
            assert!((erfc(x) - (1.0 - erf(x))).abs() <= 2.5e-16);
        }
    }

    #[test]
    fn bound_constants() {
        let s = 8.0 * erf_inv(std::f64::consts::FRAC_1_SQRT_2).unwrap().powi(2);
        let t = 8.0 * erf_inv(0.5).unwrap().powi(2);
        assert!((s - 4.425098).abs() < 1e-5);
        assert!((t - 1.8197).abs() < 1e-4);
        assert!(rel(s, 4.425_098_125_842_822_6) < 1e-14);
        assert!(rel(t, 1.819_745_692_478_291) < 1e-14);
    }

    #[test]
    fn inverse_round_trip() {
        for i in -99..=99 {
            let p = i as f64 / 100.0;
            let x = erf_inv(p).unwrap();
            if p != 0.0 {
                assert!(rel(erf(x), p) < 1e-12, "p = {p}");
            }
        }
        for &q in &[1e-300, 1e-20, 1e-5, 0.3, 0.999, 1.5, 1.999_999] {
            let x = erfc_inv(q).unwrap();
            assert!(rel(erfc(x), q) < 1e-12, "q = {q}");
        }
        assert!(rel(erfc_inv(1e-300).unwrap(), 26.209_469_960_516_124) < 1e-13);
        assert!(rel(erfc_inv(1e-20).unwrap(), 6.601_580_622_355_142_6) < 1e-14);
        assert!(rel(erfc_inv(0.3).unwrap(), 0.732_869_077_959_216_9) < 1e-14);
    }

    #[test]
    fn inverse_domain_errors() {
        assert!(erf_inv(1.0).is_err());
        assert!(erf_inv(-1.5).is_err());
        assert!(erf_inv(f64::NAN).is_err());
        assert!(erfc_inv(0.0).is_err());
        assert!(erfc_inv(2.0).is_err());
        assert_eq!(erfc_inv(1.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_family() {
        assert!(rel(gamma(3.5), 3.323_350_970_447_842_6) < 1e-14);
        assert!(rel(ln_gamma(100.5), 361.435_540_467_777_6) < 1e-14);
        assert!(rel(beta(0.5, 1.5), PI / 2.0) < 1e-14);
    }

    #[test]
    fn ball_constants() {
        assert!(rel(unit_ball_volume(1), 2.0) < 1e-15);
        assert!(rel(unit_ball_volume(2), PI) < 1e-15);
        assert!(rel(unit_ball_volume(3), 4.0 * PI / 3.0) < 1e-15);
        assert!(rel(sphere_area(3), 4.0 * PI) < 1e-15);
        assert!(rel(projected_tent_slope(3), 0.5) < 1e-15);
        assert!(rel(projected_tent_slope(1), 1.0) < 1e-15);
        assert!(rel(projected_tent_slope(2), 2.0 / PI) < 1e-15);
    }
}
