//! The ball-overlap kernel h_d and its one-dimensional turning-bands
//! projection φ_d.

use std::f64::consts::PI;

use crate::numerics::{gamma, projected_tent_slope, Quadrature, Series};

use super::radial::RadialFunction;

/// Normalizing constant of h_d: h_d(t) = c_d ∫_t^1 (1 - v²)^{(d-1)/2} dv.
pub fn overlap_constant(d: usize) -> f64 {
    d as f64 * projected_tent_slope(d)
}

fn settle(r: crate::numerics::Result<crate::numerics::Estimate>) -> f64 {
    match r {
        Ok(e) => e.value,
        Err(crate::numerics::NumericsError::NotConverged { estimate, .. }) => estimate.value,
        Err(_) => f64::NAN,
    }
}

/// Volume of the intersection of two unit-diameter-normalized balls whose
/// centers are 2t apart, relative to the ball volume.
pub fn h_d(t: f64, d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    let t = t.abs();
    if t >= 1.0 {
        return 0.0;
    }
    match d {
        1 => 1.0 - t,
        2 => 1.0 - 2.0 / PI * (t * (1.0 - t * t).sqrt() + t.asin()),
        3 => 1.0 - 1.5 * t + 0.5 * t.powi(3),
        4 => h_d(t, 2) - 4.0 / (3.0 * PI) * t * (1.0 - t * t).powf(1.5),
        5 => 1.0 - 15.0 / 8.0 * t + 1.25 * t.powi(3) - 0.375 * t.powi(5),
        _ => {
            let e = 0.5 * (d as f64 - 1.0);
            let r = Quadrature::new(1e-16)
                .rel_tol(1e-14)
                .integrate(|v| (1.0 - v * v).powf(e), t, 1.0);
            (overlap_constant(d) * settle(r)).clamp(0.0, 1.0)
        }
    }
}

/// h_d'(t) for 0 ≤ t < 1.
pub fn h_d_derivative(t: f64, d: usize) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    -overlap_constant(d) * (1.0 - t * t).powf(0.5 * (d as f64 - 1.0))
}

/// h_d as a radial function with exact jets away from the kink at 1.
pub fn h_d_radial(d: usize) -> RadialFunction {
    let c = overlap_constant(d);
    let e = 0.5 * (d as f64 - 1.0);
    RadialFunction::new(format!("h_{d}"), move |t| h_d(t, d))
        .with_jet(move |s| {
            if s.value() >= 1.0 {
                return Series::constant(0.0, s.len());
            }
            s.through_derivative(h_d(s.value(), d), |a| {
                (a * a).scale(-1.0).add_const(1.0).powf(e).scale(-c)
            })
        })
        .with_kinks(&[1.0])
        .with_support_bound(1.0)
}

/// A(x) = ∫_0^x (1 - w²)^{(d-3)/2} dw for 0 ≤ x < 1 and d ≥ 2.
fn projected_arc(x: f64, d: usize) -> f64 {
    match d {
        2 => x.asin(),
        3 => x,
        4 => 0.5 * (x * (1.0 - x * x).sqrt() + x.asin()),
        5 => x - x.powi(3) / 3.0,
        _ => {
            let e = 0.5 * (d as f64 - 3.0);
            settle(
                Quadrature::new(1e-16)
                    .rel_tol(1e-14)
                    .integrate(|w| (1.0 - w * w).powf(e), 0.0, x),
            )
        }
    }
}

/// φ_d = tb_1^d of the tent: 1 - β_d t on [0, 1], a decaying tail beyond.
pub fn phi_d(t: f64, d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    let t = t.abs();
    if d == 1 {
        return (1.0 - t).max(0.0);
    }
    if t <= 1.0 {
        return 1.0 - projected_tent_slope(d) * t;
    }
    let df = d as f64;
    let c = 2.0 * gamma(0.5 * df) / (PI.sqrt() * gamma(0.5 * (df - 1.0)));
    let tail = 1.0 - (1.0 - t.powi(-2)).powf(0.5 * (df - 1.0));
    (c * (projected_arc(1.0 / t, d) - t * tail / (df - 1.0))).max(0.0)
}

/// φ_d'(t) for t ≠ 1.
pub fn phi_d_derivative(t: f64, d: usize) -> f64 {
    let b = projected_tent_slope(d);
    if d == 1 {
        return if t < 1.0 { -1.0 } else { 0.0 };
    }
    if t <= 1.0 {
        -b
    } else {
        -b * (1.0 - (1.0 - t.powi(-2)).powf(0.5 * (d as f64 - 1.0)))
    }
}

/// -φ_d'(√t): β_d on (0, 1], β_d (1 - (1 - 1/t)^{(d-1)/2}) beyond.
pub fn phi_d_neg_deriv_sqrt(t: f64, d: usize) -> f64 {
    -phi_d_derivative(t.sqrt(), d)
}

/// φ_d as a radial function with exact jets away from the kink at 1.
pub fn phi_d_radial(d: usize) -> RadialFunction {
    if d == 1 {
        return super::radial::tent().renamed("phi_1");
    }
    let b = projected_tent_slope(d);
    let e = 0.5 * (d as f64 - 1.0);
    RadialFunction::new(format!("phi_{d}"), move |t| phi_d(t, d))
        .with_jet(move |s| {
            if s.value() < 1.0 {
                return s.scale(-b).add_const(1.0);
            }
            s.through_derivative(phi_d(s.value(), d), |a| {
                let inv2 = (a * a).recip();
                inv2.scale(-1.0)
                    .add_const(1.0)
                    .powf(e)
                    .scale(-1.0)
                    .add_const(1.0)
                    .scale(-b)
            })
        })
        .with_kinks(&[1.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature;

    #[test]
    fn h_d_closed_forms_match_quadrature() {
        for d in 1..=5 {
            let e = 0.5 * (d as f64 - 1.0);
            for &t in &[0.0, 0.1, 0.37, 0.8, 0.999] {
                let q = quadrature(|v: f64| (1.0 - v * v).powf(e), t, 1.0, 1e-15).unwrap();
                let want = overlap_constant(d) * q.value;
                assert!((h_d(t, d) - want).abs() < 1e-12, "d={d} t={t}");
            }
        }
    }

    #[test]
    fn h_d_boundary_values() {
        for d in 1..=9 {
            assert!((h_d(0.0, d) - 1.0).abs() < 1e-12, "d={d}");
            assert_eq!(h_d(1.0, d), 0.0);
            assert_eq!(h_d(3.0, d), 0.0);
        }
        let t: f64 = 0.3;
        let want = (2.0 - 3.0 * t.sqrt() + t.powf(1.5)) / 2.0;
        assert!((h_d(t.sqrt(), 3) - want).abs() < 1e-15);
    }

    #[test]
    fn h_d_jet_matches_derivative() {
        for d in [2, 3, 6, 7] {
            let s = h_d_radial(d).jet(0.4, 3).unwrap();
            assert!((s.value() - h_d(0.4, d)).abs() < 1e-13);
            assert!((s.coeffs()[1] - h_d_derivative(0.4, d)).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_d_matches_projection_integral() {
        for d in 2..=7 {
            let df = d as f64;
            let c = 2.0 * gamma(0.5 * df) / (PI.sqrt() * gamma(0.5 * (df - 1.0)));
            for &t in &[0.3, 1.0, 1.5, 4.0, 20.0] {
                let e = 0.5 * (df - 3.0);
                let mut q = Quadrature::new(1e-14);
                if d == 2 {
                    q = q.right(crate::numerics::Endpoint::Singular(-0.5));
                }
                let bp = if t > 1.0 { vec![1.0 / t] } else { vec![] };
                let v = q
                    .breakpoints(&bp)
                    .integrate(|w| (1.0 - t * w).max(0.0) * (1.0 - w * w).powf(e), 0.0, 1.0)
                    .unwrap();
                assert!((phi_d(t, d) - c * v.value).abs() < 1e-10, "d={d} t={t}");
            }
        }
    }

    #[test]
    fn phi_3_closed_form() {
        assert!((projected_tent_slope(3) - 0.5).abs() < 1e-15);
        assert!((phi_d(2.0, 3) - 0.25).abs() < 1e-15);
        assert!((phi_d(7.0, 3) - 1.0 / 14.0).abs() < 1e-15);
        assert!((phi_d_neg_deriv_sqrt(2.0, 3) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn phi_d_jet_against_differences() {
        for d in [2, 4, 6] {
            let f = phi_d_radial(d);
            let plain = RadialFunction::new("plain", move |t| phi_d(t, d)).with_kinks(&[1.0]);
            for &t in &[1.7, 3.0] {
                let a = f.derivative(2, t).unwrap().value;
                let b = plain.derivative(2, t).unwrap().value;
                assert!((a - b).abs() < 1e-6, "d={d} t={t}: {a} {b}");
            }
        }
    }
}
