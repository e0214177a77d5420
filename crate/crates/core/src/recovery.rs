//! Shapes and radius laws realizing a given TCF in dimensions 1, 2 and 3.
//!
//! For χ ∈ T^d_MMMr the moving-maxima shape f and the density k of the
//! diameter 2R of a random ball are read off from derivatives of χ:
//!
//! | d | f(u)                                         | k(s)                                  |
//! |---|----------------------------------------------|---------------------------------------|
//! | 1 | -χ'(2u)                                      | s χ''(s)                              |
//! | 2 | (4u/π) ∫_0^{1/(2u)} ((2ut)^{-2} - 1)^{1/2} dλ | (s²/2) ∫_0^{1/s} ((s/t)² - 1)^{-1/2} dλ |
//! | 3 | χ''(2u) / (πu)                               | (s/3)(χ''(s) - s χ'''(s))             |
//!
//! with λ(t) = t χ''(1/t). The d = 2 integrals run against λ'(t) =
//! χ''(1/t) - χ'''(1/t)/t, which presumes enough smoothness of χ; inputs with
//! kinks are reported as inconclusive there.

use crate::error::{Error, Result};
use crate::numerics::{unit_ball_volume, Endpoint, Estimate, Quadrature, Side};
use crate::tcf_models::{DensityValue, Distribution1D, RadialFunction};

/// A TCF to invert, together with the target dimension.
#[derive(Debug, Clone)]
pub struct RecoveryInput {
    chi: RadialFunction,
    dim: usize,
    tol: f64,
}

const GRID: usize = 200;

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

impl RecoveryInput {
    /// Checks χ(0) = 1, monotonicity on a grid, and the smoothness the
    /// dimension demands: d = 3 needs χ''' everywhere on (0, ∞), so declared
    /// kinks are refused.
    pub fn new(chi: RadialFunction, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(crate::error::domain("dim", dim as f64, "{1, 2, 3}"));
        }
        let at0 = chi.eval(0.0);
        if (at0 - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!("χ(0) = {at0}, expected 1")));
        }
        let mut prev = at0;
        for t in log_grid(1e-3, 1e2, GRID) {
            let v = chi.eval(t);
            if v > prev + 1e-12 {
                return Err(Error::Precondition(format!("'{}' increases near t = {t}", chi.name())));
            }
            prev = v;
        }
        if dim == 3 && !chi.kinks().is_empty() {
            return Err(Error::Precondition(format!(
                "'{}' has kinks at {:?}; recovery in d = 3 needs a third derivative",
                chi.name(),
                chi.kinks()
            )));
        }
        Ok(RecoveryInput { chi, dim, tol: 1e-11 })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn chi(&self) -> &RadialFunction {
        &self.chi
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn d2(&self, s: f64) -> Result<f64> {
        Ok(self.chi.derivative(2, s)?.value)
    }

    fn d3(&self, s: f64) -> Result<f64> {
        Ok(self.chi.derivative(3, s)?.value)
    }

    fn require_smooth_for_plane(&self) -> Result<()> {
        if !self.chi.kinks().is_empty() {
            return Err(Error::Inconclusive(format!(
                "'{}' has kinks at {:?}; the planar formulas assume a smoother TCF",
                self.chi.name(),
                self.chi.kinks()
            )));
        }
        Ok(())
    }

    /// λ'(t) = χ''(1/t) - χ'''(1/t)/t, with λ'(0) = 0.
    fn lambda_slope(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let x = 1.0 / t;
        if !x.is_finite() {
            return Ok(0.0);
        }
        Ok(self.d2(x)? - self.d3(x)? / t)
    }
}

/// λ_χ(t) = t χ''(1/t).
pub fn lambda_chi(input: &RecoveryInput, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(crate::error::domain("t", t, "(0, ∞)"));
    }
    Ok(t * input.d2(1.0 / t)?)
}

fn nonnegative(v: f64, scale: f64, what: &str, at: f64) -> Result<f64> {
    if v < -(1e-9 * scale + 1e-13) {
        return Err(Error::NotInClass {
            reason: format!("{what} is negative ({v})"),
            witness: at,
        });
    }
    Ok(v.max(0.0))
}

fn planar_integral(q: Quadrature, f: impl Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<Estimate> {
    let failure = std::cell::RefCell::new(None);
    let est = q.integrate(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        a,
        b,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    est.map_err(|e| Error::Inconclusive(format!("planar Stieltjes integral failed: {e}")))
}

/// The moving-maxima shape f at u > 0.
pub fn recover_shape(input: &RecoveryInput, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(crate::error::domain("u", u, "(0, ∞)"));
    }
    let s = 2.0 * u;
    match input.dim {
        1 => {
            // left derivative at a kink keeps f left-continuous
            let d1 = if input.chi.kinks().contains(&s) {
                input.chi.one_sided_derivative(1, s, Side::Left)?.value
            } else {
                input.chi.derivative(1, s)?.value
            };
            nonnegative(-d1, d1.abs(), "-χ'(2u)", u)
        }
        2 => {
            input.require_smooth_for_plane()?;
            let a = 1.0 / s;
            let q = Quadrature::new(input.tol)
                .rel_tol(input.tol)
                .right(Endpoint::Singular(0.5));
            let est = planar_integral(
                q,
                |t| {
                    let w = (a / t).powi(2) - 1.0;
                    Ok(w.max(0.0).sqrt() * input.lambda_slope(t)?)
                },
                0.0,
                a,
            )?;
            let v = 4.0 * u / std::f64::consts::PI * est.value;
            nonnegative(v, est.abs_error.max(v.abs()), "planar shape", u)
        }
        _ => {
            let c2 = input.d2(s)?;
            nonnegative(c2 / (std::f64::consts::PI * u), c2.abs(), "χ''(2u)", u)
        }
    }
}

/// Density of the diameter 2R at s > 0. In d = 1 a kink of χ at s is a
/// point mass of 2R, reported as [`DensityValue::Atomic`].
pub fn recover_radius_density(input: &RecoveryInput, s: f64) -> Result<DensityValue> {
    if !(s > 0.0) {
        return Err(crate::error::domain("s", s, "(0, ∞)"));
    }
    match input.dim {
        1 => {
            if input.chi.kinks().contains(&s) {
                let l = input.chi.one_sided_derivative(1, s, Side::Left)?.value;
                let r = input.chi.one_sided_derivative(1, s, Side::Right)?.value;
                let mass = nonnegative(s * (r - l), l.abs() + r.abs(), "slope jump", s)?;
                return Ok(DensityValue::Atomic { location: s, mass });
            }
            let c2 = input.d2(s)?;
            Ok(DensityValue::Value(nonnegative(s * c2, s * c2.abs(), "s χ''(s)", s)?))
        }
        2 => {
            input.require_smooth_for_plane()?;
            // t = (1 - w²)/s removes the inverse square root at t = 1/s
            let q = Quadrature::new(input.tol).rel_tol(input.tol);
            let est = planar_integral(
                q,
                |w| {
                    let v = 1.0 - w * w;
                    Ok(v / (2.0 - w * w).sqrt() * input.lambda_slope(v / s)?)
                },
                0.0,
                1.0,
            )?;
            let v = s * est.value;
            Ok(DensityValue::Value(nonnegative(
                v,
                est.abs_error.max(v.abs()),
                "planar radius density",
                s,
            )?))
        }
        _ => {
            let c2 = input.d2(s)?;
            let c3 = input.d3(s)?;
            let v = s / 3.0 * (c2 - s * c3);
            Ok(DensityValue::Value(nonnegative(
                v,
                s * (c2.abs() + s * c3.abs()),
                "(s/3)(χ'' - s χ''')",
                s,
            )?))
        }
    }
}

/// The recovered shape as a radial function; evaluation errors become NaN.
pub fn shape_function(input: &RecoveryInput) -> RadialFunction {
    let inp = input.clone();
    let kinks: Vec<f64> = input.chi.kinks().iter().map(|k| 0.5 * k).collect();
    let mut f = RadialFunction::new(format!("shape[{}]", input.chi.name()), move |u| {
        if u <= 0.0 {
            return f64::INFINITY;
        }
        recover_shape(&inp, u).unwrap_or(f64::NAN)
    })
    .with_kinks(&kinks);
    if let Some(b) = input.chi.support_bound() {
        f = f.with_support_bound(0.5 * b);
    }
    f
}

/// Law of the diameter 2R. Piecewise linear χ in d = 1 yields an atomic law;
/// otherwise the law is continuous with the recovered density.
pub fn diameter_law(input: &RecoveryInput) -> Result<Distribution1D> {
    let kinks = input.chi.kinks().to_vec();
    if input.dim == 1 && !kinks.is_empty() {
        let mut atoms = Vec::new();
        for &k in &kinks {
            if let DensityValue::Atomic { location, mass } = recover_radius_density(input, k)? {
                if mass > 0.0 {
                    atoms.push((location, mass));
                }
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let continuous_part = log_grid(1e-3, 1e2, GRID)
            .filter(|s| !kinks.iter().any(|k| (k - s).abs() < 1e-6 * k))
            .any(|s| matches!(recover_radius_density(input, s), Ok(DensityValue::Value(v)) if v > 1e-12));
        if continuous_part || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Unsupported("diameter laws mixing atoms and a density".into()));
        }
        return Distribution1D::discrete(format!("2R[{}]", input.chi.name()), &atoms);
    }
    let dens = input.clone();
    let cdf_input = input.clone();
    let density = move |s: f64| match recover_radius_density(&dens, s) {
        Ok(DensityValue::Value(v)) => v,
        _ => f64::NAN,
    };
    let cdf = move |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        Quadrature::new(1e-10)
            .integrate(
                |x| match recover_radius_density(&cdf_input, x) {
                    Ok(DensityValue::Value(v)) => v,
                    _ => f64::NAN,
                },
                0.0,
                s,
            )
            .map_or(f64::NAN, |e| e.value.min(1.0))
    };
    let mut law = Distribution1D::continuous(
        format!("2R[{}]", input.chi.name()),
        cdf,
        (0.0, input.chi.support_bound().unwrap_or(f64::INFINITY)),
    )?
    .with_density(density);
    {
        // k(s) ~ s^{-1/2} near 0 is the typical pole for smooth χ with
        // χ'(0) = -∞; harmless otherwise
        law = law.with_lower_exponent(-0.5);
    }
    Ok(law)
}

/// ∫_{R^d} f(|z|) dz of the recovered shape (should be 1).
pub fn shape_mass(input: &RecoveryInput, tol: f64) -> Result<Estimate> {
    crate::tcf_models::radial_mass(&shape_function(input), input.dim, tol)
}

/// Total mass of the recovered diameter law (should be 1).
pub fn diameter_mass(input: &RecoveryInput, tol: f64) -> Result<Estimate> {
    diameter_law(input)?.expect(|_| 1.0, tol)
}

/// f(u) = κ_d^{-1} ∫_0^{1/u} s^d dH(s), the shape whose radial profile is
/// driven by the law H of 1/R. Atoms at 1/u count (right-continuous H).
pub fn f_from_h(h: &Distribution1D, d: usize, u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(crate::error::domain("u", u, "(0, ∞)"));
    }
    let top = 1.0 / u;
    let kd = unit_ball_volume(d);
    let power = |s: f64| s.powi(d as i32);
    if h.is_atomic() {
        let v: f64 = h
            .atoms()
            .iter()
            .filter(|a| a.0 <= top)
            .map(|&(s, m)| m * power(s))
            .sum();
        return Ok(v / kd);
    }
    let (lo, hi) = h.support();
    if top <= lo {
        return Ok(0.0);
    }
    let est = h.expect_with(move |s| if s <= top { power(s) } else { 0.0 }, &[top.min(hi)], 1e-13)?;
    Ok(est.value / kd)
}

/// H(s) = κ_d [s^{-d} f(1/s) + d ∫_{1/s}^∞ u^{d-1} f(u) du], the inverse of
/// [`f_from_h`].
pub fn h_from_f(f: &RadialFunction, d: usize, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(crate::error::domain("s", s, "(0, ∞)"));
    }
    let lo = 1.0 / s;
    let hi = f.support_bound().unwrap_or(f64::INFINITY);
    let tail = if lo >= hi {
        0.0
    } else {
        let bps: Vec<f64> = f.kinks().iter().copied().filter(|&k| k > lo && k < hi).collect();
        Quadrature::new(1e-14)
            .rel_tol(1e-12)
            .breakpoints(&bps)
            .integrate(|u| u.powi(d as i32 - 1) * f.eval(u), lo, hi)?
            .value
    };
    let kd = unit_ball_volume(d);
    Ok((kd * (s.powi(-(d as i32)) * f.eval(lo) + d as f64 * tail)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::erfc;
    use crate::tcf_models::{erfc_sqrt, exponential, tent};
    use std::f64::consts::PI;

    fn f33(u: f64) -> f64 {
        (1.0 + 4.0 * u) * (-2.0 * u).exp() / (PI.powf(1.5) * (2.0 * u).powf(2.5))
    }

    fn k33(s: f64) -> f64 {
        (4.0 * s * s + 8.0 * s + 5.0) * (-s).exp() / (12.0 * (PI * s).sqrt())
    }

    #[test]
    fn lambda_reference_values() {
        let i = RecoveryInput::new(erfc_sqrt(), 3).unwrap();
        let want = 3.0 * (-1.0f64).exp() / (2.0 * PI.sqrt());
        assert!((lambda_chi(&i, 1.0).unwrap() - want).abs() < 1e-15);
        let e = RecoveryInput::new(exponential(1.0), 1).unwrap();
        assert!((lambda_chi(&e, 2.0).unwrap() - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn truncated_square_is_refused_in_three_dimensions() {
        let q = RadialFunction::new("(1-t)_+^2", |t: f64| (1.0 - t).max(0.0).powi(2)).with_kinks(&[1.0]);
        assert!(matches!(RecoveryInput::new(q, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn erfc_sqrt_closed_forms() {
        let i = RecoveryInput::new(erfc_sqrt(), 3).unwrap();
        for &u in &[0.01, 0.2, 1.0, 4.0] {
            let f = recover_shape(&i, u).unwrap();
            assert!((f / f33(u) - 1.0).abs() < 1e-12, "u={u}");
            let k = recover_radius_density(&i, u).unwrap();
            let DensityValue::Value(k) = k else { panic!() };
            assert!((k / k33(u) - 1.0).abs() < 1e-12, "s={u}");
        }
    }

    #[test]
    fn one_dimensional_exponential_and_tent() {
        let e = RecoveryInput::new(exponential(1.0), 1).unwrap();
        assert!((recover_shape(&e, 0.7).unwrap() - (-1.4f64).exp()).abs() < 1e-15);
        assert_eq!(
            recover_radius_density(&e, 2.0).unwrap(),
            DensityValue::Value(2.0 * (-2.0f64).exp())
        );
        let t = RecoveryInput::new(tent(), 1).unwrap();
        assert!((recover_shape(&t, 0.25).unwrap() - 1.0).abs() < 1e-12);
        assert!((recover_shape(&t, 0.5).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(recover_shape(&t, 0.6).unwrap(), 0.0);
        match recover_radius_density(&t, 1.0).unwrap() {
            DensityValue::Atomic { location, mass } => {
                assert_eq!(location, 1.0);
                assert!((mass - 1.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let law = diameter_law(&t).unwrap();
        assert_eq!(law.cdf(0.999), 0.0);
        assert!((law.cdf(1.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn planar_recovery_reproduces_the_tcf() {
        let i = RecoveryInput::new(erfc_sqrt(), 2).unwrap();
        let m = shape_mass(&i, 1e-8).unwrap();
        assert!((m.value - 1.0).abs() < 1e-6, "{}", m.value);
        let k = diameter_mass(&i, 1e-8).unwrap();
        assert!((k.value - 1.0).abs() < 1e-6, "{}", k.value);
        let f = shape_function(&i);
        for &t in &[0.1, 1.0, 3.0] {
            let chi = crate::tcf_models::radial_overlap(&f, 2, t, 1e-8).unwrap().value;
            assert!((chi - erfc(t.sqrt())).abs() < 1e-6, "t={t}: {chi}");
        }
        let planar = RecoveryInput::new(tent(), 2).unwrap();
        assert!(matches!(recover_shape(&planar, 0.3), Err(Error::Inconclusive(_))));
    }

    #[test]
    fn shape_and_h_round_trip() {
        let h = Distribution1D::exponential(1.0).unwrap();
        let f = RadialFunction::new("f", move |u| f_from_h(&h, 3, u).unwrap());
        let h2 = Distribution1D::exponential(1.0).unwrap();
        for &s in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            let back = h_from_f(&f, 3, s).unwrap();
            assert!((back - h2.cdf(s)).abs() < 1e-6, "s={s}: {back}");
        }
    }

    #[test]
    fn point_mass_h() {
        let h = Distribution1D::point_mass(2.0).unwrap();
        assert_eq!(f_from_h(&h, 1, 0.5).unwrap(), 1.0);
        assert_eq!(f_from_h(&h, 1, 0.51).unwrap(), 0.0);
        let f = RadialFunction::new("zero", |_| 0.0).with_support_bound(1.0);
        assert_eq!(h_from_f(&f, 2, 0.5).unwrap(), 0.0);
    }
}
