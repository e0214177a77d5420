//! Truncated Taylor series arithmetic.
//!
//! A [`Series`] holds the coefficients c_k = g^{(k)}(x0)/k! of some function g
//! around a fixed point. Feeding `Series::variable(x0, n)` through a chain of
//! the operations below yields the first n Taylor coefficients of the
//! composite function, i.e. exact derivatives up to rounding.

use std::f64::consts::FRAC_2_SQRT_PI;
use std::ops::{Add, Mul, Neg, Sub};

use super::special::erfc;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Series { coeffs }
    }

    pub fn constant(c: f64, len: usize) -> Self {
        let mut coeffs = vec![0.0; len.max(1)];
        coeffs[0] = c;
        Series { coeffs }
    }

    /// The identity map around x0: x0 + z.
    pub fn variable(x0: f64, len: usize) -> Self {
        let mut s = Series::constant(x0, len);
        if s.coeffs.len() > 1 {
            s.coeffs[1] = 1.0;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// k-th derivative at the expansion point, or `None` past the truncation.
    pub fn derivative_at(&self, k: usize) -> Option<f64> {
        let c = *self.coeffs.get(k)?;
        Some(c * (1..=k).fold(1.0, |acc, i| acc * i as f64))
    }

    pub fn scale(&self, a: f64) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add_const(&self, a: f64) -> Series {
        let mut out = self.clone();
        out.coeffs[0] += a;
        out
    }

    pub fn truncate(&self, len: usize) -> Series {
        Series {
            coeffs: self.coeffs[..len.clamp(1, self.len())].to_vec(),
        }
    }

    /// Termwise derivative in z; one coefficient shorter.
    pub fn differentiate(&self) -> Series {
        if self.len() == 1 {
            return Series::constant(0.0, 1);
        }
        Series {
            coeffs: (1..self.len()).map(|k| k as f64 * self.coeffs[k]).collect(),
        }
    }

    /// Antiderivative with the given value at the expansion point; one
    /// coefficient longer.
    pub fn integrate(&self, c0: f64) -> Series {
        let mut coeffs = Vec::with_capacity(self.len() + 1);
        coeffs.push(c0);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
        Series { coeffs }
    }

    pub fn recip(&self) -> Series {
        let a = &self.coeffs;
        let n = a.len();
        let mut r = vec![0.0; n];
        r[0] = 1.0 / a[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| a[j] * r[k - j]).sum();
            r[k] = -s / a[0];
        }
        Series { coeffs: r }
    }

    pub fn div(&self, other: &Series) -> Series {
        self * &other.recip()
    }

    pub fn exp(&self) -> Series {
        let a = &self.coeffs;
        let n = a.len();
        let mut e = vec![0.0; n];
        e[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Series { coeffs: e }
    }

    pub fn ln(&self) -> Series {
        let a = &self.coeffs;
        let n = a.len();
        let mut l = vec![0.0; n];
        l[0] = a[0].ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum();
            l[k] = (a[k] - s / k as f64) / a[0];
        }
        Series { coeffs: l }
    }

    /// self^alpha for a positive leading coefficient.
    pub fn powf(&self, alpha: f64) -> Series {
        let a = &self.coeffs;
        let n = a.len();
        let mut p = vec![0.0; n];
        p[0] = a[0].powf(alpha);
        for k in 1..n {
            let s: f64 = (1..=k)
                .map(|j| (alpha * j as f64 - (k - j) as f64) * a[j] * p[k - j])
                .sum();
            p[k] = s / (k as f64 * a[0]);
        }
        Series { coeffs: p }
    }

    pub fn powi(&self, k: u32) -> Series {
        let mut out = Series::constant(1.0, self.len());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn sqrt(&self) -> Series {
        self.powf(0.5)
    }

    /// (sin, cos) of the series.
    pub fn sin_cos(&self) -> (Series, Series) {
        let a = &self.coeffs;
        let n = a.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..n {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Series { coeffs: s }, Series { coeffs: c })
    }

    pub fn cos(&self) -> Series {
        self.sin_cos().1
    }

    pub fn sin(&self) -> Series {
        self.sin_cos().0
    }

    /// Applies g given g(a0) and g' as a series-valued map: g(a0) + ∫ g'(a) a'.
    pub fn through_derivative(&self, g0: f64, g_prime: impl Fn(&Series) -> Series) -> Series {
        let n = self.len();
        if n == 1 {
            return Series::constant(g0, 1);
        }
        let head = self.truncate(n - 1);
        (&g_prime(&head) * &self.differentiate()).integrate(g0)
    }

    pub fn erfc(&self) -> Series {
        self.through_derivative(erfc(self.value()), |a| (a * a).scale(-1.0).exp().scale(-FRAC_2_SQRT_PI))
    }

    pub fn erf(&self) -> Series {
        self.erfc().scale(-1.0).add_const(1.0)
    }

    pub fn asin(&self) -> Series {
        self.through_derivative(self.value().asin(), |a| (a * a).scale(-1.0).add_const(1.0).powf(-0.5))
    }

    pub fn atan(&self) -> Series {
        self.through_derivative(self.value().atan(), |a| (a * a).add_const(1.0).recip())
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        Series {
            coeffs: (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        Series {
            coeffs: (0..n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum())
            .collect();
        Series { coeffs }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Series {
            type Output = Series;
            fn $m(self, rhs: Series) -> Series {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn exponential_derivatives() {
        let s = Series::variable(0.7, 9).scale(-1.0).exp();
        for k in 0..9 {
            let want = if k % 2 == 0 { 1.0 } else { -1.0 } * (-0.7f64).exp();
            assert!(close(s.derivative_at(k).unwrap(), want, 1e-14), "k = {k}");
        }
        assert!(s.derivative_at(9).is_none());
    }

    #[test]
    fn erfc_sqrt_derivatives() {
        let t = 1.3f64;
        let s = Series::variable(t, 4).sqrt().erfc();
        let e = (-t).exp();
        let d1 = -e / (PI * t).sqrt();
        let d2 = e * (2.0 * t + 1.0) / (2.0 * PI.sqrt() * t.powf(1.5));
        let d3 = -e * (4.0 * t * t + 4.0 * t + 3.0) / (4.0 * PI.sqrt() * t.powf(2.5));
        assert!(close(s.value(), erfc(t.sqrt()), 1e-15));
        assert!(close(s.derivative_at(1).unwrap(), d1, 1e-14));
        assert!(close(s.derivative_at(2).unwrap(), d2, 1e-14));
        assert!(close(s.derivative_at(3).unwrap(), d3, 1e-14));
    }

    #[test]
    fn trigonometric_identities() {
        let x = Series::variable(0.3, 12);
        let (s, c) = x.sin_cos();
        let one = &(&s * &s) + &(&c * &c);
        assert!(close(one.value(), 1.0, 1e-15));
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
        let back = x.sin().asin();
        for (k, (a, b)) in back.coeffs().iter().zip(x.coeffs()).enumerate() {
            assert!((a - b).abs() < 1e-13, "k = {k}");
        }
        let at = Series::variable(2.0, 5).atan();
        assert!(close(at.derivative_at(1).unwrap(), 0.2, 1e-15));
        assert!(close(at.derivative_at(2).unwrap(), -4.0 / 25.0, 1e-15));
    }

    #[test]
    fn power_log_round_trip() {
        let x = Series::variable(2.5, 10);
        let y = x.powf(1.7).ln().scale(1.0 / 1.7).exp();
        for (a, b) in y.coeffs().iter().zip(x.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
        let r = x.div(&x);
        assert!(close(r.value(), 1.0, 1e-15));
        assert!(r.coeffs()[1..].iter().all(|c| c.abs() < 1e-15));
        assert_eq!(x.powi(3).derivative_at(3), Some(6.0));
    }
}
