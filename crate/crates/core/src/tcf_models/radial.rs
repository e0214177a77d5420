use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{
    self, high_order_derivative, num_derivative, one_sided_derivative, Estimate, NumericsError, Series, Side,
};

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Maps the Taylor expansion of the argument to that of the value.
pub type JetFn = Arc<dyn Fn(&Series) -> Series + Send + Sync>;

/// A function on [0, ∞), optionally carrying an exact Taylor jet.
///
/// With a jet, derivatives of any order are exact up to rounding; without
/// one they fall back to extrapolated finite differences that respect the
/// declared kinks.
#[derive(Clone)]
pub struct RadialFunction {
    name: String,
    eval: EvalFn,
    jet: Option<JetFn>,
    kinks: Vec<f64>,
    support_bound: Option<f64>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("name", &self.name)
            .field("jet", &self.jet.is_some())
            .field("kinks", &self.kinks)
            .field("support_bound", &self.support_bound)
            .finish()
    }
}

impl RadialFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialFunction {
            name: name.into(),
            eval: Arc::new(eval),
            jet: None,
            kinks: Vec::new(),
            support_bound: None,
        }
    }

    pub fn with_jet(mut self, jet: impl Fn(&Series) -> Series + Send + Sync + 'static) -> Self {
        self.jet = Some(Arc::new(jet));
        self
    }

    pub fn with_kinks(mut self, kinks: &[f64]) -> Self {
        let mut k = kinks.to_vec();
        k.sort_by(f64::total_cmp);
        k.dedup();
        self.kinks = k;
        self
    }

    /// Declares that the function vanishes on [bound, ∞).
    pub fn with_support_bound(mut self, bound: f64) -> Self {
        self.support_bound = Some(bound);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn support_bound(&self) -> Option<f64> {
        self.support_bound
    }

    pub fn has_jet(&self) -> bool {
        self.jet.is_some()
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// Taylor coefficients of order 0..len at t, when a jet is attached.
    pub fn jet(&self, t: f64, len: usize) -> Option<Series> {
        self.jet.as_ref().map(|j| j(&Series::variable(t, len)))
    }

    pub fn jet_fn(&self) -> Option<JetFn> {
        self.jet.clone()
    }

    fn at_kink(&self, t: f64) -> Option<f64> {
        self.kinks.iter().copied().find(|&k| k == t)
    }

    /// Derivative of the given order at t > 0.
    ///
    /// Exact through the jet when present. Otherwise orders 1..=3 use central
    /// differences that refuse to straddle a kink, and orders 4..=8 the
    /// high-order stencil on [0, ∞).
    pub fn derivative(&self, order: usize, t: f64) -> Result<Estimate> {
        if order == 0 {
            return Ok(Estimate::exact(self.eval(t)));
        }
        if let Some(kink) = self.at_kink(t) {
            return Err(NumericsError::NearKink { x: t, kink, reach: 0.0 }.into());
        }
        if let Some(s) = self.jet(t, order + 1) {
            let v = s.derivative_at(order).expect("jet has order + 1 terms");
            return Ok(Estimate::new(v, self.jet_noise(order, t, v)));
        }
        let f = |x: f64| self.eval(x);
        let est = if order <= 3 {
            num_derivative(f, t, order, None, &self.kinks)?
        } else {
            if self.kinks.iter().any(|&k| (k - t).abs() < 0.1 * t.abs().max(1.0)) {
                return Err(Error::Precondition(format!(
                    "order-{order} difference of '{}' at {t} would straddle a kink",
                    self.name
                )));
            }
            high_order_derivative(f, t, order, Some(0.0))?
        };
        Ok(est)
    }

    /// Rounding noise of a jet derivative, gauged by re-evaluating the jet a
    /// few ulps away; cancellation inside the composition shows up as
    /// disagreement far above the true change of the derivative.
    fn jet_noise(&self, order: usize, t: f64, v: f64) -> f64 {
        let mut spread: f64 = 0.0;
        for f in [1.0 - 8.0 * f64::EPSILON, 1.0 + 8.0 * f64::EPSILON] {
            if let Some(w) = self.jet(t * f, order + 1).and_then(|s| s.derivative_at(order)) {
                spread = spread.max((w - v).abs());
            }
        }
        1e2 * f64::EPSILON * v.abs() + 4.0 * spread
    }

    /// One-sided derivative of order 1..=3; exact through the jet when the
    /// point is not a kink.
    pub fn one_sided_derivative(&self, order: usize, t: f64, side: Side) -> Result<Estimate> {
        if self.at_kink(t).is_none() {
            if let Some(s) = self.jet(t, order + 1) {
                let v = s.derivative_at(order).expect("jet has order + 1 terms");
                return Ok(Estimate::new(v, 1e2 * f64::EPSILON * v.abs()));
            }
        }
        let f = |x: f64| self.eval(x);
        Ok(one_sided_derivative(f, t, order, side, None, &self.kinks)?)
    }

    /// t ↦ f(a t).
    pub fn scale_argument(&self, a: f64) -> RadialFunction {
        let inner = self.clone();
        let eval = self.eval.clone();
        let mut out = RadialFunction::new(format!("{}({a}·t)", self.name), move |t| eval(a * t));
        if let Some(j) = inner.jet {
            out = out.with_jet(move |s| j(&s.scale(a)));
        }
        out.kinks = inner.kinks.iter().map(|k| k / a).collect();
        out.support_bound = inner.support_bound.map(|b| b / a);
        out
    }

    /// t ↦ f(√t).
    pub fn compose_sqrt(&self) -> RadialFunction {
        let inner = self.clone();
        let eval = self.eval.clone();
        let mut out = RadialFunction::new(format!("{}(√t)", self.name), move |t| eval(t.sqrt()));
        if let Some(j) = inner.jet {
            out = out.with_jet(move |s| j(&s.sqrt()));
        }
        out.kinks = inner.kinks.iter().map(|k| k * k).collect();
        out.support_bound = inner.support_bound.map(|b| b * b);
        out
    }

    /// Pointwise product.
    pub fn product(&self, other: &RadialFunction) -> RadialFunction {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut out = RadialFunction::new(format!("{}·{}", self.name, other.name), move |t| a(t) * b(t));
        if let (Some(ja), Some(jb)) = (self.jet.clone(), other.jet.clone()) {
            out = out.with_jet(move |s| &ja(s) * &jb(s));
        }
        let mut kinks = self.kinks.clone();
        kinks.extend_from_slice(&other.kinks);
        out = out.with_kinks(&kinks);
        out.support_bound = match (self.support_bound, other.support_bound) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        out
    }

    /// t ↦ -f'(t), available when the function has a jet.
    pub fn negative_derivative(&self) -> Option<RadialFunction> {
        let j = self.jet.clone()?;
        let j2 = j.clone();
        let out = RadialFunction::new(format!("-{}'", self.name), move |t| {
            -j(&Series::variable(t, 2)).coeffs()[1]
        })
        .with_jet(move |s| {
            // -f' composed with s: differentiate f's jet in its own variable
            let n = s.len();
            let base = j2(&Series::variable(s.value(), n + 1));
            let d = base.differentiate().scale(-1.0);
            compose_taylor(&d, s)
        });
        Some(out.with_kinks(&self.kinks))
    }
}

/// Composes g (Taylor coefficients about s0) with s, where s0 = s.value().
pub(crate) fn compose_taylor(g: &Series, s: &Series) -> Series {
    let n = s.len();
    let z = s.add_const(-s.value());
    let mut out = Series::constant(0.0, n);
    let mut pow = Series::constant(1.0, n);
    for (k, c) in g.coeffs().iter().enumerate().take(n) {
        if k > 0 {
            pow = &pow * &z;
        }
        out = &out + &pow.scale(*c);
    }
    out
}

/// erfc(√t).
pub fn erfc_sqrt() -> RadialFunction {
    RadialFunction::new("erfc(sqrt t)", |t: f64| numerics::erfc(t.max(0.0).sqrt())).with_jet(|s| s.sqrt().erfc())
}

/// erfc(t^α).
pub fn erfc_power(alpha: f64) -> RadialFunction {
    RadialFunction::new(format!("erfc(t^{alpha})"), move |t: f64| {
        numerics::erfc(t.max(0.0).powf(alpha))
    })
    .with_jet(move |s| s.powf(alpha).erfc())
}

/// e^{-t/scale}.
pub fn exponential(scale: f64) -> RadialFunction {
    RadialFunction::new(format!("exp(-t/{scale})"), move |t: f64| (-t / scale).exp())
        .with_jet(move |s| s.scale(-1.0 / scale).exp())
}

/// The tent (1 - t)_+.
pub fn tent() -> RadialFunction {
    RadialFunction::new("tent", |t: f64| (1.0 - t).max(0.0))
        .with_jet(|s| {
            if s.value() < 1.0 {
                s.scale(-1.0).add_const(1.0)
            } else {
                Series::constant(0.0, s.len())
            }
        })
        .with_kinks(&[1.0])
        .with_support_bound(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn jet_derivatives_match_closed_forms() {
        let chi = erfc_sqrt();
        let s = 2.0f64;
        let d2 = chi.derivative(2, s).unwrap().value;
        let want = (-s).exp() * (2.0 * s + 1.0) / (2.0 * PI.sqrt() * s.powf(1.5));
        assert!((d2 - want).abs() < 1e-15);
    }

    #[test]
    fn numeric_fallback_agrees_with_jet() {
        let with = erfc_power(0.7);
        let without = RadialFunction::new("plain", |t: f64| numerics::erfc(t.powf(0.7)));
        for order in 1..=3 {
            let a = with.derivative(order, 1.3).unwrap().value;
            let b = without.derivative(order, 1.3).unwrap().value;
            assert!((a - b).abs() < 1e-7 * a.abs().max(1.0), "order {order}");
        }
    }

    #[test]
    fn kinks_are_guarded() {
        let t = tent();
        assert!(t.derivative(1, 1.0).is_err());
        assert_eq!(t.derivative(1, 0.5).unwrap().value, -1.0);
        let l = t.one_sided_derivative(1, 1.0, Side::Left).unwrap().value;
        let r = t.one_sided_derivative(1, 1.0, Side::Right).unwrap().value;
        assert!((l + 1.0).abs() < 1e-9 && r.abs() < 1e-9);
    }

    #[test]
    fn argument_maps() {
        let f = exponential(1.0).scale_argument(2.0);
        assert!((f.eval(1.0) - (-2.0f64).exp()).abs() < 1e-16);
        assert!((f.derivative(1, 1.0).unwrap().value + 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        let g = tent().compose_sqrt();
        assert_eq!(g.kinks(), &[1.0]);
        assert!((g.eval(0.25) - 0.5).abs() < 1e-16);
        let p = exponential(1.0).product(&tent());
        assert_eq!(p.support_bound(), Some(1.0));
        assert!((p.derivative(1, 0.5).unwrap().value - (-(0.5f64).exp().recip() * 1.5)).abs() < 1e-14);
    }

    #[test]
    fn negative_derivative_jet() {
        let f = erfc_sqrt().negative_derivative().unwrap();
        let t = 0.8f64;
        let want = (-t).exp() / (PI * t).sqrt();
        assert!((f.eval(t) - want).abs() < 1e-15);
        let d = f.derivative(1, t).unwrap().value;
        let chi2 = (-t).exp() * (2.0 * t + 1.0) / (2.0 * PI.sqrt() * t.powf(1.5));
        assert!((d + chi2).abs() < 1e-14);
    }
}
