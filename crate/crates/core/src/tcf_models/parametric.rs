//! Parametric radial families with their correlation-function and
//! tail-correlation-function parameter ranges.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{self, Series};

use super::radial::RadialFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// exp(-r^ν).
    PoweredExponential,
    /// 2^{1-ν} Γ(ν)^{-1} r^ν K_ν(r).
    WhittleMatern,
    /// (1 + r^ν)^{-β}.
    Cauchy,
    /// erfc(r^ν).
    PoweredErfc,
    /// (1 - r)_+^ν.
    TruncatedPower,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::PoweredExponential,
        Family::WhittleMatern,
        Family::Cauchy,
        Family::PoweredErfc,
        Family::TruncatedPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::PoweredExponential => "powered_exponential",
            Family::WhittleMatern => "whittle_matern",
            Family::Cauchy => "cauchy",
            Family::PoweredErfc => "powered_erfc",
            Family::TruncatedPower => "truncated_power",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A real interval with open or closed ends; `hi` may be +∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open_closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            lo_closed: false,
            hi,
            hi_closed: true,
        }
    }

    pub fn at_least(lo: f64) -> Self {
        Interval {
            lo,
            lo_closed: true,
            hi: f64::INFINITY,
            hi_closed: false,
        }
    }

    pub fn positive() -> Self {
        Interval {
            lo: 0.0,
            lo_closed: false,
            hi: f64::INFINITY,
            hi_closed: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// ν range for a correlation function on R^d.
    pub cf: Interval,
    /// ν range for a tail correlation function on R^d.
    pub tcf: Interval,
    /// Whether the lower end of `tcf` is known to be sharp in this dimension.
    pub tcf_sharp: bool,
}

/// Table of ν ranges per family in dimension d.
pub fn parametric_bounds(family: Family, d: usize) -> Bounds {
    let unit = Interval::open_closed(0.0, 1.0);
    match family {
        Family::PoweredExponential | Family::Cauchy => Bounds {
            cf: Interval::open_closed(0.0, 2.0),
            tcf: unit,
            tcf_sharp: true,
        },
        Family::WhittleMatern => Bounds {
            cf: Interval::positive(),
            tcf: Interval::open_closed(0.0, 0.5),
            tcf_sharp: true,
        },
        Family::PoweredErfc => Bounds {
            cf: unit,
            tcf: unit,
            tcf_sharp: true,
        },
        Family::TruncatedPower => Bounds {
            cf: Interval::at_least(0.5 * (d as f64 + 1.0)),
            tcf: Interval::at_least((d / 2) as f64 + 1.0),
            tcf_sharp: d % 2 == 1,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterStatus {
    /// Inside the TCF range.
    ValidTcf,
    /// Inside the TCF range, but the range is not known to be sharp here.
    ValidTcfSharpnessUnknown,
    /// A correlation function that is not a tail correlation function.
    ValidCfNotTcf,
    /// Not even a correlation function on R^d.
    InvalidCf,
    /// Outside the CF range where the CF range is not sharp in every
    /// dimension (powered erfc with ν > 1).
    Unknown,
}

/// A member of one of the parametric families, with scale a > 0 acting as
/// r = t / a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parametric {
    pub family: Family,
    pub nu: f64,
    /// Cauchy exponent; ignored by the other families.
    pub beta: f64,
    pub scale: f64,
}

impl Parametric {
    pub fn new(family: Family, nu: f64) -> Self {
        Parametric {
            family,
            nu,
            beta: 1.0,
            scale: 1.0,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(crate::error::domain("nu", self.nu, "(0, ∞)"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(crate::error::domain("scale", self.scale, "(0, ∞)"));
        }
        if self.family == Family::Cauchy && !(self.beta > 0.0) {
            return Err(crate::error::domain("beta", self.beta, "(0, ∞)"));
        }
        Ok(())
    }

    /// Where ν sits relative to the ranges in dimension d.
    pub fn status(&self, d: usize) -> ParameterStatus {
        let b = parametric_bounds(self.family, d);
        if b.tcf.contains(self.nu) {
            if b.tcf_sharp {
                ParameterStatus::ValidTcf
            } else {
                ParameterStatus::ValidTcfSharpnessUnknown
            }
        } else if b.cf.contains(self.nu) {
            ParameterStatus::ValidCfNotTcf
        } else if self.family == Family::PoweredErfc {
            ParameterStatus::Unknown
        } else {
            ParameterStatus::InvalidCf
        }
    }

    /// Like [`status`](Self::status) but as an error for anything that is not
    /// a valid TCF.
    pub fn require_tcf(&self, d: usize) -> Result<()> {
        self.validate()?;
        match self.status(d) {
            ParameterStatus::ValidTcf | ParameterStatus::ValidTcfSharpnessUnknown => Ok(()),
            ParameterStatus::ValidCfNotTcf => Err(Error::InvalidModel(format!(
                "{} with nu = {} is a correlation function but not a TCF in d = {d}",
                self.family, self.nu
            ))),
            ParameterStatus::InvalidCf => Err(Error::InvalidModel(format!(
                "{} with nu = {} is not a correlation function in d = {d}",
                self.family, self.nu
            ))),
            ParameterStatus::Unknown => Err(Error::InvalidModel(format!(
                "{} with nu = {} is outside every known range",
                self.family, self.nu
            ))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let r = t.abs() / self.scale;
        let nu = self.nu;
        match self.family {
            Family::PoweredExponential => (-r.powf(nu)).exp(),
            Family::WhittleMatern => numerics::whittle_matern(nu, r).unwrap_or(f64::NAN),
            Family::Cauchy => (1.0 + r.powf(nu)).powf(-self.beta),
            Family::PoweredErfc => numerics::erfc(r.powf(nu)),
            Family::TruncatedPower => (1.0 - r).max(0.0).powf(nu),
        }
    }

    pub fn radial(&self) -> RadialFunction {
        let p = *self;
        let name = format!("{}(nu={}, scale={})", p.family, p.nu, p.scale);
        let base = RadialFunction::new(name, move |t| p.eval(t));
        let a = p.scale;
        let nu = p.nu;
        match p.family {
            Family::PoweredExponential => base.with_jet(move |s| s.scale(1.0 / a).powf(nu).scale(-1.0).exp()),
            Family::Cauchy => {
                let beta = p.beta;
                base.with_jet(move |s| s.scale(1.0 / a).powf(nu).add_const(1.0).powf(-beta))
            }
            Family::PoweredErfc => base.with_jet(move |s| s.scale(1.0 / a).powf(nu).erfc()),
            Family::TruncatedPower => base
                .with_jet(move |s| {
                    if s.value() >= a {
                        Series::constant(0.0, s.len())
                    } else {
                        s.scale(-1.0 / a).add_const(1.0).powf(nu)
                    }
                })
                .with_kinks(&[a])
                .with_support_bound(a),
            Family::WhittleMatern => base,
        }
    }
}

/// Evaluates a family member at t.
pub fn parametric_tcf(model: &Parametric, t: f64) -> Result<f64> {
    model.validate()?;
    if t < 0.0 || t.is_nan() {
        return Err(crate::error::domain("t", t, "[0, ∞)"));
    }
    Ok(model.eval(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let pe = Parametric::new(Family::PoweredExponential, 1.0);
        assert!((parametric_tcf(&pe, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-16);
        let c = Parametric::new(Family::Cauchy, 1.0).with_beta(1.0);
        assert_eq!(parametric_tcf(&c, 1.0).unwrap(), 0.5);
        let tp = Parametric::new(Family::TruncatedPower, 2.0);
        assert_eq!(parametric_tcf(&tp, 1.5).unwrap(), 0.0);
        assert_eq!(parametric_tcf(&tp, 0.5).unwrap(), 0.25);
        let wm = Parametric::new(Family::WhittleMatern, 0.5);
        assert!((parametric_tcf(&wm, 1.3).unwrap() - (-1.3f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn bounds_table() {
        let b = parametric_bounds(Family::TruncatedPower, 3);
        assert_eq!(b.tcf.lo, 2.0);
        assert_eq!(b.cf.lo, 2.0);
        assert!(b.tcf_sharp);
        let b = parametric_bounds(Family::TruncatedPower, 4);
        assert_eq!(b.tcf.lo, 3.0);
        assert_eq!(b.cf.lo, 2.5);
        assert!(!b.tcf_sharp);
        let pe = parametric_bounds(Family::PoweredExponential, 2);
        assert!(pe.tcf.contains(1.0) && !pe.tcf.contains(1.5) && pe.cf.contains(2.0));
        assert!(!pe.cf.contains(0.0));
    }

    #[test]
    fn status_classification() {
        let s = |f, nu, d| Parametric::new(f, nu).status(d);
        assert_eq!(s(Family::PoweredExponential, 1.0, 3), ParameterStatus::ValidTcf);
        assert_eq!(s(Family::PoweredExponential, 1.5, 3), ParameterStatus::ValidCfNotTcf);
        assert_eq!(s(Family::PoweredExponential, 2.5, 3), ParameterStatus::InvalidCf);
        assert_eq!(s(Family::WhittleMatern, 0.7, 2), ParameterStatus::ValidCfNotTcf);
        assert_eq!(s(Family::TruncatedPower, 1.5, 3), ParameterStatus::InvalidCf);
        assert_eq!(
            s(Family::TruncatedPower, 3.0, 2),
            ParameterStatus::ValidTcfSharpnessUnknown
        );
        assert!(Parametric::new(Family::Cauchy, 1.5).require_tcf(1).is_err());
    }

    #[test]
    fn jets_agree_with_values() {
        for f in Family::ALL {
            let m = Parametric::new(f, 0.8).with_scale(1.7);
            let r = m.radial();
            if let Some(j) = r.jet(0.6, 2) {
                assert!((j.value() - m.eval(0.6)).abs() < 1e-14, "{f}");
            }
        }
    }
}
