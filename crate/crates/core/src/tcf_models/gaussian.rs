use crate::error::{Error, Result};

use super::radial::RadialFunction;

/// Correlation function of a stationary isotropic Gaussian process.
#[derive(Debug, Clone)]
pub enum Correlation {
    /// e^{-t/scale}.
    Exponential {
        scale: f64,
    },
    User(RadialFunction),
}

impl Correlation {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Correlation::Exponential { scale } => (-t.abs() / scale).exp(),
            Correlation::User(f) => f.eval(t.abs()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Correlation::Exponential { scale } = self {
            if !(*scale > 0.0) {
                return Err(crate::error::domain("correlation scale", *scale, "(0, ∞)"));
            }
        }
        let at0 = self.eval(0.0);
        if (at0 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("correlation at 0 is {at0}, expected 1")));
        }
        for i in 0..=400 {
            let t = 1e-3 * 10f64.powf(6.0 * i as f64 / 400.0);
            let r = self.eval(t);
            if !(r.abs() <= 1.0 + 1e-12) {
                return Err(Error::InvalidModel(format!(
                    "correlation {r} at t = {t} outside [-1, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn as_radial(&self) -> RadialFunction {
        match self {
            Correlation::Exponential { scale } => super::radial::exponential(*scale),
            Correlation::User(f) => f.clone(),
        }
    }
}

/// Variogram γ(t) = E(W_t - W_0)² of a Gaussian process with stationary
/// increments, evaluated along radial lags.
#[derive(Debug, Clone)]
pub enum Variogram {
    /// scale · t^α, α ∈ (0, 2].
    Fbm { scale: f64, alpha: f64 },
    /// λ (1 - ρ(t)).
    Bounded { lambda: f64, correlation: Correlation },
}

impl Variogram {
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            Variogram::Fbm { scale, alpha } => {
                if t == 0.0 {
                    0.0
                } else {
                    scale * t.powf(*alpha)
                }
            }
            Variogram::Bounded { lambda, correlation } => lambda * (1.0 - correlation.eval(t)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Variogram::Fbm { scale, alpha } => {
                if !(*scale > 0.0) {
                    return Err(crate::error::domain("variogram scale", *scale, "(0, ∞)"));
                }
                if !(*alpha > 0.0 && *alpha <= 2.0) {
                    return Err(crate::error::domain("variogram alpha", *alpha, "(0, 2]"));
                }
            }
            Variogram::Bounded { lambda, correlation } => {
                if !(*lambda > 0.0) {
                    return Err(crate::error::domain("variogram lambda", *lambda, "(0, ∞)"));
                }
                correlation.validate()?;
            }
        }
        Ok(())
    }

    /// Cov(W_s, W_t) of the process anchored at W_0 = 0, from |s|, |t| and
    /// the lag |s - t|.
    pub fn anchored_covariance(&self, s: f64, t: f64, lag: f64) -> f64 {
        0.5 * (self.eval(s) + self.eval(t) - self.eval(lag))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variogram_forms() {
        let v = Variogram::Fbm { scale: 8.0, alpha: 1.0 };
        v.validate().unwrap();
        assert_eq!(v.eval(0.0), 0.0);
        assert_eq!(v.eval(2.0), 16.0);
        let b = Variogram::Bounded {
            lambda: 1.62,
            correlation: Correlation::Exponential { scale: 1.0 },
        };
        b.validate().unwrap();
        assert!((b.eval(1.0) - 1.62 * (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!(Variogram::Fbm { scale: 1.0, alpha: 2.5 }.validate().is_err());
    }

    #[test]
    fn correlation_checks() {
        assert!(Correlation::User(RadialFunction::new("two", |_| 2.0))
            .validate()
            .is_err());
        assert!(Correlation::User(RadialFunction::new("bump", |t: f64| 1.0 - 3.0 * t))
            .validate()
            .is_err());
        Correlation::User(RadialFunction::new("one", |_| 1.0))
            .validate()
            .unwrap();
    }
}
