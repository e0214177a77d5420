use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{Endpoint, Estimate, NumericsError, Quadrature};

type Fun = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Answer to a density query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityValue {
    Value(f64),
    /// The law puts positive mass on a single location and has no density
    /// there.
    Atomic {
        location: f64,
        mass: f64,
    },
}

/// A probability law on (0, ∞).
///
/// Either purely atomic or absolutely continuous. The continuous case needs a
/// cdf and at least one of density or quantile; expectations prefer the
/// density and fall back to the quantile integral ∫_0^1 g(Q(p)) dp.
#[derive(Clone)]
pub struct Distribution1D {
    name: String,
    cdf: Fun,
    density: Option<Fun>,
    quantile: Option<Fun>,
    atoms: Vec<(f64, f64)>,
    support: (f64, f64),
    lower_exponent: Option<f64>,
    tail_decay: Option<f64>,
}

impl fmt::Debug for Distribution1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distribution1D")
            .field("name", &self.name)
            .field("density", &self.density.is_some())
            .field("quantile", &self.quantile.is_some())
            .field("atoms", &self.atoms)
            .field("support", &self.support)
            .finish()
    }
}

impl Distribution1D {
    /// Continuous law given by its cdf; attach a density or quantile next.
    pub fn continuous(
        name: impl Into<String>,
        cdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
    ) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidModel(format!(
                "support ({lo}, {hi}) must be an interval in [0, ∞)"
            )));
        }
        Ok(Distribution1D {
            name: name.into(),
            cdf: Arc::new(cdf),
            density: None,
            quantile: None,
            atoms: Vec::new(),
            support,
            lower_exponent: None,
            tail_decay: None,
        })
    }

    pub fn with_density(mut self, density: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.density = Some(Arc::new(density));
        self
    }

    pub fn with_quantile(mut self, q: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.quantile = Some(Arc::new(q));
        self
    }

    /// Declares a density singularity (x - lo)^α at the lower support end.
    pub fn with_lower_exponent(mut self, alpha: f64) -> Self {
        self.lower_exponent = Some(alpha);
        self
    }

    /// Declares that the density decays like x^{-p} at +∞.
    pub fn with_tail_decay(mut self, p: f64) -> Self {
        self.tail_decay = Some(p);
        self
    }

    /// Law with finitely many atoms; masses must sum to one.
    pub fn discrete(name: impl Into<String>, atoms: &[(f64, f64)]) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.is_empty() || (total - 1.0).abs() > 1e-12 || atoms.iter().any(|&(x, m)| !(x > 0.0) || !(m > 0.0)) {
            return Err(Error::InvalidModel(
                "atoms need positive locations and masses summing to one".into(),
            ));
        }
        let mut atoms = atoms.to_vec();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cdf_atoms = atoms.clone();
        Ok(Distribution1D {
            name: name.into(),
            cdf: Arc::new(move |x| {
                cdf_atoms
                    .iter()
                    .take_while(|a| a.0 <= x)
                    .map(|a| a.1)
                    .sum::<f64>()
                    .min(1.0)
            }),
            density: None,
            quantile: None,
            support: (atoms[0].0, atoms[atoms.len() - 1].0),
            atoms,
            lower_exponent: None,
            tail_decay: None,
        })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::discrete(format!("delta({x})"), &[(x, 1.0)])
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(crate::error::domain("rate", rate, "(0, ∞)"));
        }
        Ok(Self::continuous(
            format!("Exp({rate})"),
            move |x| 1.0 - (-rate * x.max(0.0)).exp(),
            (0.0, f64::INFINITY),
        )?
        .with_density(move |x| if x < 0.0 { 0.0 } else { rate * (-rate * x).exp() })
        .with_quantile(move |p| -(-p).ln_1p() / rate))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_atomic(&self) -> bool {
        !self.atoms.is_empty()
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    /// Right-continuous cdf.
    pub fn cdf(&self, x: f64) -> f64 {
        (self.cdf)(x)
    }

    pub fn density(&self, x: f64) -> Option<DensityValue> {
        if let Some(&(location, mass)) = self.atoms.iter().find(|a| a.0 == x) {
            return Some(DensityValue::Atomic { location, mass });
        }
        if self.is_atomic() {
            return Some(DensityValue::Value(0.0));
        }
        self.density.as_ref().map(|g| DensityValue::Value(g(x)))
    }

    /// Quantile function; falls back to bisection on the cdf.
    pub fn quantile(&self, p: f64) -> f64 {
        if let Some(q) = &self.quantile {
            return q(p);
        }
        if self.is_atomic() {
            let mut acc = 0.0;
            for &(x, m) in &self.atoms {
                acc += m;
                if p <= acc {
                    return x;
                }
            }
            return self.atoms[self.atoms.len() - 1].0;
        }
        let (mut lo, mut hi) = self.support;
        if hi.is_infinite() {
            hi = lo.max(1.0);
            while self.cdf(hi) < p && hi < 1e300 {
                hi *= 2.0;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.quantile(u)
    }

    /// E[g(X)] with breakpoints where g has kinks.
    pub fn expect_with<G: Fn(f64) -> f64>(&self, g: G, breakpoints: &[f64], tol: f64) -> Result<Estimate> {
        if self.is_atomic() {
            let v = self.atoms.iter().map(|&(x, m)| m * g(x)).sum();
            return Ok(Estimate::exact(v));
        }
        let (lo, hi) = self.support;
        if let Some(dens) = &self.density {
            let inside: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > lo && b < hi).collect();
            let mut q = Quadrature::new(tol).rel_tol(tol);
            if let Some(a) = self.lower_exponent {
                q = q.left(Endpoint::Singular(a));
            }
            if let Some(p) = self.tail_decay {
                q = q.tail_decay(p);
            }
            return Ok(q.breakpoints(&inside).integrate(|x| g(x) * dens(x), lo, hi)?);
        }
        if let Some(qf) = &self.quantile {
            let inside: Vec<f64> = breakpoints
                .iter()
                .map(|&b| self.cdf(b))
                .filter(|&p| p > 0.0 && p < 1.0)
                .collect();
            let est = Quadrature::new(tol).rel_tol(tol).breakpoints(&inside).integrate(
                |p| {
                    let x = qf(p);
                    if x.is_finite() {
                        g(x)
                    } else {
                        0.0
                    }
                },
                0.0,
                1.0,
            )?;
            return Ok(est);
        }
        Err(NumericsError::Invalid(format!("law '{}' has neither atoms, density nor quantile", self.name)).into())
    }

    pub fn expect<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> Result<Estimate> {
        self.expect_with(g, &[], tol)
    }

    /// The law of c·X.
    pub fn scaled(&self, c: f64) -> Result<Distribution1D> {
        if !(c > 0.0) {
            return Err(crate::error::domain("scale", c, "(0, ∞)"));
        }
        let mut out = self.clone();
        out.name = format!("{c}·{}", self.name);
        let cdf = self.cdf.clone();
        out.cdf = Arc::new(move |x| cdf(x / c));
        out.density = self.density.clone().map(|g| -> Fun { Arc::new(move |x| g(x / c) / c) });
        out.quantile = self.quantile.clone().map(|q| -> Fun { Arc::new(move |p| c * q(p)) });
        out.atoms = self.atoms.iter().map(|&(x, m)| (c * x, m)).collect();
        out.support = (c * self.support.0, c * self.support.1);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_moments_by_density_and_quantile() {
        let e = Distribution1D::exponential(2.0).unwrap();
        let m = e.expect(|x| x, 1e-12).unwrap();
        assert!((m.value - 0.5).abs() < 1e-10);
        let mut q = e.clone();
        q.density = None;
        let m = q.expect(|x| x * x, 1e-10).unwrap();
        assert!((m.value - 0.5).abs() < 1e-8);
    }

    #[test]
    fn atoms() {
        let d = Distribution1D::point_mass(0.5).unwrap();
        assert_eq!(d.cdf(0.4999), 0.0);
        assert_eq!(d.cdf(0.5), 1.0);
        assert_eq!(
            d.density(0.5),
            Some(DensityValue::Atomic {
                location: 0.5,
                mass: 1.0
            })
        );
        assert_eq!(d.expect(|x| x * 4.0, 1e-9).unwrap().value, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(d.sample(&mut rng), 0.5);
        assert!(Distribution1D::discrete("bad", &[(1.0, 0.5)]).is_err());
    }

    #[test]
    fn bisection_quantile() {
        let d = Distribution1D::continuous("Exp(1)", |x: f64| 1.0 - (-x).exp(), (0.0, f64::INFINITY))
            .unwrap()
            .with_density(|x: f64| (-x).exp());
        let q = d.quantile(0.75);
        assert!((q - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn scaling() {
        let d = Distribution1D::exponential(1.0).unwrap().scaled(3.0).unwrap();
        assert!((d.expect(|x| x, 1e-12).unwrap().value - 3.0).abs() < 1e-9);
        assert!((d.quantile(0.5) - 3.0 * 2.0f64.ln()).abs() < 1e-12);
    }
}
