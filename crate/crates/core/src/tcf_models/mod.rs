//! Tail correlation functions of the stationary max-stable process classes,
//! the kernel h_d, parametric families and erfc scale mixtures.

pub mod catalog;
mod distribution;
mod gaussian;
mod kernel;
mod mixture;
mod parametric;
mod radial;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use distribution::{DensityValue, Distribution1D};
pub use gaussian::{Correlation, Variogram};
pub use kernel::{
    h_d, h_d_derivative, h_d_radial, overlap_constant, phi_d, phi_d_derivative, phi_d_neg_deriv_sqrt, phi_d_radial,
};
pub use mixture::{erfc_mixture, erfc_scale_mixture, matern_mixing_density, ErfcMixtureEntry};
pub use parametric::{parametric_bounds, parametric_tcf, Bounds, Family, Interval, ParameterStatus, Parametric};
pub use radial::{erfc_power, erfc_sqrt, exponential, tent, JetFn, RadialFunction};

use crate::error::{Error, Result};
use crate::numerics::{self, projected_tent_slope, sphere_area, Endpoint, Estimate, NumericsError, Quadrature};

type ShapeSampler = Arc<dyn Fn(&mut ChaCha8Rng) -> RadialFunction + Send + Sync>;

/// A random radially non-increasing shape, sampled on demand.
///
/// The shapes must integrate to one in expectation over the ensemble.
#[derive(Clone)]
pub struct ShapeEnsemble {
    pub name: String,
    sampler: ShapeSampler,
    pub samples: usize,
    pub seed: u64,
}

impl fmt::Debug for ShapeEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShapeEnsemble")
            .field("name", &self.name)
            .field("samples", &self.samples)
            .field("seed", &self.seed)
            .finish()
    }
}

impl ShapeEnsemble {
    pub fn new(
        name: impl Into<String>,
        samples: usize,
        seed: u64,
        sampler: impl Fn(&mut ChaCha8Rng) -> RadialFunction + Send + Sync + 'static,
    ) -> Self {
        ShapeEnsemble {
            name: name.into(),
            sampler: Arc::new(sampler),
            samples,
            seed,
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> RadialFunction {
        (self.sampler)(rng)
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    /// Mixed moving maxima with random radial shapes.
    M3r(ShapeEnsemble),
    /// Moving maxima with one radially non-increasing shape f.
    M2r(RadialFunction),
    /// Mixed moving maxima of normalized ball indicators with random radius R.
    M3b(Distribution1D),
    /// Mixed Poisson storms with intensity mixing law F.
    Mps(Distribution1D),
    BrownResnick(Variogram),
    VarianceMixedBr {
        variogram: Variogram,
        mixing: Distribution1D,
    },
    ExtremalGaussian(Correlation),
    ExtremalBinaryGaussian(Correlation),
    Parametric(Parametric),
    /// φ(t) = ∫ erfc(st) dG(s).
    ErfcMixture(Distribution1D),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelClass {
    M3r,
    M2r,
    M3b,
    Mps,
    Br,
    Vbr,
    Eg,
    Ebg,
    Parametric,
    ErfcMixture,
}

impl ModelClass {
    pub fn name(self) -> &'static str {
        match self {
            ModelClass::M3r => "M3r",
            ModelClass::M2r => "M2r",
            ModelClass::M3b => "M3b",
            ModelClass::Mps => "MPS",
            ModelClass::Br => "BR",
            ModelClass::Vbr => "VBR",
            ModelClass::Eg => "EG",
            ModelClass::Ebg => "EBG",
            ModelClass::Parametric => "Parametric",
            ModelClass::ErfcMixture => "ErfcMixture",
        }
    }
}

impl fmt::Display for ModelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated max-stable model on R^d together with the quadrature
/// tolerance used to evaluate its TCF.
#[derive(Debug, Clone)]
pub struct TcfModel {
    dim: usize,
    kind: ModelKind,
    tol: f64,
}

/// Probability that the first coordinate of a uniform point on the unit
/// sphere in R^d is at least c ∈ [0, 1].
fn cap_probability(c: f64, d: usize) -> f64 {
    if c >= 1.0 {
        return 0.0;
    }
    match d {
        1 => 0.5,
        2 => c.acos() / std::f64::consts::PI,
        _ => 0.5 * h_d(c, d - 2),
    }
}

fn settle(r: numerics::Result<Estimate>) -> Result<Estimate> {
    Ok(r?)
}

/// ∫_{R^d} f(|z|) ∧ f(|z - t|) dz for a radially non-increasing f.
///
/// The minimum is f(|z|) on the half-space {z·e ≥ t/2}, so the overlap is
/// twice the f-mass of that half-space, reduced to a radial integral.
pub fn radial_overlap(f: &RadialFunction, d: usize, t: f64, tol: f64) -> Result<Estimate> {
    let area = sphere_area(d);
    let lo = 0.5 * t.abs();
    let hi = f.support_bound().unwrap_or(f64::INFINITY);
    if lo >= hi {
        return Ok(Estimate::exact(0.0));
    }
    let bps: Vec<f64> = f.kinks().iter().copied().filter(|&k| k > lo && k < hi).collect();
    let mut q = Quadrature::new(tol).rel_tol(tol).breakpoints(&bps);
    if lo > 0.0 && d == 2 {
        q = q.left(Endpoint::Singular(0.5));
    }
    let est = q.integrate(
        |rho| {
            if rho <= 0.0 {
                return 0.0;
            }
            let c = if lo > 0.0 { lo / rho } else { 0.0 };
            2.0 * f.eval(rho) * area * rho.powi(d as i32 - 1) * cap_probability(c, d)
        },
        lo,
        hi,
    )?;
    Ok(est)
}

/// ∫_{R^d} f(|z|) dz.
pub fn radial_mass(f: &RadialFunction, d: usize, tol: f64) -> Result<Estimate> {
    radial_overlap(f, d, 0.0, tol)
}

fn check_mixing(law: &Distribution1D, what: &str) -> Result<()> {
    let (lo, _) = law.support();
    if lo < 0.0 {
        return Err(Error::InvalidModel(format!("{what} must live on (0, ∞)")));
    }
    if law.cdf(0.0) > 1e-12 {
        return Err(Error::InvalidModel(format!("{what} has mass {} at 0", law.cdf(0.0))));
    }
    Ok(())
}

fn shape_checks(f: &RadialFunction, d: usize, tol: f64) -> Result<()> {
    let mut prev = f64::INFINITY;
    for i in 0..=400 {
        let t = 1e-3 * 10f64.powf(5.0 * i as f64 / 400.0);
        let v = f.eval(t);
        if !(v >= 0.0) {
            return Err(Error::InvalidModel(format!("shape '{}' is negative at {t}", f.name())));
        }
        if v > prev * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::InvalidModel(format!("shape '{}' increases near {t}", f.name())));
        }
        prev = v;
    }
    let mass = radial_mass(f, d, tol.min(1e-9))?;
    if (mass.value - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidModel(format!(
            "shape '{}' has total mass {} on R^{d}, expected 1",
            f.name(),
            mass.value
        )));
    }
    Ok(())
}

impl TcfModel {
    pub const DEFAULT_TOL: f64 = 1e-10;

    /// Validates the class-specific invariants.
    pub fn new(dim: usize, kind: ModelKind) -> Result<Self> {
        Self::with_tolerance(dim, kind, Self::DEFAULT_TOL)
    }

    pub fn with_tolerance(dim: usize, kind: ModelKind, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(crate::error::domain("dim", 0.0, "{1, 2, ...}"));
        }
        if !(tol > 0.0) {
            return Err(crate::error::domain("tol", tol, "(0, ∞)"));
        }
        match &kind {
            ModelKind::M3r(e) => {
                if e.samples == 0 {
                    return Err(Error::InvalidModel("shape ensemble needs samples".into()));
                }
            }
            ModelKind::M2r(f) => shape_checks(f, dim, tol)?,
            ModelKind::M3b(r) => check_mixing(r, "radius law")?,
            ModelKind::Mps(f) => check_mixing(f, "storm intensity law")?,
            ModelKind::BrownResnick(v) => v.validate()?,
            ModelKind::VarianceMixedBr { variogram, mixing } => {
                variogram.validate()?;
                check_mixing(mixing, "variance mixing law")?;
            }
            ModelKind::ExtremalGaussian(c) | ModelKind::ExtremalBinaryGaussian(c) => c.validate()?,
            ModelKind::Parametric(p) => p.require_tcf(dim)?,
            ModelKind::ErfcMixture(g) => check_mixing(g, "erfc mixing law")?,
        }
        Ok(TcfModel { dim, kind, tol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn class(&self) -> ModelClass {
        match self.kind {
            ModelKind::M3r(_) => ModelClass::M3r,
            ModelKind::M2r(_) => ModelClass::M2r,
            ModelKind::M3b(_) => ModelClass::M3b,
            ModelKind::Mps(_) => ModelClass::Mps,
            ModelKind::BrownResnick(_) => ModelClass::Br,
            ModelKind::VarianceMixedBr { .. } => ModelClass::Vbr,
            ModelKind::ExtremalGaussian(_) => ModelClass::Eg,
            ModelKind::ExtremalBinaryGaussian(_) => ModelClass::Ebg,
            ModelKind::Parametric(_) => ModelClass::Parametric,
            ModelKind::ErfcMixture(_) => ModelClass::ErfcMixture,
        }
    }

    /// χ(t) with an absolute error estimate; t is the lag length.
    pub fn tcf(&self, t: f64) -> Result<Estimate> {
        if !(t >= 0.0) {
            return Err(crate::error::domain("t", t, "[0, ∞)"));
        }
        let d = self.dim;
        let tol = self.tol;
        let est = match &self.kind {
            ModelKind::M3r(ens) => {
                let mut rng = ChaCha8Rng::seed_from_u64(ens.seed);
                let mut sum = 0.0;
                let mut sum2 = 0.0;
                let mut qerr = 0.0f64;
                for _ in 0..ens.samples {
                    let f = ens.sample(&mut rng);
                    let e = radial_overlap(&f, d, t, tol)?;
                    sum += e.value;
                    sum2 += e.value * e.value;
                    qerr = qerr.max(e.abs_error);
                }
                let n = ens.samples as f64;
                let mean = sum / n;
                let var = if n > 1.0 {
                    ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0)
                } else {
                    0.0
                };
                Estimate::new(mean, (var / n).sqrt() + qerr)
            }
            ModelKind::M2r(f) => radial_overlap(f, d, t, tol)?,
            ModelKind::M3b(r) => {
                if t == 0.0 {
                    Estimate::exact(1.0)
                } else {
                    r.expect_with(|x| h_d(t / (2.0 * x), d), &[0.5 * t], tol)?
                }
            }
            ModelKind::Mps(_) if t == 0.0 => Estimate::exact(1.0),
            ModelKind::Mps(f) => {
                let slope = projected_tent_slope(d) * t;
                let e = settle(f.expect(|x| (-slope * x).exp(), tol).map_err(|e| match e {
                    Error::Numerics(n) => n,
                    other => NumericsError::Invalid(other.to_string()),
                }))?;
                if !e.value.is_finite() {
                    return Err(Error::Numerics(NumericsError::NonFinite { x: t }));
                }
                e
            }
            ModelKind::BrownResnick(v) => Estimate::exact(numerics::erfc((v.eval(t) / 8.0).sqrt())),
            ModelKind::VarianceMixedBr { variogram, mixing } => {
                erfc_scale_mixture(mixing, (variogram.eval(t) / 8.0).sqrt(), tol)?
            }
            ModelKind::ExtremalGaussian(c) => Estimate::exact(1.0 - ((1.0 - c.eval(t)) / 2.0).max(0.0).sqrt()),
            ModelKind::ExtremalBinaryGaussian(c) => {
                Estimate::exact(c.eval(t).clamp(-1.0, 1.0).asin() / std::f64::consts::PI + 0.5)
            }
            ModelKind::Parametric(p) => Estimate::exact(p.eval(t)),
            ModelKind::ErfcMixture(g) => erfc_scale_mixture(g, t, tol)?,
        };
        Ok(Estimate::new(est.value.clamp(0.0, 1.0), est.abs_error))
    }

    /// The TCF as a radial function. Evaluation failures surface as NaN.
    pub fn as_radial(&self) -> RadialFunction {
        let name = format!("chi[{}]", self.class());
        match &self.kind {
            ModelKind::Parametric(p) => return p.radial(),
            ModelKind::BrownResnick(Variogram::Fbm { scale, alpha }) => {
                let (c, a) = (*scale / 8.0, *alpha);
                let m = self.clone();
                return RadialFunction::new(name, move |t| m.tcf(t).map_or(f64::NAN, |e| e.value))
                    .with_jet(move |s| s.powf(a).scale(c).sqrt().erfc());
            }
            _ => {}
        }
        let m = self.clone();
        let out = RadialFunction::new(name, move |t| m.tcf(t).map_or(f64::NAN, |e| e.value));
        match &self.kind {
            ModelKind::M2r(f) => match f.support_bound() {
                Some(b) => out.with_support_bound(2.0 * b),
                None => out,
            },
            ModelKind::M3b(r) if r.support().1.is_finite() => out.with_support_bound(2.0 * r.support().1),
            _ => out,
        }
    }
}
