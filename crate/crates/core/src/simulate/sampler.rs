//! Per-class spectral functions and their Palm versions on a fixed set of sites.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{sphere_area, unit_ball_volume, Quadrature};
use crate::tcf_models::{Distribution1D, ModelKind, RadialFunction, TcfModel, Variogram};

/// Factor L with L Lᵀ = C. Falls back to an eigen factor for semidefinite C;
/// a clearly negative eigenvalue is an error.
fn factor(c: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if c.nrows() == 0 {
        return Ok(c);
    }
    if let Some(ch) = c.clone().cholesky() {
        return Ok(ch.l());
    }
    let scale = c.diagonal().amax().max(f64::MIN_POSITIVE);
    let eig = SymmetricEigen::new(c);
    let min = eig.eigenvalues.min();
    if min < -1e-10 * scale {
        return Err(Error::Precondition(format!(
            "{what} covariance is not positive semidefinite: minimum eigenvalue {min:e}"
        )));
    }
    let sqrt = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&sqrt))
}

fn gaussian(l: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let g = DVector::from_fn(l.ncols(), |_, _| StandardNormal.sample(rng));
    l * g
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn direction(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    Exp1.sample(rng)
}

/// Inverse cdf of |U| where U has density f(|u|) on ℝ^d, tabulated on a
/// log grid with a power-law first cell.
#[derive(Debug, Clone)]
pub(crate) struct RadialTable {
    radii: Vec<f64>,
    cum: Vec<f64>,
    head_exponent: f64,
}

impl RadialTable {
    const PER_DECADE: usize = 48;

    pub(crate) fn new(f: &RadialFunction, d: usize) -> Result<Self> {
        let area = sphere_area(d);
        let bound = f.support_bound();
        let scale = bound.unwrap_or(1.0);
        let q = 10f64.powf(1.0 / Self::PER_DECADE as f64);
        let mass = |a: f64, b: f64| -> Result<f64> {
            let bps: Vec<f64> = f.kinks().iter().copied().filter(|&k| k > a && k < b).collect();
            let e = Quadrature::new(1e-14).rel_tol(1e-10).breakpoints(&bps).integrate(
                |r| area * r.powi(d as i32 - 1) * f.eval(r),
                a,
                b,
            )?;
            Ok(e.value)
        };
        let mut radii = vec![1e-10 * scale];
        let mut cells = Vec::new();
        loop {
            let a = *radii.last().expect("non-empty");
            let mut b = a * q;
            let last = match bound {
                Some(s) if b >= s => {
                    b = s;
                    true
                }
                _ => false,
            };
            cells.push(mass(a, b)?);
            radii.push(b);
            if last || b > 1e8 * scale {
                break;
            }
            let recent: f64 = cells.iter().rev().take(Self::PER_DECADE).sum();
            if b > 10.0 * scale && recent < 1e-14 {
                break;
            }
        }
        if cells.len() < 2 || !(cells[0] > 0.0) || !(cells[1] > 0.0) {
            return Err(Error::InvalidModel(format!(
                "shape '{}' has no mass near the origin",
                f.name()
            )));
        }
        let head_exponent = (cells[1] / cells[0]).ln() / q.ln();
        if !(head_exponent > 0.0) {
            return Err(Error::InvalidModel(format!(
                "shape '{}' is not integrable at the origin",
                f.name()
            )));
        }
        let head = cells[0] / (q.powf(head_exponent) - 1.0);
        let mut cum = Vec::with_capacity(radii.len());
        let mut acc = head;
        cum.push(acc);
        for c in &cells {
            acc += c;
            cum.push(acc);
        }
        for c in cum.iter_mut() {
            *c /= acc;
        }
        Ok(RadialTable {
            radii,
            cum,
            head_exponent,
        })
    }

    pub(crate) fn quantile(&self, p: f64) -> f64 {
        let p0 = self.cum[0];
        if p <= p0 {
            return self.radii[0] * (p / p0).powf(1.0 / self.head_exponent);
        }
        let i = self.cum.partition_point(|&c| c < p).min(self.cum.len() - 1);
        let (c0, c1) = (self.cum[i - 1], self.cum[i]);
        let w = if c1 > c0 { (p - c0) / (c1 - c0) } else { 0.0 };
        (self.radii[i - 1].ln() * (1.0 - w) + self.radii[i].ln() * w).exp()
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// W anchored at site 0; `factor` acts on sites 1.., `gamma` holds
    /// γ(s_i - s_j) and `sigma2` holds γ(s_i - s_0).
    BrownResnick {
        factor: DMatrix<f64>,
        gamma: DMatrix<f64>,
        sigma2: Vec<f64>,
        mixing: Option<Distribution1D>,
    },
    Gaussian {
        factor: DMatrix<f64>,
        rho: DMatrix<f64>,
        binary: bool,
    },
    Ball(Distribution1D),
    Shape(RadialFunction, RadialTable),
    Interval(Distribution1D),
}

/// A model prepared for repeated draws on fixed sites.
#[derive(Debug, Clone)]
pub(crate) struct Sampler {
    sites: Vec<Vec<f64>>,
    dim: usize,
    kind: Kind,
}

impl Sampler {
    pub(crate) fn new(model: &TcfModel, sites: Vec<Vec<f64>>) -> Result<Self> {
        let dim = model.dim();
        let n = sites.len();
        let pair = |i: usize, j: usize| distance(&sites[i], &sites[j]);
        let kind = match model.kind() {
            ModelKind::BrownResnick(v) => br_kind(v, None, &sites)?,
            ModelKind::VarianceMixedBr { variogram, mixing } => br_kind(variogram, Some(mixing.clone()), &sites)?,
            ModelKind::ExtremalGaussian(c) | ModelKind::ExtremalBinaryGaussian(c) => {
                let rho = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { c.eval(pair(i, j)) });
                Kind::Gaussian {
                    factor: factor(rho.clone(), "correlation")?,
                    rho,
                    binary: matches!(model.kind(), ModelKind::ExtremalBinaryGaussian(_)),
                }
            }
            ModelKind::M3b(r) => Kind::Ball(r.clone()),
            ModelKind::M2r(f) => Kind::Shape(f.clone(), RadialTable::new(f, dim)?),
            ModelKind::Mps(law) => {
                if dim != 1 {
                    return Err(Error::Unsupported(format!(
                        "MPS simulation in dimension {dim}; only d = 1 is available"
                    )));
                }
                Kind::Interval(law.clone())
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "simulation of {} processes",
                    match other {
                        ModelKind::M3r(_) => "M3r",
                        ModelKind::Parametric(_) => "parametric",
                        _ => "erfc-mixture",
                    }
                )))
            }
        };
        Ok(Sampler { sites, dim, kind })
    }

    pub(crate) fn len(&self) -> usize {
        self.sites.len()
    }

    /// sup of the spectral function over all storms, when finite.
    pub(crate) fn spectral_bound(&self) -> Option<f64> {
        let b = match &self.kind {
            Kind::Gaussian { binary: true, .. } => 2.0,
            Kind::Gaussian { .. } | Kind::BrownResnick { .. } => return None,
            Kind::Ball(r) => 1.0 / (unit_ball_volume(self.dim) * r.support().0.powi(self.dim as i32)),
            Kind::Shape(f, _) => f.eval(0.0),
            Kind::Interval(law) => law.support().1,
        };
        b.is_finite().then_some(b)
    }

    /// Whether spectral draws place storms in a window.
    pub(crate) fn uses_window(&self) -> bool {
        matches!(self.kind, Kind::Ball(_) | Kind::Shape(..) | Kind::Interval(_))
    }

    /// 0.999 quantile of the storm reach.
    pub(crate) fn default_pad(&self) -> f64 {
        match &self.kind {
            Kind::Ball(r) => r.quantile(0.999),
            Kind::Shape(_, table) => table.quantile(0.999),
            Kind::Interval(law) => 1000f64.ln() / law.quantile(0.001),
            _ => 0.0,
        }
    }

    /// One draw from the Palm law at site `at`; the value there is 1.
    pub(crate) fn palm(&self, at: usize, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let x0 = &self.sites[at];
        match &self.kind {
            Kind::BrownResnick {
                factor, gamma, mixing, ..
            } => {
                let w = self.anchored(factor, rng);
                let s = mixing.as_ref().map_or(1.0, |m| m.sample(rng));
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (s * (w[i] - w[at]) - 0.5 * s * s * gamma[(i, at)]).exp();
                }
            }
            Kind::Gaussian { factor, rho, binary } => {
                let z = gaussian(factor, rng);
                if *binary {
                    let sign = if z[at] < 0.0 { -1.0 } else { 1.0 };
                    for (i, o) in out.iter_mut().enumerate() {
                        *o = if sign * z[i] > 0.0 || i == at { 1.0 } else { 0.0 };
                    }
                } else {
                    let r = (2.0 * exp1(rng)).sqrt();
                    for (i, o) in out.iter_mut().enumerate() {
                        let zc = z[i] + rho[(i, at)] * (r - z[at]);
                        *o = if i == at { 1.0 } else { zc.max(0.0) / r };
                    }
                }
            }
            Kind::Ball(law) => {
                let r = law.sample(rng);
                let u: f64 = rng.random();
                let rad = r * u.powf(1.0 / self.dim as f64);
                let c = self.offset(x0, rad, rng);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = if i == at || distance(&self.sites[i], &c) <= r {
                        1.0
                    } else {
                        0.0
                    };
                }
            }
            Kind::Shape(f, table) => {
                let p: f64 = rng.random();
                let rad = table.quantile(p.max(f64::MIN_POSITIVE));
                let c = self.offset(x0, rad, rng);
                let f0 = f.eval(rad);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = if i == at {
                        1.0
                    } else {
                        f.eval(distance(&self.sites[i], &c)) / f0
                    };
                }
            }
            Kind::Interval(law) => {
                let beta = law.sample(rng);
                let len = (exp1(rng) + exp1(rng)) / beta;
                let u: f64 = rng.random();
                let left = x0[0] - u * len;
                for (i, o) in out.iter_mut().enumerate() {
                    let x = self.sites[i][0] - left;
                    *o = if i == at || (0.0..=len).contains(&x) { 1.0 } else { 0.0 };
                }
            }
        }
    }

    /// One spectral function. Storm centers, where used, are uniform on the
    /// box [lo, hi] in ℝ^d; the caller scales by the box volume.
    pub(crate) fn spectral(&self, lo: &[f64], hi: &[f64], rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let center = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            lo.iter()
                .zip(hi)
                .map(|(a, b)| a + (b - a) * rng.random::<f64>())
                .collect()
        };
        match &self.kind {
            Kind::BrownResnick {
                factor, sigma2, mixing, ..
            } => {
                let w = self.anchored(factor, rng);
                let s = mixing.as_ref().map_or(1.0, |m| m.sample(rng));
                for (i, o) in out.iter_mut().enumerate() {
                    *o = (s * w[i] - 0.5 * s * s * sigma2[i]).exp();
                }
            }
            Kind::Gaussian { factor, binary, .. } => {
                let z = gaussian(factor, rng);
                let c = (2.0 * std::f64::consts::PI).sqrt();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = if *binary {
                        if z[i] > 0.0 {
                            2.0
                        } else {
                            0.0
                        }
                    } else {
                        c * z[i].max(0.0)
                    };
                }
            }
            Kind::Ball(law) => {
                let c = center(rng);
                let r = law.sample(rng);
                let v = 1.0 / (unit_ball_volume(self.dim) * r.powi(self.dim as i32));
                for (i, o) in out.iter_mut().enumerate() {
                    *o = if distance(&self.sites[i], &c) <= r { v } else { 0.0 };
                }
            }
            Kind::Shape(f, _) => {
                let c = center(rng);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = f.eval(distance(&self.sites[i], &c));
                }
            }
            Kind::Interval(law) => {
                let left = center(rng)[0];
                let beta = law.sample(rng);
                let len = exp1(rng) / beta;
                for (i, o) in out.iter_mut().enumerate() {
                    let x = self.sites[i][0] - left;
                    *o = if (0.0..=len).contains(&x) { beta } else { 0.0 };
                }
            }
        }
    }

    fn anchored(&self, factor: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut w = vec![0.0];
        w.extend(gaussian(factor, rng).iter());
        w
    }

    fn offset(&self, x0: &[f64], rad: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        direction(self.dim, rng)
            .iter()
            .zip(x0)
            .map(|(u, x)| x + rad * u)
            .collect()
    }
}

fn br_kind(v: &Variogram, mixing: Option<Distribution1D>, sites: &[Vec<f64>]) -> Result<Kind> {
    let n = sites.len();
    let dist = |i: usize, j: usize| distance(&sites[i], &sites[j]);
    let sigma2: Vec<f64> = (0..n).map(|i| v.eval(dist(i, 0))).collect();
    let cov = DMatrix::from_fn(n.saturating_sub(1), n.saturating_sub(1), |i, j| {
        v.anchored_covariance(dist(i + 1, 0), dist(j + 1, 0), dist(i + 1, j + 1))
    });
    Ok(Kind::BrownResnick {
        factor: factor(cov, "anchored variogram")?,
        gamma: DMatrix::from_fn(n, n, |i, j| v.eval(dist(i, j))),
        sigma2,
        mixing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcf_models::catalog;
    use rand::SeedableRng;

    #[test]
    fn radial_table_matches_erfc_shape_mass() {
        let table = RadialTable::new(&catalog::erfc_sqrt_shape_radial(), 3).unwrap();
        // P(|U| ≤ 1) for the density f(|u|) on ℝ³
        let area = sphere_area(3);
        let m = Quadrature::new(1e-12)
            .left(crate::numerics::Endpoint::Singular(-0.5))
            .integrate(|r| area * r * r * catalog::erfc_sqrt_shape(r), 0.0, 1.0)
            .unwrap()
            .value;
        let q = table.quantile(m);
        assert!((q - 1.0).abs() < 1e-3, "{q}");
    }

    #[test]
    fn semidefinite_factor() {
        let c = DMatrix::from_element(3, 3, 1.0);
        let l = factor(c.clone(), "test").unwrap();
        assert!((&l * l.transpose() - c).amax() < 1e-12);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let err = factor(bad, "test").unwrap_err().to_string();
        assert!(err.contains("minimum eigenvalue"), "{err}");
    }

    #[test]
    fn palm_draws_are_one_at_anchor() {
        let sites: Vec<Vec<f64>> = (0..6).map(|i| vec![0.5 * i as f64, 0.0, 0.0]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut out = vec![0.0; 6];
        for m in [catalog::erfc_sqrt_m2r().unwrap(), catalog::erfc_sqrt_m3b().unwrap()] {
            let s = Sampler::new(&m, sites.clone()).unwrap();
            for at in 0..6 {
                s.palm(at, &mut rng, &mut out);
                assert_eq!(out[at], 1.0);
            }
        }
        let sites1: Vec<Vec<f64>> = sites.iter().map(|s| vec![s[0]]).collect();
        for m in [
            catalog::damped_br(1).unwrap(),
            catalog::damped_eg(1).unwrap(),
            catalog::damped_ebg(1).unwrap(),
        ] {
            let s = Sampler::new(&m, sites1.clone()).unwrap();
            for at in 0..6 {
                s.palm(at, &mut rng, &mut out);
                assert!((out[at] - 1.0).abs() < 1e-15);
            }
        }
    }
}
