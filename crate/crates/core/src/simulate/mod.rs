//! Max-stable fields on regular grids with standard Fréchet margins, and the
//! extremal-coefficient estimator of χ.
//!
//! Two methods are available. [`Method::ExactExtremal`] draws the extremal
//! functions one site at a time from the Palm laws of the spectral process,
//! which is exact for every supported class. [`Method::Spectral`] takes the
//! maximum over Poisson points U_n = 1/Γ_n in decreasing order; it stops
//! exactly once U_n · sup V drops below the field minimum, and otherwise
//! truncates at `poisson_points_max` and flags the field.
//!
//! Grid sites occupy the first one or two coordinates of ℝ^d. Realization `i`
//! draws from a ChaCha8 stream `i` keyed by the seed, so fields do not depend
//! on the order in which they are generated.

mod estimate;
mod io;
mod sampler;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::tcf_models::TcfModel;

pub use estimate::{estimate_chi, ChiAccumulator, ChiEstimate, ChiReport, PairSelection};
pub use io::{read_binary, read_csv, write_binary, write_csv};

use sampler::Sampler;

/// Upper limit on the number of grid sites.
pub const MAX_SITES: usize = 2000;

/// A regular grid in one or two dimensions; the first axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
}

impl GridGeometry {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let dim = shape.len();
        if !(dim == 1 || dim == 2) || origin.len() != dim || spacing.len() != dim {
            return Err(Error::InvalidModel(format!(
                "grid needs 1 or 2 axes with matching origin/spacing/shape, got {}/{}/{}",
                origin.len(),
                spacing.len(),
                dim
            )));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidModel(format!(
                "grid spacing {spacing:?} must be positive"
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidModel(format!("grid origin {origin:?} is not finite")));
        }
        let n: usize = shape.iter().product();
        if n == 0 || n > MAX_SITES {
            return Err(Error::InvalidModel(format!(
                "grid has {n} sites; allowed 1..={MAX_SITES}"
            )));
        }
        Ok(GridGeometry { origin, spacing, shape })
    }

    /// `n` sites from 0 with step `spacing`.
    pub fn line(n: usize, spacing: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![spacing], vec![n])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of site `k`.
    pub fn site(&self, k: usize) -> Vec<f64> {
        let i0 = k % self.shape[0];
        let mut c = vec![self.origin[0] + i0 as f64 * self.spacing[0]];
        if self.dim() == 2 {
            c.push(self.origin[1] + (k / self.shape[0]) as f64 * self.spacing[1]);
        }
        c
    }

    /// Site coordinates padded with zeros to ℝ^d.
    fn embedded_sites(&self, d: usize) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|k| {
                let mut c = self.site(k);
                c.resize(d, 0.0);
                c
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Margins {
    Frechet,
    Gumbel,
}

impl Margins {
    pub fn name(self) -> &'static str {
        match self {
            Margins::Frechet => "frechet",
            Margins::Gumbel => "gumbel",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "frechet" | "fréchet" => Some(Margins::Frechet),
            "gumbel" => Some(Margins::Gumbel),
            _ => None,
        }
    }
}

/// One realization on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
    pub margins: Margins,
    /// Index of the realization within its run.
    pub index: u64,
    pub seed: u64,
    /// Set when the spectral maximum was cut off at `poisson_points_max`.
    pub truncated: bool,
}

impl GridField {
    pub fn new(geometry: GridGeometry, values: Vec<f64>, margins: Margins) -> Result<Self> {
        let f = GridField {
            geometry,
            values,
            margins,
            index: 0,
            seed: 0,
            truncated: false,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.geometry.len() {
            return Err(Error::CorruptField(format!(
                "{} values on a grid of {} sites",
                self.values.len(),
                self.geometry.len()
            )));
        }
        if let Some(k) = self.values.iter().position(|v| v.is_nan()) {
            return Err(Error::CorruptField(format!("NaN at site {k}")));
        }
        if self.margins == Margins::Frechet {
            if let Some(k) = self.values.iter().position(|&v| !(v > 0.0)) {
                return Err(Error::CorruptField(format!(
                    "Fréchet value {} at site {k} is not positive",
                    self.values[k]
                )));
            }
        }
        Ok(())
    }
}

/// Gumbel = ln(Fréchet) and back.
pub fn transform_margins(field: &GridField, to: Margins) -> Result<GridField> {
    field.validate()?;
    let mut out = field.clone();
    match (field.margins, to) {
        (a, b) if a == b => {}
        (Margins::Frechet, Margins::Gumbel) => out.values.iter_mut().for_each(|v| *v = v.ln()),
        _ => out.values.iter_mut().for_each(|v| *v = v.exp()),
    }
    out.margins = to;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactExtremal,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub poisson_points_max: usize,
    pub stop_when_dominated: bool,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            poisson_points_max: 10_000,
            stop_when_dominated: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub model: TcfModel,
    pub grid: GridGeometry,
    pub n_realizations: usize,
    pub seed: u64,
    /// Extension of the storm-center window beyond the grid's bounding box;
    /// `None` uses the 0.999 quantile of the storm reach.
    pub window_pad: Option<f64>,
    pub truncation: Truncation,
    pub method: Method,
}

impl SimConfig {
    pub fn new(model: TcfModel, grid: GridGeometry, n_realizations: usize, seed: u64) -> Self {
        SimConfig {
            model,
            grid,
            n_realizations,
            seed,
            window_pad: None,
            truncation: Truncation::default(),
            method: Method::ExactExtremal,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_window_pad(mut self, pad: f64) -> Self {
        self.window_pad = Some(pad);
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }
}

/// Stream of realizations; see [`simulate`].
#[derive(Debug)]
pub struct Simulation {
    sampler: Sampler,
    grid: GridGeometry,
    seed: u64,
    n: usize,
    next: usize,
    method: Method,
    truncation: Truncation,
    window: (Vec<f64>, Vec<f64>),
    bound: Option<f64>,
}

/// Prepares the model on the grid; realizations are generated lazily.
pub fn simulate(config: &SimConfig) -> Result<Simulation> {
    if config.n_realizations == 0 {
        return Err(crate::error::domain("n_realizations", 0.0, "{1, 2, ...}"));
    }
    let d = config.model.dim();
    if config.grid.dim() > d {
        return Err(Error::InvalidModel(format!(
            "a {}-D grid does not fit in a model on R^{d}",
            config.grid.dim()
        )));
    }
    if let Some(p) = config.window_pad {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(crate::error::domain("window_pad", p, "[0, ∞)"));
        }
    }
    let sampler = Sampler::new(&config.model, config.grid.embedded_sites(d))?;
    let pad = config.window_pad.unwrap_or_else(|| sampler.default_pad());
    let mut lo = vec![-pad; d];
    let mut hi = vec![pad; d];
    let g = &config.grid;
    for a in 0..g.dim() {
        lo[a] += g.origin[a];
        hi[a] += g.origin[a] + (g.shape[a] - 1) as f64 * g.spacing[a];
    }
    Ok(Simulation {
        bound: sampler.spectral_bound(),
        sampler,
        grid: config.grid.clone(),
        seed: config.seed,
        n: config.n_realizations,
        next: 0,
        method: config.method,
        truncation: config.truncation,
        window: (lo, hi),
    })
}

impl Simulation {
    /// Realization `i`, independent of any other.
    pub fn realization(&self, i: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i);
        let (values, truncated) = match self.method {
            Method::ExactExtremal => (self.exact(&mut rng), false),
            Method::Spectral => self.spectral(&mut rng),
        };
        GridField {
            geometry: self.grid.clone(),
            values,
            margins: Margins::Frechet,
            index: i,
            seed: self.seed,
            truncated,
        }
    }

    /// Volume of the storm-center window; 1 for classes without storms.
    pub fn window_volume(&self) -> f64 {
        if !self.sampler.uses_window() {
            return 1.0;
        }
        self.window.0.iter().zip(&self.window.1).map(|(a, b)| b - a).product()
    }

    fn exact(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.sampler.len();
        let mut z = vec![0.0; n];
        let mut y = vec![0.0; n];
        for k in 0..n {
            let mut gamma: f64 = rng.sample(Exp1);
            while 1.0 / gamma > z[k] {
                let zeta = 1.0 / gamma;
                self.sampler.palm(k, rng, &mut y);
                if (0..k).all(|i| zeta * y[i] < z[i]) {
                    for (zi, yi) in z.iter_mut().zip(&y) {
                        *zi = zi.max(zeta * yi);
                    }
                }
                gamma += rng.sample::<f64, _>(Exp1);
            }
        }
        z
    }

    fn spectral(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, bool) {
        let n = self.sampler.len();
        let vol = self.window_volume();
        let mut z = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut gamma = 0.0;
        let mut min = 0.0;
        for _ in 0..self.truncation.poisson_points_max {
            gamma += rng.sample::<f64, _>(Exp1);
            let u = vol / gamma;
            if let (true, Some(b)) = (self.truncation.stop_when_dominated, self.bound) {
                if u * b <= min {
                    return (z, false);
                }
            }
            self.sampler.spectral(&self.window.0, &self.window.1, rng, &mut v);
            for (zi, vi) in z.iter_mut().zip(&v) {
                *zi = zi.max(u * vi);
            }
            min = z.iter().copied().fold(f64::INFINITY, f64::min);
        }
        (z, true)
    }
}

impl Iterator for Simulation {
    type Item = GridField;

    fn next(&mut self) -> Option<GridField> {
        if self.next >= self.n {
            return None;
        }
        let f = self.realization(self.next as u64);
        self.next += 1;
        Some(f)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.n - self.next;
        (r, Some(r))
    }
}

impl ExactSizeIterator for Simulation {}
