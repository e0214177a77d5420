//! χ̂ from the extremal coefficient.
//!
//! For a simple max-stable pair, 1/max(X_s, X_t) is exponential with mean
//! 1/θ(t). Per realization the estimator averages b = 1/max(X_s, X_{s+h}) and
//! a = (1/X_s + 1/X_{s+h})/2 (mean 1) over the selected site pairs, and
//! returns θ̂ = Σa / Σb with a delta-method standard error.

use super::{GridField, GridGeometry, Margins};
use crate::error::{Error, Result};

/// Minimum number of realizations for an estimate.
pub const MIN_REALIZATIONS: usize = 100;

/// Which site pairs at lag h enter the estimate; pairs run along the first axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSelection {
    /// Every pair (s, s + h) on the grid.
    All,
    /// Only the pair (origin, origin + h).
    FromOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiEstimate {
    pub requested_lag: f64,
    /// Grid lag actually used.
    pub lag: f64,
    pub chi_hat: f64,
    pub std_err: f64,
    pub n: usize,
    /// Set when 2 - θ̂ fell outside [0, 1] and was clipped.
    pub clipped: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChiReport {
    pub estimates: Vec<ChiEstimate>,
    /// Requested lags that the grid cannot realize, with the reason.
    pub skipped: Vec<(f64, String)>,
}

#[derive(Debug, Clone, Default)]
struct Moments {
    a: f64,
    b: f64,
    aa: f64,
    bb: f64,
    ab: f64,
}

#[derive(Debug, Clone)]
struct LagSlot {
    requested: f64,
    steps: usize,
    m: Moments,
}

/// Streaming estimator over fields sharing one geometry.
#[derive(Debug, Clone)]
pub struct ChiAccumulator {
    geometry: GridGeometry,
    selection: PairSelection,
    slots: Vec<LagSlot>,
    skipped: Vec<(f64, String)>,
    n: usize,
}

impl ChiAccumulator {
    pub fn new(geometry: GridGeometry, lags: &[f64], selection: PairSelection) -> Self {
        let h = geometry.spacing()[0];
        let len = geometry.shape()[0];
        let mut slots = Vec::new();
        let mut skipped = Vec::new();
        for &lag in lags {
            if !(lag >= 0.0 && lag.is_finite()) {
                skipped.push((lag, "lag must be finite and non-negative".to_string()));
                continue;
            }
            let steps = (lag / h).round() as usize;
            if steps >= len {
                skipped.push((
                    lag,
                    format!(
                        "nearest grid lag {} exceeds the grid extent {}",
                        steps as f64 * h,
                        (len - 1) as f64 * h
                    ),
                ));
                continue;
            }
            slots.push(LagSlot {
                requested: lag,
                steps,
                m: Moments::default(),
            });
        }
        ChiAccumulator {
            geometry,
            selection,
            slots,
            skipped,
            n: 0,
        }
    }

    pub fn push(&mut self, field: &GridField) -> Result<()> {
        if field.geometry != self.geometry {
            return Err(Error::Precondition("fields must share one grid".into()));
        }
        if field.margins != Margins::Frechet {
            return Err(Error::Precondition("the estimator needs Fréchet margins".into()));
        }
        field.validate()?;
        let n0 = self.geometry.shape()[0];
        let rows = self.geometry.len() / n0;
        let x = &field.values;
        for slot in &mut self.slots {
            let (mut a, mut b, mut count) = (0.0, 0.0, 0usize);
            let starts = match self.selection {
                PairSelection::All => n0 - slot.steps,
                PairSelection::FromOrigin => 1,
            };
            let rows = match self.selection {
                PairSelection::All => rows,
                PairSelection::FromOrigin => 1,
            };
            for r in 0..rows {
                for s in 0..starts {
                    let (u, v) = (x[r * n0 + s], x[r * n0 + s + slot.steps]);
                    a += 0.5 * (1.0 / u + 1.0 / v);
                    b += 1.0 / u.max(v);
                    count += 1;
                }
            }
            let (a, b) = (a / count as f64, b / count as f64);
            let m = &mut slot.m;
            m.a += a;
            m.b += b;
            m.aa += a * a;
            m.bb += b * b;
            m.ab += a * b;
        }
        self.n += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn finish(&self) -> Result<ChiReport> {
        if self.n < MIN_REALIZATIONS {
            return Err(Error::Precondition(format!(
                "χ̂ needs at least {MIN_REALIZATIONS} realizations, got {}",
                self.n
            )));
        }
        let n = self.n as f64;
        let h = self.geometry.spacing()[0];
        let estimates = self
            .slots
            .iter()
            .map(|slot| {
                let m = &slot.m;
                let theta = m.a / m.b;
                let (ma, mb) = (m.a / n, m.b / n);
                let var_a = (m.aa - n * ma * ma) / (n - 1.0);
                let var_b = (m.bb - n * mb * mb) / (n - 1.0);
                let cov = (m.ab - n * ma * mb) / (n - 1.0);
                let var = (var_a + theta * theta * var_b - 2.0 * theta * cov).max(0.0);
                let raw = 2.0 - theta;
                let chi_hat = raw.clamp(0.0, 1.0);
                ChiEstimate {
                    requested_lag: slot.requested,
                    lag: slot.steps as f64 * h,
                    chi_hat,
                    std_err: (var / n).sqrt() / mb,
                    n: self.n,
                    clipped: chi_hat != raw,
                }
            })
            .collect();
        Ok(ChiReport {
            estimates,
            skipped: self.skipped.clone(),
        })
    }
}

/// χ̂ at each lag from all site pairs of the fields.
pub fn estimate_chi(fields: &[GridField], lags: &[f64]) -> Result<ChiReport> {
    let first = fields
        .first()
        .ok_or_else(|| Error::Precondition(format!("χ̂ needs at least {MIN_REALIZATIONS} realizations, got 0")))?;
    let mut acc = ChiAccumulator::new(first.geometry.clone(), lags, PairSelection::All);
    for f in fields {
        acc.push(f)?;
    }
    acc.finish()
}
