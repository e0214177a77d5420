//! Finite differences with Ridders–Richardson extrapolation.
//!
//! The step `h` handed in (or the default eps^{1/(order+2)}·max(1,|x|)) is the
//! finest step of the tableau; extrapolation starts from h·CON^{NTAB-1} and
//! shrinks geometrically.

use super::{Estimate, NumericsError, Result};

const CON: f64 = 1.4;
const NTAB: usize = 10;
const SAFE: f64 = 2.0;

/// Which side a one-sided difference samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy)]
enum Stencil {
    Central,
    OneSided(Side),
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn default_step(x: f64, order: usize) -> f64 {
    f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) * x.abs().max(1.0)
}

impl Stencil {
    /// Farthest distance from x sampled at step h.
    fn reach(self, order: usize, h: f64) -> f64 {
        match self {
            Stencil::Central => 0.5 * order as f64 * h,
            Stencil::OneSided(_) => order as f64 * h,
        }
    }

    fn apply<F: Fn(f64) -> f64>(self, f: &F, x: f64, order: usize, h: f64) -> f64 {
        let k = order as f64;
        let mut acc = 0.0;
        for j in 0..=order {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let offset = match self {
                Stencil::Central => (0.5 * k - j as f64) * h,
                Stencil::OneSided(Side::Right) => (k - j as f64) * h,
                Stencil::OneSided(Side::Left) => -(j as f64) * h,
            };
            acc += sign * binomial(order, j) * f(x + offset);
        }
        acc / h.powi(order as i32)
    }

    /// Richardson factor per tableau column.
    fn factor(self) -> f64 {
        match self {
            Stencil::Central => CON * CON,
            Stencil::OneSided(_) => CON,
        }
    }
}

fn ridders<F: Fn(f64) -> f64>(f: &F, x: f64, order: usize, h_start: f64, stencil: Stencil) -> Result<Estimate> {
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut hh = h_start;
    a[0][0] = stencil.apply(f, x, order, hh);
    if !a[0][0].is_finite() {
        return Err(NumericsError::NonFinite { x });
    }
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    let step = stencil.factor();
    for i in 1..NTAB {
        hh /= CON;
        a[0][i] = stencil.apply(f, x, order, hh);
        if !a[0][i].is_finite() {
            return Err(NumericsError::NonFinite { x });
        }
        let mut fac = step;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= step;
            let errt = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if errt <= err {
                err = errt;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= SAFE * err {
            break;
        }
    }
    Ok(Estimate::new(best, err))
}

fn check_order(order: usize, max: usize) -> Result<()> {
    if order == 0 || order > max {
        return Err(NumericsError::Invalid(format!(
            "derivative order {order} outside 1..={max}"
        )));
    }
    Ok(())
}

fn finest_step(x: f64, order: usize, h: Option<f64>) -> Result<f64> {
    let h = h.unwrap_or_else(|| default_step(x, order));
    if !(h > 0.0) || !h.is_finite() {
        return Err(NumericsError::Invalid(format!("step {h} must be positive")));
    }
    Ok(h)
}

/// Starting step for a tableau whose finest step is `h`, shrunk so that the
/// stencil stays clear of every kink and of `lower`. Fails when the stencil
/// cannot avoid a kink even at the finest step.
fn start_step(x: f64, order: usize, h: f64, stencil: Stencil, kinks: &[f64], lower: Option<f64>) -> Result<f64> {
    let unit_reach = stencil.reach(order, 1.0);
    let mut start = h * CON.powi(NTAB as i32 - 1);
    for &kink in kinks {
        let on_stencil_side = match stencil {
            Stencil::Central => true,
            Stencil::OneSided(Side::Right) => kink > x,
            Stencil::OneSided(Side::Left) => kink < x,
        };
        let dist = (x - kink).abs();
        if matches!(stencil, Stencil::Central) && dist == 0.0 {
            return Err(NumericsError::NearKink {
                x,
                kink,
                reach: unit_reach * h,
            });
        }
        if !on_stencil_side {
            continue;
        }
        let limit = 0.99 * dist / unit_reach;
        if limit < h {
            return Err(NumericsError::NearKink {
                x,
                kink,
                reach: unit_reach * h,
            });
        }
        start = start.min(limit);
    }
    if let Some(lo) = lower {
        if matches!(stencil, Stencil::Central) || matches!(stencil, Stencil::OneSided(Side::Left)) {
            let limit = 0.99 * (x - lo) / unit_reach;
            start = start.min(limit);
        }
    }
    Ok(start)
}

/// Derivative of order 1..=3 by central differences with Richardson
/// extrapolation. Declared kinks of `f` closer than the stencil reach are
/// refused.
pub fn num_derivative<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: usize,
    h: Option<f64>,
    kinks: &[f64],
) -> Result<Estimate> {
    check_order(order, 3)?;
    let h = finest_step(x, order, h)?;
    let start = start_step(x, order, h, Stencil::Central, kinks, None)?;
    ridders(&f, x, order, start, Stencil::Central)
}

/// First derivative with the default step and no kinks.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64) -> Result<Estimate> {
    num_derivative(f, x, 1, None, &[])
}

/// One-sided derivative of order 1..=3, sampling only x and points on `side`.
/// Kinks on the sampled side must stay outside the stencil; a kink exactly at
/// x is allowed, which is what one-sided limits at a kink need.
pub fn one_sided_derivative<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: usize,
    side: Side,
    h: Option<f64>,
    kinks: &[f64],
) -> Result<Estimate> {
    check_order(order, 3)?;
    let h = finest_step(x, order + 1, h)?;
    let stencil = Stencil::OneSided(side);
    let start = start_step(x, order, h, stencil, kinks, None)?;
    ridders(&f, x, order, start, stencil)
}

/// Derivatives of order 1..=8 for functions defined on [lower, ∞).
///
/// Central differences are used whenever the stencil fits above `lower` at the
/// finest step, otherwise forward differences.
pub fn high_order_derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: usize, lower: Option<f64>) -> Result<Estimate> {
    check_order(order, 8)?;
    if let Some(lo) = lower {
        if x < lo {
            return Err(NumericsError::Domain {
                function: "high_order_derivative",
                value: x,
                domain: "x >= lower",
            });
        }
    }
    let h = default_step(x, order);
    let fits = lower.is_none_or(|lo| x - Stencil::Central.reach(order, h) > lo);
    let stencil = if fits {
        Stencil::Central
    } else {
        Stencil::OneSided(Side::Right)
    };
    let start = start_step(x, order, h, stencil, &[], lower)?;
    ridders(&f, x, order, start, stencil)
}
