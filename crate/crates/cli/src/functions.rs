//! Named radial functions for `check`, `recover`, `transform` and `tb`.
//!
//! A function is named `name[:param]` or `model:<path>`:
//! `erfc_sqrt`, `erfc_power:α`, `exp[:scale]`, `tent`, `damped`,
//! `phi:d`, `chi:d`, `h:d`, any parametric family name with `:ν`
//! (e.g. `truncated_power:1.5`).

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use tcf::operators::chi_d_radial;
use tcf::tcf_models::{
    catalog, erfc_power, erfc_sqrt, exponential, h_d_radial, phi_d_radial, tent, Family, Parametric, RadialFunction,
};

use crate::config::load_model;

/// A resolved function with the bytes that identify it.
pub struct NamedFunction {
    pub function: RadialFunction,
    /// erfc(t^α) when the name picks that family.
    pub erfc_exponent: Option<f64>,
    pub identity: Vec<u8>,
}

fn param(p: Option<&str>, name: &str) -> Result<f64> {
    let p = p.ok_or_else(|| anyhow!("function '{name}' needs a parameter, e.g. {name}:1.5"))?;
    p.parse().map_err(|_| anyhow!("function '{name}': bad parameter '{p}'"))
}

fn dim(p: Option<&str>, name: &str) -> Result<usize> {
    let d = param(p, name)?;
    if d < 1.0 || d.fract() != 0.0 {
        bail!("function '{name}': dimension must be a positive integer, got {d}");
    }
    Ok(d as usize)
}

pub fn resolve(spec: &str) -> Result<NamedFunction> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let mut erfc_exponent = None;
    let mut identity = spec.as_bytes().to_vec();
    let function = match name {
        "erfc_sqrt" => {
            erfc_exponent = Some(0.5);
            erfc_sqrt()
        }
        "erfc_power" => {
            let a = param(arg, name)?;
            if !(a > 0.0) {
                bail!("erfc_power: exponent must be positive");
            }
            erfc_exponent = Some(a);
            erfc_power(a)
        }
        "exp" => exponential(arg.map(|_| param(arg, name)).transpose()?.unwrap_or(1.0)),
        "tent" => tent(),
        "damped" => RadialFunction::new("erfc(0.45 sqrt(1-exp(-t)))", catalog::damped_tcf),
        "phi" => phi_d_radial(dim(arg, name)?),
        "chi" => chi_d_radial(dim(arg, name)?),
        "h" => h_d_radial(dim(arg, name)?),
        "model" => {
            let path = arg.ok_or_else(|| anyhow!("model: needs a path, e.g. model:br.toml"))?;
            let (m, text) = load_model(Path::new(path))?;
            identity = text.into_bytes();
            m.as_radial()
        }
        other => match Family::from_name(other) {
            Some(f) => {
                let p = Parametric::new(f, param(arg, name)?);
                p.validate().with_context(|| format!("function '{spec}'"))?;
                p.radial()
            }
            None => bail!("unknown function '{other}'"),
        },
    };
    Ok(NamedFunction {
        function,
        erfc_exponent,
        identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        assert_eq!(resolve("tent").unwrap().function.eval(0.25), 0.75);
        assert!((resolve("phi:3").unwrap().function.eval(2.0) - 0.25).abs() < 1e-15);
        assert_eq!(resolve("erfc_power:0.3").unwrap().erfc_exponent, Some(0.3));
        assert!(resolve("truncated_power:1.5").is_ok());
        assert!(resolve("phi:2.5").is_err());
        assert!(resolve("nope").is_err());
    }
}
