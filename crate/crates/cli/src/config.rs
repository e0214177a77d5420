//! TOML model documents.
//!
//! ```toml
//! class = "BR"
//! dim = 1
//!
//! [variogram]
//! type = "fbm"
//! scale = 8.0
//! alpha = 1.0
//! ```
//!
//! Unknown keys are rejected, and so are blocks the class does not use.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use tcf::operators::{TransformMap, TransformSpec};
use tcf::tcf_models::{
    catalog, erfc_mixture, Correlation, Distribution1D, Family, ModelKind, Parametric, RadialFunction, TcfModel,
    Variogram,
};

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
pub enum ClassName {
    #[serde(alias = "m2r")]
    M2r,
    #[serde(alias = "m3b")]
    M3b,
    #[serde(rename = "MPS", alias = "mps")]
    Mps,
    #[serde(rename = "BR", alias = "br")]
    Br,
    #[serde(rename = "VBR", alias = "vbr")]
    Vbr,
    #[serde(rename = "EG", alias = "eg")]
    Eg,
    #[serde(rename = "EBG", alias = "ebg")]
    Ebg,
    #[serde(rename = "parametric")]
    Parametric,
    #[serde(rename = "erfc_mixture")]
    ErfcMixture,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfigDoc {
    pub class: ClassName,
    pub dim: usize,
    pub tol: Option<f64>,
    pub variogram: Option<VariogramDoc>,
    pub correlation: Option<CorrelationDoc>,
    pub mixing: Option<LawDoc>,
    pub shape: Option<ShapeDoc>,
    pub family: Option<FamilyDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum VariogramDoc {
    Fbm { scale: f64, alpha: f64 },
    Bounded { lambda: f64, correlation: CorrelationDoc },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CorrelationDoc {
    Exponential {
        scale: f64,
    },
    /// A(base) for a correlation transform A ∈ {R, S, T}.
    Transformed {
        map: String,
        #[serde(default)]
        lambda: f64,
        #[serde(default)]
        alpha: f64,
        base: Box<CorrelationDoc>,
    },
    Family(FamilyDoc),
    Tabulated {
        t: Vec<f64>,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub name: String,
    pub nu: f64,
    pub beta: Option<f64>,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawDoc {
    Point {
        value: f64,
    },
    Exponential {
        rate: f64,
    },
    Discrete {
        atoms: Vec<[f64; 2]>,
    },
    /// Piecewise-linear cdf through (x_i, cdf_i).
    Tabulated {
        x: Vec<f64>,
        cdf: Vec<f64>,
    },
    ErfcSqrtRadius,
    ErfcSqrtMps,
    /// Mixing law of an erfc-mixture catalog row.
    ErfcMixtureRow {
        row: u8,
        param: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDoc {
    ErfcSqrt,
    /// Piecewise-linear f through (t_i, f_i), zero beyond the last point.
    Tabulated {
        t: Vec<f64>,
        f: Vec<f64>,
    },
}

fn interpolate(xs: Vec<f64>, ys: Vec<f64>, what: &str) -> Result<impl Fn(f64) -> f64 + Send + Sync + 'static> {
    if xs.len() != ys.len() || xs.len() < 2 {
        bail!(
            "{what}: need at least two points and equal lengths, got {} and {}",
            xs.len(),
            ys.len()
        );
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("{what}: abscissae must increase strictly");
    }
    Ok(move |x: f64| {
        if x <= xs[0] {
            return ys[0];
        }
        let i = xs.partition_point(|&v| v < x);
        if i >= xs.len() {
            return f64::NAN;
        }
        let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        ys[i - 1] * (1.0 - w) + ys[i] * w
    })
}

fn family(doc: &FamilyDoc) -> Result<Parametric> {
    let fam = Family::from_name(&doc.name).ok_or_else(|| {
        anyhow!(
            "family.name: unknown family '{}' (expected one of {})",
            doc.name,
            Family::ALL.map(|f| f.name()).join(", ")
        )
    })?;
    let mut p = Parametric::new(fam, doc.nu);
    if let Some(b) = doc.beta {
        p = p.with_beta(b);
    }
    if let Some(s) = doc.scale {
        p = p.with_scale(s);
    }
    p.validate().context("family")?;
    Ok(p)
}

fn correlation(doc: &CorrelationDoc) -> Result<Correlation> {
    Ok(match doc {
        CorrelationDoc::Exponential { scale } => Correlation::Exponential { scale: *scale },
        CorrelationDoc::Transformed {
            map,
            lambda,
            alpha,
            base,
        } => {
            let m = TransformMap::from_name(map).ok_or_else(|| anyhow!("correlation.map: unknown map '{map}'"))?;
            let spec = TransformSpec::new(m, *lambda, *alpha).context("correlation")?;
            let inner = correlation(base)?;
            Correlation::User(RadialFunction::new(
                format!("{map}({})", inner.as_radial().name()),
                move |t| spec.apply(inner.eval(t)),
            ))
        }
        CorrelationDoc::Family(f) => Correlation::User(family(f)?.radial()),
        CorrelationDoc::Tabulated { t, values } => {
            let last = *t.last().unwrap_or(&0.0);
            let g = interpolate(t.clone(), values.clone(), "correlation")?;
            Correlation::User(RadialFunction::new("tabulated correlation", move |x| {
                if x > last {
                    0.0
                } else {
                    g(x)
                }
            }))
        }
    })
}

fn variogram(doc: &VariogramDoc) -> Result<Variogram> {
    Ok(match doc {
        VariogramDoc::Fbm { scale, alpha } => Variogram::Fbm {
            scale: *scale,
            alpha: *alpha,
        },
        VariogramDoc::Bounded { lambda, correlation: c } => Variogram::Bounded {
            lambda: *lambda,
            correlation: correlation(c)?,
        },
    })
}

fn law(doc: &LawDoc) -> Result<Distribution1D> {
    Ok(match doc {
        LawDoc::Point { value } => Distribution1D::point_mass(*value)?,
        LawDoc::Exponential { rate } => Distribution1D::exponential(*rate)?,
        LawDoc::Discrete { atoms } => {
            let a: Vec<(f64, f64)> = atoms.iter().map(|p| (p[0], p[1])).collect();
            Distribution1D::discrete("discrete", &a)?
        }
        LawDoc::Tabulated { x, cdf } => {
            if cdf.first() != Some(&0.0) || cdf.last() != Some(&1.0) || cdf.windows(2).any(|w| w[1] < w[0]) {
                bail!("mixing.cdf must rise from 0 to 1");
            }
            let g = interpolate(x.clone(), cdf.clone(), "mixing")?;
            let (lo, hi) = (x[0], x[x.len() - 1]);
            Distribution1D::continuous("tabulated", move |v| if v >= hi { 1.0 } else { g(v) }, (lo, hi))?
        }
        LawDoc::ErfcSqrtRadius => catalog::erfc_sqrt_radius_law(),
        LawDoc::ErfcSqrtMps => catalog::erfc_sqrt_mps_law(),
        LawDoc::ErfcMixtureRow { row, param } => erfc_mixture(*row, *param)?.mixing,
    })
}

fn shape(doc: &ShapeDoc) -> Result<RadialFunction> {
    Ok(match doc {
        ShapeDoc::ErfcSqrt => catalog::erfc_sqrt_shape_radial(),
        ShapeDoc::Tabulated { t, f } => {
            let last = *t.last().unwrap_or(&0.0);
            let g = interpolate(t.clone(), f.clone(), "shape")?;
            RadialFunction::new("tabulated shape", move |x| if x > last { 0.0 } else { g(x) })
                .with_kinks(&t[1..t.len() - 1])
                .with_support_bound(last)
        }
    })
}

impl ModelConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("{e}"))
    }

    pub fn build(&self) -> Result<TcfModel> {
        let used: &[&str] = match self.class {
            ClassName::M2r => &["shape"],
            ClassName::M3b | ClassName::Mps | ClassName::ErfcMixture => &["mixing"],
            ClassName::Br => &["variogram"],
            ClassName::Vbr => &["variogram", "mixing"],
            ClassName::Eg | ClassName::Ebg => &["correlation"],
            ClassName::Parametric => &["family"],
        };
        let present = [
            ("variogram", self.variogram.is_some()),
            ("correlation", self.correlation.is_some()),
            ("mixing", self.mixing.is_some()),
            ("shape", self.shape.is_some()),
            ("family", self.family.is_some()),
        ];
        for (name, is) in present {
            if is && !used.contains(&name) {
                bail!("[{name}] is not used by class {:?}", self.class);
            }
            if !is && used.contains(&name) {
                bail!("class {:?} needs a [{name}] block", self.class);
            }
        }
        let kind = match self.class {
            ClassName::M2r => ModelKind::M2r(shape(self.shape.as_ref().expect("checked"))?),
            ClassName::M3b => ModelKind::M3b(law(self.mixing.as_ref().expect("checked")).context("mixing")?),
            ClassName::Mps => ModelKind::Mps(law(self.mixing.as_ref().expect("checked")).context("mixing")?),
            ClassName::ErfcMixture => {
                ModelKind::ErfcMixture(law(self.mixing.as_ref().expect("checked")).context("mixing")?)
            }
            ClassName::Br => ModelKind::BrownResnick(variogram(self.variogram.as_ref().expect("checked"))?),
            ClassName::Vbr => ModelKind::VarianceMixedBr {
                variogram: variogram(self.variogram.as_ref().expect("checked"))?,
                mixing: law(self.mixing.as_ref().expect("checked")).context("mixing")?,
            },
            ClassName::Eg => ModelKind::ExtremalGaussian(correlation(self.correlation.as_ref().expect("checked"))?),
            ClassName::Ebg => {
                ModelKind::ExtremalBinaryGaussian(correlation(self.correlation.as_ref().expect("checked"))?)
            }
            ClassName::Parametric => ModelKind::Parametric(family(self.family.as_ref().expect("checked"))?),
        };
        let model = match self.tol {
            Some(t) => TcfModel::with_tolerance(self.dim, kind, t),
            None => TcfModel::new(self.dim, kind),
        };
        model.map_err(|e| anyhow!("{e}"))
    }
}

/// Reads and validates a model document; returns the model and the raw text.
pub fn load_model(path: &Path) -> Result<(TcfModel, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = ModelConfigDoc::parse(&text).with_context(|| format!("in {}", path.display()))?;
    let model = doc.build().with_context(|| format!("in {}", path.display()))?;
    Ok((model, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brown_resnick_document() {
        let m =
            ModelConfigDoc::parse("class = \"BR\"\ndim = 1\n[variogram]\ntype = \"fbm\"\nscale = 8.0\nalpha = 1.0\n")
                .unwrap()
                .build()
                .unwrap();
        assert!((m.tcf(1.0).unwrap().value - tcf::numerics::erfc(1.0)).abs() < 1e-15);
    }

    #[test]
    fn transformed_correlation_matches_catalog() {
        let text = r#"
class = "EBG"
dim = 1
[correlation]
type = "transformed"
map = "T"
lambda = 1.62
base = { type = "exponential", scale = 1.0 }
"#;
        let m = ModelConfigDoc::parse(text).unwrap().build().unwrap();
        for t in [0.1, 1.0, 3.0] {
            assert!((m.tcf(t).unwrap().value - catalog::damped_tcf(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn strict_keys() {
        let err =
            ModelConfigDoc::parse("class = \"BR\"\ndim = 1\n[variogram]\ntype = \"fbm\"\nscale = 8.0\nalpah = 1.0\n")
                .unwrap_err()
                .to_string();
        assert!(err.contains("alpah"), "{err}");
        let err =
            ModelConfigDoc::parse("class = \"EG\"\ndim = 1\n[variogram]\ntype = \"fbm\"\nscale = 1.0\nalpha = 1.0\n")
                .unwrap()
                .build()
                .unwrap_err()
                .to_string();
        assert!(err.contains("variogram"), "{err}");
    }
}
