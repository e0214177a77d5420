//! CSV sinks, the provenance line and lag lists.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn fingerprint(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// `# tcf <version> seed=<seed> fingerprint=<hex>`.
pub fn provenance(seed: u64, identity: &[u8]) -> String {
    format!("# tcf {VERSION} seed={seed} fingerprint={}", fingerprint(identity))
}

/// A file when a path is given, stdout otherwise.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("creating {}", p.display()))?,
            ))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `start:stop:step` (stop included), `log:lo:hi:n`, or `a,b,c`.
pub fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number '{s}' in '{spec}'"))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let out: Vec<f64> = match parts.as_slice() {
        ["log", lo, hi, n] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let n: usize = n.trim().parse().with_context(|| format!("bad count in '{spec}'"))?;
            if !(lo > 0.0 && hi > lo) || n < 2 {
                bail!("'{spec}': need 0 < lo < hi and n ≥ 2");
            }
            (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
        }
        [start, stop, step] => {
            let (a, b, h) = (num(start)?, num(stop)?, num(step)?);
            if !(h > 0.0) || b < a {
                bail!("'{spec}': need step > 0 and stop ≥ start");
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            (0..=n).map(|i| a + i as f64 * h).collect()
        }
        [single] => single.split(',').map(num).collect::<Result<_>>()?,
        _ => bail!("'{spec}': expected start:stop:step, log:lo:hi:n or a comma list"),
    };
    if out.iter().any(|x| !x.is_finite()) {
        bail!("'{spec}': points must be finite");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_lists() {
        assert_eq!(parse_points("0:2:1").unwrap(), vec![0.0, 1.0, 2.0]);
        assert_eq!(parse_points("0:1:0.25").unwrap().len(), 5);
        assert_eq!(parse_points("0.5, 1,3").unwrap(), vec![0.5, 1.0, 3.0]);
        let g = parse_points("log:0.01:100:5").unwrap();
        assert!((g[2] - 1.0).abs() < 1e-15);
        assert!(parse_points("1:0:1").is_err());
        assert!(parse_points("a,b").is_err());
    }

    #[test]
    fn fingerprints_are_stable() {
        assert_eq!(fingerprint(b"abc"), "ba7816bf8f01cfea");
    }
}
