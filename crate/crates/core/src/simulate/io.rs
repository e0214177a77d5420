//! Field files.
//!
//! CSV: `#` metadata lines carrying the grid, margins, seed and truncated
//! realizations, then a header row and one row per site
//! (`realization,x[,y],value`). Binary: little-endian header
//! (magic, version, axes with shape/origin/spacing, count, margins, seed)
//! followed by, per realization, its index, a truncation byte and the values.

use std::io::{BufRead, Read, Write};

use super::{GridField, GridGeometry, Margins};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TCFFIELD";
const VERSION: u32 = 1;

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptField(msg.into())
}

fn shared(fields: &[GridField]) -> Result<Option<&GridField>> {
    let Some(first) = fields.first() else {
        return Ok(None);
    };
    for f in fields {
        if f.geometry != first.geometry || f.margins != first.margins {
            return Err(Error::Precondition(
                "fields in one file must share grid and margins".into(),
            ));
        }
        f.validate()?;
    }
    Ok(Some(first))
}

pub fn write_csv<W: Write>(w: &mut W, fields: &[GridField]) -> Result<()> {
    let Some(first) = shared(fields)? else {
        writeln!(w, "realization,x,value")?;
        return Ok(());
    };
    let g = &first.geometry;
    let shape: Vec<String> = g.shape().iter().map(|s| s.to_string()).collect();
    writeln!(
        w,
        "# grid origin={} spacing={} shape={} margins={} seed={}",
        join(g.origin()),
        join(g.spacing()),
        shape.join(";"),
        first.margins.name(),
        first.seed
    )?;
    let truncated: Vec<String> = fields
        .iter()
        .filter(|f| f.truncated)
        .map(|f| f.index.to_string())
        .collect();
    if !truncated.is_empty() {
        writeln!(w, "# truncated={}", truncated.join(";"))?;
    }
    writeln!(
        w,
        "{}",
        if g.dim() == 1 {
            "realization,x,value"
        } else {
            "realization,x,y,value"
        }
    )?;
    for f in fields {
        for (k, v) in f.values.iter().enumerate() {
            let c = g.site(k);
            match c.as_slice() {
                [x] => writeln!(w, "{},{x},{v}", f.index)?,
                [x, y] => writeln!(w, "{},{x},{y},{v}", f.index)?,
                _ => unreachable!("grids have one or two axes"),
            }
        }
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(';')
        .map(|t| t.trim().parse::<T>().map_err(|_| corrupt(format!("bad {what} '{s}'"))))
        .collect()
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<GridField>> {
    let mut geometry = None;
    let mut margins = Margins::Frechet;
    let mut seed = 0u64;
    let mut truncated: Vec<u64> = Vec::new();
    let mut header = false;
    let mut fields: Vec<GridField> = Vec::new();
    for (no, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let mut kv = std::collections::HashMap::new();
            for tok in meta.split_whitespace() {
                if let Some((k, v)) = tok.split_once('=') {
                    kv.insert(k, v);
                }
            }
            if let (Some(o), Some(s), Some(n)) = (kv.get("origin"), kv.get("spacing"), kv.get("shape")) {
                geometry = Some(GridGeometry::new(
                    parse_list(o, "origin")?,
                    parse_list(s, "spacing")?,
                    parse_list(n, "shape")?,
                )?);
            }
            if let Some(m) = kv.get("margins") {
                margins = Margins::from_name(m).ok_or_else(|| corrupt(format!("unknown margins '{m}'")))?;
            }
            if let Some(s) = kv.get("seed") {
                seed = s.parse().map_err(|_| corrupt(format!("bad seed '{s}'")))?;
            }
            if let Some(t) = kv.get("truncated") {
                truncated = parse_list(t, "truncated list")?;
            }
            continue;
        }
        if !header {
            header = true;
            continue;
        }
        let g = geometry
            .as_ref()
            .ok_or_else(|| corrupt("missing '# grid' metadata line"))?;
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != g.dim() + 2 {
            return Err(corrupt(format!("line {}: expected {} columns", no + 1, g.dim() + 2)));
        }
        let index: u64 = cols[0]
            .parse()
            .map_err(|_| corrupt(format!("line {}: bad realization", no + 1)))?;
        let value: f64 = cols[cols.len() - 1]
            .parse()
            .map_err(|_| corrupt(format!("line {}: bad value", no + 1)))?;
        match fields.last_mut() {
            Some(f) if f.index == index && f.values.len() < g.len() => f.values.push(value),
            _ => fields.push(GridField {
                geometry: g.clone(),
                values: vec![value],
                margins,
                index,
                seed,
                truncated: truncated.contains(&index),
            }),
        }
    }
    for f in &fields {
        f.validate()?;
    }
    Ok(fields)
}

pub fn write_binary<W: Write>(w: &mut W, fields: &[GridField]) -> Result<()> {
    let Some(first) = shared(fields)? else {
        return Err(Error::Precondition("no fields to write".into()));
    };
    let g = &first.geometry;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for a in 0..g.dim() {
        w.write_all(&(g.shape()[a] as u64).to_le_bytes())?;
        w.write_all(&g.origin()[a].to_le_bytes())?;
        w.write_all(&g.spacing()[a].to_le_bytes())?;
    }
    w.write_all(&(fields.len() as u64).to_le_bytes())?;
    w.write_all(&[match first.margins {
        Margins::Frechet => 0u8,
        Margins::Gumbel => 1u8,
    }])?;
    w.write_all(&first.seed.to_le_bytes())?;
    for f in fields {
        w.write_all(&f.index.to_le_bytes())?;
        w.write_all(&[f.truncated as u8])?;
        for v in &f.values {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| corrupt(format!("truncated binary file: {e}")))?;
    Ok(b)
}

fn u64_at<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(take::<8, R>(r)?))
}

fn f64_at<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(take::<8, R>(r)?))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Vec<GridField>> {
    if &take::<8, R>(&mut r)? != MAGIC {
        return Err(corrupt("not a field file"));
    }
    let version = u32::from_le_bytes(take::<4, R>(&mut r)?);
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let dims = u32::from_le_bytes(take::<4, R>(&mut r)?) as usize;
    if !(1..=2).contains(&dims) {
        return Err(corrupt(format!("{dims} axes")));
    }
    let (mut shape, mut origin, mut spacing) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..dims {
        shape.push(u64_at(&mut r)? as usize);
        origin.push(f64_at(&mut r)?);
        spacing.push(f64_at(&mut r)?);
    }
    let geometry = GridGeometry::new(origin, spacing, shape)?;
    let count = u64_at(&mut r)?;
    let margins = match take::<1, R>(&mut r)?[0] {
        0 => Margins::Frechet,
        1 => Margins::Gumbel,
        m => return Err(corrupt(format!("margins tag {m}"))),
    };
    let seed = u64_at(&mut r)?;
    let mut fields = Vec::new();
    for _ in 0..count {
        let index = u64_at(&mut r)?;
        let truncated = take::<1, R>(&mut r)?[0] != 0;
        let values = (0..geometry.len())
            .map(|_| f64_at(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let f = GridField {
            geometry: geometry.clone(),
            values,
            margins,
            index,
            seed,
            truncated,
        };
        f.validate()?;
        fields.push(f);
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate, SimConfig};
    use crate::tcf_models::catalog;

    fn sample() -> Vec<GridField> {
        let g = GridGeometry::new(vec![0.1, -2.0], vec![0.3, 0.7], vec![4, 3]).unwrap();
        let cfg = SimConfig::new(catalog::damped_eg(2).unwrap(), g, 4, 99);
        let mut v: Vec<GridField> = simulate(&cfg).unwrap().collect();
        v[2].truncated = true;
        v
    }

    #[test]
    fn csv_round_trip() {
        let fields = sample();
        let mut buf = Vec::new();
        write_csv(&mut buf, &fields).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), fields);
    }

    #[test]
    fn binary_round_trip() {
        let fields = sample();
        let mut buf = Vec::new();
        write_binary(&mut buf, &fields).unwrap();
        assert_eq!(read_binary(buf.as_slice()).unwrap(), fields);
        assert!(read_binary(&buf[..buf.len() - 3]).is_err());
    }
}
