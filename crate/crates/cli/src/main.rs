//! `tcf`: evaluate, recover, transform, test and simulate tail correlation
//! functions from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod functions;
mod output;
mod reproduce;

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tcf::membership::{classify, classify_erfc_power};
use tcf::operators::{
    is_admissible, taylor_abs_monotone, transform_bound, turning_bands_tol, TransformMap, TransformSpec,
    TurningBandsSpec,
};
use tcf::recovery::{diameter_law, recover_radius_density, recover_shape, RecoveryInput};
use tcf::simulate::{
    read_binary, read_csv, simulate, transform_margins, write_binary, write_csv, ChiAccumulator, GridField,
    GridGeometry, Margins, Method, PairSelection, SimConfig, Truncation,
};
use tcf::tcf_models::DensityValue;

use config::load_model;
use functions::resolve;
use output::{parse_points, provenance, sink};

#[derive(Parser)]
#[command(name = "tcf", version, about = "Tail correlation functions of max-stable processes")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output file, or directory for `reproduce`; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Suppress notices on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// χ(t) of a model document.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// start:stop:step, log:lo:hi:n or a comma list.
        #[arg(long)]
        lags: String,
    },
    /// Shape f and diameter density k realizing a TCF in d ∈ {1, 2, 3}.
    Recover {
        #[arg(long)]
        function: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "log:0.01:10:50")]
        points: String,
    },
    /// Correlation transform R, S or T, applied to a function or tabulated on [-1, 1].
    Transform {
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long)]
        function: Option<String>,
        #[arg(long, default_value = "0:5:0.25")]
        lags: String,
        /// Emit Taylor coefficients at 0 up to this order instead.
        #[arg(long)]
        taylor: Option<usize>,
    },
    /// Turning bands tb_k^d.
    Tb {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        function: String,
        #[arg(long, default_value = "0:5:0.25")]
        lags: String,
    },
    /// Membership tests and class verdicts.
    Check {
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Fields with standard Fréchet (or Gumbel) margins on a grid.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        /// Sites per axis, comma separated (one or two axes).
        #[arg(long)]
        shape: String,
        #[arg(long)]
        spacing: String,
        #[arg(long)]
        origin: Option<String>,
        #[arg(long, default_value_t = 1000)]
        realizations: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        #[arg(long)]
        window_pad: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        poisson_points_max: usize,
        /// Keep drawing Poisson points after the field is dominated.
        #[arg(long)]
        no_dominance_stop: bool,
        #[arg(long, value_enum, default_value_t = MarginsArg::Frechet)]
        margins: MarginsArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// χ̂ at the given lags from a field file.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lags: String,
        /// Use only pairs starting at the grid origin.
        #[arg(long)]
        from_origin: bool,
        /// Add the model's χ and the deviation.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Regenerate the data of a worked example into --out.
    Reproduce {
        #[arg(value_enum)]
        example: reproduce::Example,
        #[arg(long, default_value_t = 10_000)]
        realizations: usize,
        /// Realizations written per field file.
        #[arg(long, default_value_t = 20)]
        fields_written: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Spectral,
}

#[derive(Clone, Copy, ValueEnum)]
enum MarginsArg {
    Frechet,
    Gumbel,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Binary,
}

/// Stderr notices and the failure flag that sets the exit code.
pub struct Notices {
    quiet: bool,
    failed: bool,
}

impl Notices {
    pub fn warn(&mut self, msg: impl std::fmt::Display) {
        self.failed = true;
        if !self.quiet {
            eprintln!("tcf: {msg}");
        }
    }
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| v.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad {what} '{v}'")))
        .collect()
}

fn cmd_eval(cli: &Cli, model: &Path, lags: &str, notes: &mut Notices) -> Result<()> {
    let (m, text) = load_model(model)?;
    let lags = parse_points(lags)?;
    let mut w = sink(cli.out.as_deref())?;
    writeln!(w, "{}", provenance(cli.seed, text.as_bytes()))?;
    writeln!(w, "t,chi,abs_error")?;
    for t in lags {
        match m.tcf(t) {
            Ok(e) => writeln!(w, "{t},{},{:e}", e.value, e.abs_error)?,
            Err(e) => {
                notes.warn(format!("t = {t}: {e}"));
                writeln!(w, "{t},NaN,NaN")?;
            }
        }
    }
    Ok(w.flush()?)
}

fn cmd_recover(cli: &Cli, function: &str, dim: usize, points: &str, notes: &mut Notices) -> Result<()> {
    let f = resolve(function)?;
    let input = RecoveryInput::new(f.function, dim)?.with_tolerance(cli.tol);
    let pts = parse_points(points)?;
    let mut w = sink(cli.out.as_deref())?;
    writeln!(w, "{}", provenance(cli.seed, &f.identity))?;
    writeln!(w, "x,shape,diameter_density")?;
    let mut atoms = false;
    for x in pts {
        let fv = recover_shape(&input, x).unwrap_or_else(|e| {
            notes.warn(format!("shape at {x}: {e}"));
            f64::NAN
        });
        let kv = match recover_radius_density(&input, x) {
            Ok(DensityValue::Value(v)) => v,
            Ok(DensityValue::Atomic { .. }) => {
                atoms = true;
                0.0
            }
            Err(e) => {
                notes.warn(format!("diameter density at {x}: {e}"));
                f64::NAN
            }
        };
        writeln!(w, "{x},{fv},{kv}")?;
    }
    if atoms {
        let law = diameter_law(&input)?;
        for (loc, mass) in law.atoms() {
            writeln!(w, "# atom location={loc} mass={mass}")?;
        }
    }
    Ok(w.flush()?)
}

fn cmd_transform(
    cli: &Cli,
    map: &str,
    lambda: f64,
    alpha: f64,
    function: Option<&str>,
    lags: &str,
    taylor: Option<usize>,
) -> Result<()> {
    let m = TransformMap::from_name(map).with_context(|| format!("unknown map '{map}' (R, S or T)"))?;
    let spec = TransformSpec::new(m, lambda, alpha)?;
    let mut w = sink(cli.out.as_deref())?;
    let identity = format!("{map} {lambda} {alpha} {function:?}");
    writeln!(w, "{}", provenance(cli.seed, identity.as_bytes()))?;
    let bound = transform_bound(m, alpha).map_or("none".to_string(), |b| b.to_string());
    writeln!(w, "# lambda_bound={bound} admissible={}", is_admissible(&spec))?;
    if let Some(order) = taylor {
        let rep = taylor_abs_monotone(&spec, order)?;
        writeln!(w, "# coefficients from order 1 non-negative: {}", rep.all_nonneg_from_1)?;
        writeln!(w, "order,coefficient")?;
        for (k, c) in rep.coeffs.iter().enumerate() {
            writeln!(w, "{k},{c}")?;
        }
        return Ok(w.flush()?);
    }
    match function {
        Some(spec_str) => {
            let f = resolve(spec_str)?.function;
            writeln!(w, "t,base,transformed")?;
            for t in parse_points(lags)? {
                let b = f.eval(t);
                writeln!(w, "{t},{b},{}", spec.apply(b))?;
            }
        }
        None => {
            writeln!(w, "x,transformed")?;
            for i in 0..=200 {
                let x = -1.0 + i as f64 / 100.0;
                writeln!(w, "{x},{}", spec.apply(x))?;
            }
        }
    }
    Ok(w.flush()?)
}

fn cmd_tb(cli: &Cli, k: usize, d: usize, function: &str, lags: &str, notes: &mut Notices) -> Result<()> {
    let f = resolve(function)?;
    let spec = TurningBandsSpec::new(k, d)?;
    let mut w = sink(cli.out.as_deref())?;
    writeln!(w, "{}", provenance(cli.seed, &f.identity))?;
    writeln!(w, "r,tb,abs_error")?;
    for r in parse_points(lags)? {
        match turning_bands_tol(&f.function, spec, r, cli.tol) {
            Ok(e) => writeln!(w, "{r},{},{:e}", e.value, e.abs_error)?,
            Err(e) => {
                notes.warn(format!("r = {r}: {e}"));
                writeln!(w, "{r},NaN,NaN")?;
            }
        }
    }
    Ok(w.flush()?)
}

fn cmd_check(cli: &Cli, function: &str, dim: usize) -> Result<()> {
    let f = resolve(function)?;
    let report = match f.erfc_exponent {
        Some(a) => classify_erfc_power(a, dim, cli.seed),
        None => classify(&f.function, dim, cli.seed),
    };
    let mut w = sink(cli.out.as_deref())?;
    writeln!(w, "{}", provenance(cli.seed, &f.identity))?;
    writeln!(w, "# function={} dim={dim}", report.function)?;
    write!(w, "{}", report.to_csv())?;
    Ok(w.flush()?)
}

fn grid_from(shape: &str, spacing: &str, origin: Option<&str>) -> Result<GridGeometry> {
    let shape: Vec<usize> = list(shape, "shape")?;
    let spacing: Vec<f64> = list(spacing, "spacing")?;
    let origin: Vec<f64> = match origin {
        Some(o) => list(o, "origin")?,
        None => vec![0.0; shape.len()],
    };
    Ok(GridGeometry::new(origin, spacing, shape)?)
}

fn cmd_simulate(cli: &Cli, cmd: &Command) -> Result<()> {
    let Command::Simulate {
        model,
        shape,
        spacing,
        origin,
        realizations,
        method,
        window_pad,
        poisson_points_max,
        no_dominance_stop,
        margins,
        format,
    } = cmd
    else {
        unreachable!("dispatched on Simulate")
    };
    let (m, _) = load_model(model)?;
    let mut cfg = SimConfig::new(
        m,
        grid_from(shape, spacing, origin.as_deref())?,
        *realizations,
        cli.seed,
    )
    .with_method(match method {
        MethodArg::Exact => Method::ExactExtremal,
        MethodArg::Spectral => Method::Spectral,
    })
    .with_truncation(Truncation {
        poisson_points_max: *poisson_points_max,
        stop_when_dominated: !no_dominance_stop,
    });
    if let Some(p) = window_pad {
        cfg = cfg.with_window_pad(*p);
    }
    let to = match margins {
        MarginsArg::Frechet => Margins::Frechet,
        MarginsArg::Gumbel => Margins::Gumbel,
    };
    let fields = simulate(&cfg)?
        .map(|f| transform_margins(&f, to))
        .collect::<tcf::Result<Vec<GridField>>>()?;
    let truncated = fields.iter().filter(|f| f.truncated).count();
    if truncated > 0 && !cli.quiet {
        eprintln!(
            "tcf: {truncated} of {} fields truncated at {poisson_points_max} Poisson points",
            fields.len()
        );
    }
    match format {
        FormatArg::Csv => {
            let mut w = sink(cli.out.as_deref())?;
            let text = std::fs::read(model)?;
            writeln!(w, "{}", provenance(cli.seed, &text))?;
            write_csv(&mut w, &fields)?;
            w.flush()?;
        }
        FormatArg::Binary => {
            let Some(path) = cli.out.as_deref() else {
                bail!("binary output needs --out");
            };
            let mut w = sink(Some(path))?;
            write_binary(&mut w, &fields)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Reads a CSV or binary field file, telling them apart by the magic bytes.
fn read_fields(path: &Path) -> Result<(Vec<GridField>, Vec<u8>)> {
    let mut bytes = Vec::new();
    File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_end(&mut bytes)?;
    let fields = if bytes.starts_with(b"TCFFIELD") {
        read_binary(bytes.as_slice())?
    } else {
        read_csv(BufReader::new(bytes.as_slice()))?
    };
    Ok((fields, bytes))
}

fn cmd_estimate(
    cli: &Cli,
    input: &Path,
    lags: &str,
    from_origin: bool,
    model: Option<&Path>,
    notes: &mut Notices,
) -> Result<()> {
    let (fields, bytes) = read_fields(input)?;
    let Some(first) = fields.first() else {
        bail!("{} holds no fields", input.display());
    };
    let selection = if from_origin {
        PairSelection::FromOrigin
    } else {
        PairSelection::All
    };
    let mut acc = ChiAccumulator::new(first.geometry.clone(), &parse_points(lags)?, selection);
    for f in &fields {
        acc.push(&transform_margins(f, Margins::Frechet)?)?;
    }
    let report = acc.finish()?;
    for (lag, why) in &report.skipped {
        notes.warn(format!("lag {lag} skipped: {why}"));
    }
    let model = model.map(load_model).transpose()?;
    let mut w = sink(cli.out.as_deref())?;
    writeln!(w, "{}", provenance(first.seed, &bytes))?;
    if fields.iter().any(|f| f.truncated) {
        writeln!(w, "# input contains truncated fields")?;
    }
    write!(w, "requested_lag,lag,chi_hat,std_err,n,clipped")?;
    writeln!(w, "{}", if model.is_some() { ",chi,deviation" } else { "" })?;
    for e in &report.estimates {
        write!(
            w,
            "{},{},{},{},{},{}",
            e.requested_lag, e.lag, e.chi_hat, e.std_err, e.n, e.clipped
        )?;
        if let Some((m, _)) = &model {
            let chi = m.tcf(e.lag)?.value;
            write!(w, ",{chi},{}", e.chi_hat - chi)?;
        }
        writeln!(w)?;
    }
    Ok(w.flush()?)
}

fn run(cli: &Cli, notes: &mut Notices) -> Result<()> {
    match &cli.command {
        Command::Eval { model, lags } => cmd_eval(cli, model, lags, notes),
        Command::Recover { function, dim, points } => cmd_recover(cli, function, *dim, points, notes),
        Command::Transform {
            map,
            lambda,
            alpha,
            function,
            lags,
            taylor,
        } => cmd_transform(cli, map, *lambda, *alpha, function.as_deref(), lags, *taylor),
        Command::Tb { k, d, function, lags } => cmd_tb(cli, *k, *d, function, lags, notes),
        Command::Check { function, dim } => cmd_check(cli, function, *dim),
        cmd @ Command::Simulate { .. } => cmd_simulate(cli, cmd),
        Command::Estimate {
            input,
            lags,
            from_origin,
            model,
        } => cmd_estimate(cli, input, lags, *from_origin, model.as_deref(), notes),
        Command::Reproduce {
            example,
            realizations,
            fields_written,
        } => {
            let dir = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("reproduce-{}", example.name())));
            reproduce::run(*example, &dir, cli.seed, *realizations, *fields_written, notes)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut notes = Notices {
        quiet: cli.quiet,
        failed: false,
    };
    match run(&cli, &mut notes) {
        Ok(()) if !notes.failed => ExitCode::SUCCESS,
        Ok(()) => ExitCode::from(2),
        Err(e) => {
            eprintln!("tcf: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
