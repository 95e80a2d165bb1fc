//! Command-line front end: `spectrum`, `wavefunction`, `wigner`, `marginal`
//! and `verify`.
//!
//! Options may also come from a `key = value` file given with `--config`;
//! anything set on the command line wins.

mod output;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::grid::{Axis, Grid2};
use crate::marginal::MarginalParams;
use crate::oscillator::{degeneracy, mass_squared, Wavefunction};
use crate::quadrature::{QuadratureSpec, Scheme};
use crate::relativity::{oscillator_marginal_grid, BoostConvention, Method, NestedQuadrature};
use crate::wigner::{wigner_ground, OscillatorWigner, PhasePoint4};

pub use output::{format_number, Table};

#[derive(Debug, Parser)]
#[command(
    name = "marginals",
    version,
    about = "Phase-space marginals of relativistic oscillator states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Mass spectrum M² = m0² + λ + 1 with degeneracies.
    Spectrum,
    /// ψ_β(z, t) on a grid.
    Wavefunction,
    /// W_β(u, v, p_u, p_v) on a grid or a 2D slice.
    Wigner,
    /// Marginal w(U, V) for projection parameters σ.
    Marginal,
    /// Run a verification check and print a JSON report.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    Position,
    Momentum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Covariance,
    Normalization,
    Limits,
    Galileo,
    Subsidiary,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Slice {
    #[value(name = "u-pu")]
    #[serde(rename = "u-pu")]
    UPu,
    #[value(name = "v-pv")]
    #[serde(rename = "v-pv")]
    VPv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// `key = value` file; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub beta: f64,

    /// Longitudinal excitation number.
    #[arg(long, global = true, default_value_t = 0)]
    pub n: u32,

    /// mu1,nu1,nu2,mu2,zeta1,eta1,eta2,zeta2
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        conflicts_with = "plane"
    )]
    pub sigma: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub plane: Option<Plane>,

    /// min:max:count, once per axis or once for all axes.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Vec<String>,

    #[arg(long, global = true)]
    pub quad_order: Option<usize>,

    /// gauss-legendre or gauss-hermite
    #[arg(long, global = true)]
    pub quad_scheme: Option<String>,

    #[arg(long, global = true)]
    pub truncation: Option<f64>,

    /// Gauss–Hermite order for the outer level of nested integrals.
    #[arg(long, global = true)]
    pub outer_order: Option<usize>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Significant digits, 6..=17.
    #[arg(long, global = true, default_value_t = 17)]
    pub precision: usize,

    /// eq2.2 or eq7.46
    #[arg(long, global = true, default_value = "eq2.2")]
    pub boost_convention: String,

    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// analytic (n = 0 only) or numeric
    #[arg(long, global = true)]
    pub method: Option<String>,

    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub m0: f64,

    #[arg(
        long,
        global = true,
        default_value_t = 10,
        allow_negative_numbers = true
    )]
    pub lambda_max: i64,

    #[arg(long, global = true, value_enum)]
    pub check: Option<Check>,

    /// Galileo velocity.
    #[arg(
        long,
        global = true,
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub v: f64,

    /// Galileo time.
    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub t: f64,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub nu: Option<f64>,

    /// Finite-difference step for the subsidiary check.
    #[arg(long, global = true, default_value_t = crate::oscillator::DEFAULT_FD_STEP)]
    pub h: f64,

    /// Seeded random σ (or Galileo parameters) added to a check.
    #[arg(long, global = true, default_value_t = 5)]
    pub random_count: usize,

    /// Fill `runtime_ms` in reports.
    #[arg(long, global = true)]
    pub timing: bool,

    #[arg(long, global = true, value_enum)]
    pub slice: Option<Slice>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 2.
    Usage(String),
    /// Computation failed or was refused; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::InvalidVelocity(_)
            | Error::InvalidSpec(_)
            | Error::UnsupportedOrder { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn main() -> i32 {
    run(std::env::args_os()
        .map(|a| a.to_string_lossy().into_owned())
        .collect())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match parse(args) {
        Ok(cli) => cli,
        Err(Parse::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(Parse::Cli(e)) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

enum Parse {
    Clap(clap::Error),
    Cli(CliError),
}

fn parse(mut args: Vec<String>) -> std::result::Result<Cli, Parse> {
    let cmd = Cli::command();
    let matches = cmd
        .clone()
        .try_get_matches_from(&args)
        .map_err(Parse::Clap)?;
    let cli = Cli::from_arg_matches(&matches).map_err(Parse::Clap)?;
    let Some(path) = cli.opts.config.clone() else {
        return Ok(cli);
    };
    let entries = read_config(&path).map_err(Parse::Cli)?;
    let sub = matches.subcommand().map(|(_, m)| m).unwrap_or(&matches);
    let known: Vec<String> = cmd
        .get_arguments()
        .map(|a| a.get_id().to_string())
        .collect();
    for (key, value) in entries {
        let id = key.replace('-', "_");
        if id == "config" || !known.contains(&id) {
            return Err(Parse::Cli(CliError::Usage(format!(
                "unknown key '{key}' in {}",
                path.display()
            ))));
        }
        let on_command_line = |id: &str| sub.value_source(id) == Some(ValueSource::CommandLine);
        let shadowed = match id.as_str() {
            "sigma" | "plane" => on_command_line("sigma") || on_command_line("plane"),
            other => on_command_line(other),
        };
        if shadowed {
            continue;
        }
        let flag = format!("--{}", id.replace('_', "-"));
        if id == "timing" {
            match value.as_str() {
                "true" => args.push(flag),
                "false" => {}
                _ => {
                    return Err(Parse::Cli(CliError::Usage(format!(
                        "timing must be true or false, got '{value}'"
                    ))))
                }
            }
        } else {
            args.push(format!("{flag}={value}"));
        }
    }
    let matches = cmd.try_get_matches_from(&args).map_err(Parse::Clap)?;
    Cli::from_arg_matches(&matches).map_err(Parse::Clap)
}

/// `key = value` lines; blank lines and `#` comments are skipped.
fn read_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected key = value",
                path.display(),
                i + 1
            ))
        })?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// Options after validation, with context-free defaults applied.
pub(crate) struct Resolved {
    pub command: Command,
    pub n: u32,
    pub beta: f64,
    pub effective_beta: f64,
    pub convention: BoostConvention,
    pub method: Option<Method>,
    pub params: std::result::Result<MarginalParams, Error>,
    pub axes: Vec<Axis>,
    pub single: QuadratureSpec,
    pub nested: NestedQuadrature,
    pub precision: usize,
    pub echo: serde_json::Value,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn resolve(cli: &Cli) -> CliResult<Resolved> {
    let o = &cli.opts;
    if !(6..=17).contains(&o.precision) {
        return Err(usage(format!(
            "precision must be in 6..=17, got {}",
            o.precision
        )));
    }
    if !(o.beta.is_finite() && o.beta.abs() < 1.0) {
        return Err(usage(format!("|beta| must be < 1, got {}", o.beta)));
    }
    let convention: BoostConvention = o.boost_convention.parse()?;
    let method = o.method.as_deref().map(str::parse).transpose()?;
    let scheme: Option<Scheme> = o.quad_scheme.as_deref().map(str::parse).transpose()?;
    let truncation = o.truncation.unwrap_or(8.0);
    let single = QuadratureSpec::new(
        scheme.unwrap_or(Scheme::GaussLegendre),
        o.quad_order.unwrap_or(96),
        truncation,
    )?;
    let nested = NestedQuadrature {
        outer: QuadratureSpec::gauss_hermite(o.outer_order.unwrap_or(12))?,
        inner: QuadratureSpec::new(
            scheme.unwrap_or(Scheme::GaussHermite),
            o.quad_order.unwrap_or(32),
            truncation,
        )?,
    };
    let axes = o
        .grid
        .iter()
        .map(|g| g.parse::<Axis>())
        .collect::<crate::Result<Vec<_>>>()?;
    let params = match (&o.sigma, o.plane) {
        (Some(s), _) => MarginalParams::from_sigma(parse_sigma(s)?),
        (None, Some(Plane::Momentum)) => Ok(MarginalParams::momentum_plane()),
        _ => Ok(MarginalParams::position_plane()),
    };
    let mut echo = serde_json::to_value(o)?;
    if let serde_json::Value::Object(map) = &mut echo {
        map.insert(
            "command".into(),
            serde_json::to_value(cli.command).unwrap_or_default(),
        );
    }
    Ok(Resolved {
        command: cli.command,
        n: o.n,
        beta: o.beta,
        effective_beta: convention.effective_beta(o.beta),
        convention,
        method,
        params,
        axes,
        single,
        nested,
        precision: o.precision,
        echo,
    })
}

fn parse_sigma(s: &str) -> CliResult<[f64; 8]> {
    let values: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            usage(format!(
                "sigma must be 8 comma-separated numbers, got '{s}'"
            ))
        })?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| usage(format!("sigma needs 8 values, got {}", v.len())))
}

impl Resolved {
    /// `want` axes from the `--grid` flags: none uses `default` for every
    /// axis, a single one is reused for every axis.
    pub fn axes(&self, want: usize, default: &str) -> CliResult<Vec<Axis>> {
        match self.axes.len() {
            0 => Ok(vec![default.parse::<Axis>()?; want]),
            1 => Ok(vec![self.axes[0]; want]),
            k if k == want => Ok(self.axes.clone()),
            k => Err(usage(format!(
                "expected 1 or {want} --grid values, got {k}"
            ))),
        }
    }

    pub fn grid2(&self, default: &str) -> CliResult<Grid2> {
        let a = self.axes(2, default)?;
        Ok(Grid2::new(a[0], a[1]))
    }

    pub fn method(&self) -> CliResult<Method> {
        let m = self.method.unwrap_or(if self.n == 0 {
            Method::Analytic
        } else {
            Method::Numeric
        });
        if m == Method::Analytic && self.n != 0 {
            return Err(usage(format!(
                "analytic method requires n = 0, got n = {}",
                self.n
            )));
        }
        Ok(m)
    }

    pub fn params(&self) -> CliResult<MarginalParams> {
        self.params.clone().map_err(CliError::from)
    }
}

fn execute(cli: &Cli) -> CliResult<i32> {
    let r = resolve(cli)?;
    let o = &cli.opts;
    let start = Instant::now();
    match r.command {
        Command::Verify => {
            let check = o.check.ok_or_else(|| usage("verify needs --check"))?;
            let mut report = verify::run(check, &r, o)?;
            if o.timing {
                report.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let mut value = serde_json::to_value(&report)?;
            output::round_json(&mut value, r.precision);
            let text = serde_json::to_string_pretty(&value)?;
            write_out(o.out.as_deref(), |w| writeln!(w, "{text}"))?;
            Ok(if report.passed { 0 } else { 1 })
        }
        command => {
            let table = match command {
                Command::Spectrum => spectrum(o.m0, o.lambda_max)?,
                Command::Wavefunction => wavefunction(&r)?,
                Command::Wigner => wigner(&r, o.slice)?,
                Command::Marginal => marginal(&r)?,
                Command::Verify => unreachable!(),
            };
            write_out(o.out.as_deref(), |w| match o.format {
                Format::Csv => table.write_csv(w, r.precision),
                Format::Json => table.write_json(w, r.precision),
            })?;
            Ok(0)
        }
    }
}

fn write_out<F>(path: Option<&Path>, f: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Rows `(λ, M², degeneracy)` for `λ = 0..=λ_max`.
pub fn spectrum(m0: f64, lambda_max: i64) -> CliResult<Table> {
    if lambda_max < 0 {
        return Err(usage(format!("lambda-max must be >= 0, got {lambda_max}")));
    }
    if !(m0.is_finite() && m0 >= 0.0) {
        return Err(usage(format!("m0 must be >= 0, got {m0}")));
    }
    let lambda_max = u32::try_from(lambda_max).map_err(|_| usage("lambda-max too large"))?;
    let mut table = Table::new(vec!["lambda", "mass_squared", "degeneracy"]);
    for lambda in 0..=lambda_max {
        table.rows.push(vec![
            lambda as f64,
            mass_squared(m0, 0, 0, lambda, 0),
            degeneracy(lambda as u64) as f64,
        ]);
    }
    Ok(table)
}

fn wavefunction(r: &Resolved) -> CliResult<Table> {
    let grid = r.grid2("-3:3:21")?;
    let wf = Wavefunction::new(r.n, r.effective_beta)?;
    let mut table = Table::new(vec!["z", "t", "psi"]);
    table.rows = grid
        .points()
        .into_iter()
        .map(|(z, t)| vec![z, t, wf.eval_zt(z, t)])
        .collect();
    Ok(table)
}

fn wigner(r: &Resolved, slice: Option<Slice>) -> CliResult<Table> {
    let points: Vec<[f64; 4]> = match slice {
        Some(s) => {
            let g = r.grid2("-2:2:21")?;
            g.points()
                .into_iter()
                .map(|(x, p)| match s {
                    Slice::UPu => [x, 0.0, p, 0.0],
                    Slice::VPv => [0.0, x, 0.0, p],
                })
                .collect()
        }
        None => {
            let a = r.axes(4, "-2:2:5")?;
            let mut pts = Vec::new();
            for u in a[0].points() {
                for v in a[1].points() {
                    for pu in a[2].points() {
                        for pv in a[3].points() {
                            pts.push([u, v, pu, pv]);
                        }
                    }
                }
            }
            pts
        }
    };
    let values: Vec<f64> = match r.method()? {
        Method::Analytic => {
            let w = wigner_ground(r.effective_beta)?;
            points
                .iter()
                .map(|xi| w.eval(xi))
                .collect::<crate::Result<_>>()?
        }
        Method::Numeric => {
            let w = OscillatorWigner::new(r.n, r.effective_beta, &r.nested.inner)?;
            points
                .par_iter()
                .map(|xi| w.eval_point(PhasePoint4::new(xi[0], xi[1], xi[2], xi[3])))
                .collect::<crate::Result<_>>()?
        }
    };
    let mut table = Table::new(vec!["u", "v", "p_u", "p_v", "W"]);
    table.rows = points
        .iter()
        .zip(values)
        .map(|(xi, w)| vec![xi[0], xi[1], xi[2], xi[3], w])
        .collect();
    Ok(table)
}

fn marginal(r: &Resolved) -> CliResult<Table> {
    let params = r.params()?;
    let grid = r.grid2("-3:3:21")?;
    let points = grid.points();
    let values = oscillator_marginal_grid(
        r.n,
        r.effective_beta,
        &params,
        &points,
        r.method()?,
        &r.nested,
    )?;
    let mut table = Table::new(vec!["U", "V", "w"]);
    table.rows = points
        .iter()
        .zip(values)
        .map(|(&(x, y), w)| vec![x, y, w])
        .collect();
    Ok(table)
}
