//! Command-line front end: CSV tables for integral errors, solver sweeps and
//! quadrature rules.
//!
//! Every CSV starts with one `#`-prefixed JSON manifest line, followed by a
//! header row and the data. Floats are written in shortest round-trip form.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::basis::{BasisKind, RecurrenceBasis};
use crate::error::{FracError, Result};
use crate::frac_integrals::{integral_matrix, IntegralBackend};
use crate::oracle::{self, ExtendedReal};
use crate::problems;
use crate::quadrature::QuadratureRule;
use crate::solver::{error_curve, ErrorPoint, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fracint", version, about = "Fractional integrals of orthogonal polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Max error over the Gauss nodes of each I^α P_j against the extended-precision oracle.
    IntegralErrors(IntegralErrorsArgs),
    /// Solve a problem for a range of s and report the grid error.
    Solve(SolveArgs),
    /// Print the Gauss rule of a basis.
    Nodes(NodesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Chebyshev,
    ChebyshevOrthonormal,
    Legendre,
}

impl From<BasisArg> for BasisKind {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Chebyshev => BasisKind::Chebyshev,
            BasisArg::ChebyshevOrthonormal => BasisKind::ChebyshevOrthonormal,
            BasisArg::Legendre => BasisKind::Legendre,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Recurrence,
    Horner,
}

impl From<BackendArg> for IntegralBackend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Recurrence => IntegralBackend::Recurrence,
            BackendArg::Horner => IntegralBackend::Horner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendSet {
    Both,
    Recurrence,
    Horner,
}

impl BackendSet {
    fn backends(self) -> Vec<IntegralBackend> {
        match self {
            BackendSet::Both => vec![IntegralBackend::Recurrence, IntegralBackend::Horner],
            BackendSet::Recurrence => vec![IntegralBackend::Recurrence],
            BackendSet::Horner => vec![IntegralBackend::Horner],
        }
    }
}

#[derive(Debug, Args)]
pub struct IntegralErrorsArgs {
    #[arg(long, value_enum, default_value = "legendre")]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 25)]
    pub s: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub backend: BackendSet,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// `garrappa`, `constant`, or a path to a TOML problem file.
    #[arg(long, default_value = "garrappa")]
    pub problem: String,
    #[arg(long, value_enum, default_value = "legendre")]
    pub basis: BasisArg,
    #[arg(long, value_enum, default_value = "recurrence")]
    pub backend: BackendArg,
    #[arg(long, conflicts_with = "s_range")]
    pub s: Option<usize>,
    /// Inclusive range `A:B`.
    #[arg(long = "s-range", value_parser = parse_range)]
    pub s_range: Option<(usize, usize)>,
    #[arg(long = "T", allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-14)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NodesArgs {
    #[arg(long, value_enum, default_value = "legendre")]
    pub basis: BasisArg,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_range(text: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| format!("expected A:B, got '{text}'"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
    if a == 0 || b < a {
        return Err(format!("range must satisfy 1 <= A <= B, got {a}:{b}"));
    }
    Ok((a, b))
}

/// Provenance line written ahead of every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn header_line(&self) -> String {
        format!(
            "# {}",
            serde_json::to_string(self).expect("manifest serializes")
        )
    }
}

/// Shortest representation that parses back to the same binary64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralErrorRow {
    pub j: usize,
    /// One entry per requested backend, in request order.
    pub errors: Vec<f64>,
}

/// `max_i |backend(j, c_i) - oracle(j, c_i)|` over the `s` Gauss nodes.
pub fn integral_errors(
    kind: BasisKind,
    alpha: f64,
    s: usize,
    backends: &[IntegralBackend],
) -> Result<Vec<IntegralErrorRow>> {
    if s == 0 {
        return Err(FracError::Domain("s must be at least 1".into()));
    }
    let basis = RecurrenceBasis::from_kind(kind)?;
    let rule = QuadratureRule::for_basis(&basis, s)?;
    let references: Vec<Vec<ExtendedReal>> = rule
        .nodes
        .iter()
        .map(|&c| oracle::reference_integrals(kind, s - 1, alpha, c))
        .collect::<Result<_>>()?;
    let matrices = backends
        .iter()
        .map(|&b| integral_matrix(&basis, alpha, &rule, b))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..s)
        .map(|j| IntegralErrorRow {
            j,
            errors: matrices
                .iter()
                .map(|m| {
                    (0..s)
                        .map(|i| (ExtendedReal::from_f64(m.get(i, j)) - references[i][j]).abs().to_f64())
                        .fold(0.0, f64::max)
                })
                .collect(),
        })
        .collect())
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(FracError::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

pub fn write_integral_errors<W: Write>(
    w: &mut W,
    manifest: &RunManifest,
    backends: &[IntegralBackend],
    rows: &[IntegralErrorRow],
) -> Result<()> {
    writeln!(w, "{}", manifest.header_line())?;
    let mut header = String::from("j");
    for b in backends {
        header.push_str(&format!(",err_{}", b.name()));
    }
    writeln!(w, "{header}")?;
    for row in rows {
        let mut line = row.j.to_string();
        for e in &row.errors {
            line.push(',');
            line.push_str(&fmt_float(*e));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_error_curve<W: Write>(
    w: &mut W,
    manifest: &RunManifest,
    points: &[ErrorPoint],
) -> Result<()> {
    writeln!(w, "{}", manifest.header_line())?;
    writeln!(w, "s,error,iterations,converged")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            p.s,
            fmt_float(p.error),
            p.iterations,
            p.converged
        )?;
    }
    Ok(())
}

pub fn write_nodes<W: Write>(w: &mut W, manifest: &RunManifest, rule: &QuadratureRule) -> Result<()> {
    writeln!(w, "{}", manifest.header_line())?;
    writeln!(w, "i,node,weight")?;
    for (i, (c, b)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        writeln!(w, "{},{},{}", i + 1, fmt_float(*c), fmt_float(*b))?;
    }
    Ok(())
}

fn with_output(manifest: RunManifest, out: &Option<PathBuf>) -> RunManifest {
    let mut m = manifest;
    m.outputs
        .push(out.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into()));
    m
}

fn run_integral_errors(args: &IntegralErrorsArgs) -> Result<()> {
    check_alpha(args.alpha)?;
    let kind: BasisKind = args.basis.into();
    let backends = args.backend.backends();
    let rows = integral_errors(kind, args.alpha, args.s, &backends)?;
    let manifest = with_output(
        RunManifest::new("integral-errors")
            .param("basis", kind)
            .param("alpha", fmt_float(args.alpha))
            .param("s", args.s)
            .param("backend", format!("{:?}", args.backend).to_lowercase()),
        &args.out,
    );
    let mut w = open_output(&args.out)?;
    write_integral_errors(&mut w, &manifest, &backends, &rows)?;
    w.flush()?;
    Ok(())
}

fn run_solve(args: &SolveArgs, stderr: &mut dyn Write) -> Result<()> {
    if let Some(a) = args.alpha {
        check_alpha(a)?;
    }
    let problem = problems::resolve(&args.problem, args.alpha, args.horizon)?;
    let exact = problem.exact.clone().ok_or_else(|| {
        FracError::Domain(format!("problem '{}' has no exact solution to compare against", problem.name))
    })?;
    let kind: BasisKind = args.basis.into();
    let basis = RecurrenceBasis::from_kind(kind)?;
    let s_values: Vec<usize> = match (args.s, args.s_range) {
        (Some(s), _) => {
            if s == 0 {
                return Err(FracError::Domain("s must be at least 1".into()));
            }
            vec![s]
        }
        (None, Some((a, b))) => (a..=b).collect(),
        (None, None) => (4..=24).collect(),
    };
    let template = SolverConfig {
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        ..SolverConfig::default()
    };
    let backend: IntegralBackend = args.backend.into();
    let points = error_curve(
        &problem.ivp,
        &|t| exact(t),
        &basis,
        backend,
        &s_values,
        &template,
    )?;
    let manifest = with_output(
        RunManifest::new("solve")
            .param("problem", &problem.name)
            .param("basis", kind)
            .param("backend", backend)
            .param("alpha", fmt_float(problem.ivp.alpha))
            .param("T", fmt_float(problem.ivp.horizon))
            .param(
                "s",
                format!("{}:{}", s_values[0], s_values[s_values.len() - 1]),
            ),
        &args.out,
    );
    let mut w = open_output(&args.out)?;
    write_error_curve(&mut w, &manifest, &points)?;
    w.flush()?;

    let best = points
        .iter()
        .filter(|p| p.converged && p.error.is_finite())
        .min_by(|a, b| a.error.total_cmp(&b.error));
    match best {
        Some(p) => writeln!(stderr, "best: s={} error={}", p.s, fmt_float(p.error))?,
        None => writeln!(stderr, "best: no converged run")?,
    }
    for p in points.iter().filter(|p| !p.converged) {
        if let Some(msg) = &p.failure {
            writeln!(stderr, "s={}: {msg}", p.s)?;
        }
    }
    Ok(())
}

fn run_nodes(args: &NodesArgs) -> Result<()> {
    let kind: BasisKind = args.basis.into();
    let basis = RecurrenceBasis::from_kind(kind)?;
    let rule = QuadratureRule::for_basis(&basis, args.s)?;
    let manifest = with_output(
        RunManifest::new("nodes")
            .param("basis", kind)
            .param("s", args.s),
        &args.out,
    );
    let mut w = open_output(&args.out)?;
    write_nodes(&mut w, &manifest, &rule)?;
    w.flush()?;
    Ok(())
}

/// Exit code for a failed command: invalid input is a usage error, anything
/// that went wrong inside a computation is a failure.
pub fn exit_code(err: &FracError) -> i32 {
    match err {
        FracError::Domain(_) | FracError::Parse(_) | FracError::Unsupported(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::IntegralErrors(a) => run_integral_errors(a),
        Command::Solve(a) => run_solve(a, stderr),
        Command::Nodes(a) => run_nodes(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
