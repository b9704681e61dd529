//! Command-line front end. Every subcommand parses flags, calls into the
//! library and writes JSON or CSV; no numerics live here.
//!
//! Exit codes: 0 success, 1 verification failed, 2 domain or convergence
//! error, 3 I/O or schema error. Errors are written to stderr as
//! `{"error": <kind>, "message": <text>}`.
//!
//! `--function` takes a catalog name (`unity`, `perelomov_full`,
//! `perelomov_reduced`, `parity_b`, `parity_perelomov`) or an expression:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | atom
//! atom  := number | 'na' | 'nb' | 'powneg1' '(' expr ')' | '(' expr ')'
//! ```
//!
//! e.g. `1/(na+1)`, `powneg1(nb)*2/(na+nb+2)`. Labels written into provenance
//! (`shifted(f,da,db)`, `photon_added(f,m,n)`, `swapped(f)`, `product(f,g)`,
//! `expr(...)`) are accepted too, so a transformed state can be transformed
//! again without restating its function.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::constructors::{
    build_by_exponential, build_by_recursion, build_parity_superposition, build_perelomov_closed,
    BaseKind, StateKind, StateSpec, Truncation,
};
use crate::error::{Result, TmnlcsError};
use crate::fock::FockLadderState;
use crate::io::{self as tio, parse_truncation, StateSpecFile};
use crate::nlfun::{parse_function, NonlinearFunction};
use crate::sweep::{run_sweep, write_csv, SweepGrid};
use crate::transforms::{kerr_evolve, photon_add, photon_subtract, KerrParams};
use crate::verify::{self, eigen_residual, Check, SuiteGrid, VerificationReport, EIGEN_TOLERANCE};

/// Environment variable overriding the adaptive truncation cap.
pub const MAX_TRUNC_ENV: &str = "TMNLCS_MAX_TRUNC";

#[derive(Debug, Parser)]
#[command(
    name = "tmnlcs",
    version,
    about = "Two-mode nonlinear coherent states on the Fock ladder"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a state from a spec file or inline flags.
    Construct(ConstructArgs),
    /// Photon addition, subtraction or Kerr phase on a state file.
    Transform(TransformArgs),
    /// Kerr evolution of a state file.
    Evolve(EvolveArgs),
    /// Photon-number statistics of a state file.
    Stats(StatsArgs),
    /// Run verification checks and print a report.
    Verify(VerifyArgs),
    /// Kerr-phase sweep as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Route {
    Recursion,
    Exponential,
    /// Perelomov closed form (kind perelomov only).
    Closed,
    /// Two-component superposition (parity kinds only).
    Superposition,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TruncMode {
    Adaptive,
    Fixed,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// StateSpec JSON file; replaces the inline flags.
    #[arg(long, conflicts_with_all = ["kind", "eigenvalue", "q", "function", "trunc_mode", "trunc_param"])]
    pub spec: Option<PathBuf>,
    /// pair | perelomov | parity_pair | parity_perelomov | custom
    #[arg(long)]
    pub kind: Option<String>,
    /// Complex eigenvalue as `re,im` (xi for Perelomov kinds).
    #[arg(long, allow_hyphen_values = true)]
    pub eigenvalue: Option<String>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Catalog name or expression over na, nb (kind custom).
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, value_enum)]
    pub trunc_mode: Option<TruncMode>,
    /// Tail tolerance (adaptive) or N (fixed).
    #[arg(long)]
    pub trunc_param: Option<f64>,
    #[arg(long, value_enum, default_value = "recursion")]
    pub route: Route,
    /// Write the state even if the truncation did not converge.
    #[arg(long)]
    pub allow_unconverged: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("op").required(true).args(["add", "sub", "kerr"])))]
pub struct TransformArgs {
    /// State file (`-` for stdin).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Add M photons to mode a and N to mode b.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    pub add: Option<Vec<u32>>,
    /// Subtract M photons from mode a and N from mode b.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    pub sub: Option<Vec<u32>>,
    /// Kerr phase gamma*t.
    #[arg(long, allow_hyphen_values = true)]
    pub kerr: Option<f64>,
    /// Function the input is a coherent state for; defaults to the one in its provenance.
    #[arg(long)]
    pub function: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub kerr: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteName {
    Default,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("what").required(true).args(["spec", "suite", "input"])))]
pub struct VerifyArgs {
    /// Verify every route for one StateSpec JSON file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Run a named suite.
    #[arg(long, value_enum)]
    pub suite: Option<SuiteName>,
    /// Eigen-residual of a state file (needs --function and --eigenvalue).
    #[arg(short, long, requires_all = ["function", "eigenvalue"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eigenvalue: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep grid JSON file; replaces the inline axes.
    #[arg(long, conflicts_with_all = ["kind", "eigenvalues", "charges", "gamma_t"])]
    pub grid: Option<PathBuf>,
    /// pair | perelomov
    #[arg(long, default_value = "pair")]
    pub kind: String,
    /// `re,im;re,im;...`
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub eigenvalues: String,
    /// `q1,q2,...`
    #[arg(long, default_value = "")]
    pub charges: String,
    /// `g1,g2,...`
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub gamma_t: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct ErrorOutput<'a> {
    error: &'a str,
    message: String,
}

/// Parses `re,im` (or a bare real).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| TmnlcsError::InvalidParameter(format!("bad number `{s}` in `{text}`")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(TmnlcsError::InvalidParameter(format!(
            "expected `re,im`, got `{text}`"
        ))),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, sep: char) -> Result<Vec<T>> {
    text.split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| TmnlcsError::InvalidParameter(format!("bad list entry `{s}`")))
        })
        .collect()
}

fn max_truncation_override() -> Result<Option<usize>> {
    match std::env::var(MAX_TRUNC_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            TmnlcsError::InvalidParameter(format!(
                "{MAX_TRUNC_ENV} must be a positive integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn read_state(path: &Path) -> Result<FockLadderState> {
    tio::state_from_json(&read_text(path)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn inline_spec(args: &ConstructArgs) -> Result<StateSpec> {
    let missing = |flag: &str| TmnlcsError::InvalidParameter(format!("missing --{flag}"));
    let kind_name = args.kind.as_deref().ok_or_else(|| missing("kind"))?;
    let eigenvalue = parse_complex(
        args.eigenvalue
            .as_deref()
            .ok_or_else(|| missing("eigenvalue"))?,
    )?;
    let q = args.q.ok_or_else(|| missing("q"))?;
    let kind = match (kind_name, &args.function) {
        ("custom", Some(f)) => StateKind::Custom(parse_function(f, q)?),
        ("custom", None) => return Err(missing("function")),
        (name, None) => StateKind::from_name(name)?,
        (_, Some(_)) => {
            return Err(TmnlcsError::InvalidParameter(
                "--function is only valid with --kind custom".into(),
            ))
        }
    };
    let mut truncation = Truncation::adaptive();
    match (args.trunc_mode, args.trunc_param) {
        (Some(TruncMode::Fixed), Some(p)) => truncation.mode = parse_truncation("fixed", p)?,
        (Some(TruncMode::Fixed), None) => return Err(missing("trunc-param")),
        (_, Some(p)) => truncation.mode = parse_truncation("adaptive", p)?,
        _ => {}
    }
    Ok(StateSpec::new(kind, eigenvalue, q).with_truncation(truncation))
}

fn cmd_construct(args: &ConstructArgs) -> Result<i32> {
    let mut spec = match &args.spec {
        Some(p) => StateSpecFile::into_spec(serde_json::from_str(&read_text(p)?)?)?,
        None => inline_spec(args)?,
    };
    if let Some(max_n) = max_truncation_override()? {
        spec.truncation.max_n = max_n;
    }
    spec.truncation.allow_unconverged = args.allow_unconverged;
    let state = match args.route {
        Route::Recursion => build_by_recursion(&spec)?,
        Route::Exponential => build_by_exponential(&spec)?,
        Route::Closed => match spec.kind {
            StateKind::Perelomov => {
                build_perelomov_closed(spec.eigenvalue, spec.charge_q, &spec.truncation)?
            }
            _ => {
                return Err(TmnlcsError::InvalidParameter(
                    "--route closed needs kind perelomov".into(),
                ))
            }
        },
        Route::Superposition => {
            let base = match spec.kind {
                StateKind::ParityPair => BaseKind::Pair,
                StateKind::ParityPerelomov => BaseKind::Perelomov,
                _ => {
                    return Err(TmnlcsError::InvalidParameter(
                        "--route superposition needs a parity kind".into(),
                    ))
                }
            };
            build_parity_superposition(base, spec.eigenvalue, spec.charge_q, &spec.truncation)?
        }
    };
    if !state.converged() {
        if !args.allow_unconverged {
            return Err(TmnlcsError::Convergence {
                max_n: state.truncation_n(),
                tail: state.tail_ratio(),
            });
        }
        eprintln!(
            "warning: truncation at N={} did not converge (tail ratio {:e})",
            state.truncation_n(),
            state.tail_ratio()
        );
    }
    emit(args.output.as_deref(), &tio::state_to_json(&state)?)?;
    Ok(0)
}

/// The function named by the latest provenance record that carries one, if it parses.
fn function_from_provenance(state: &FockLadderState) -> Option<NonlinearFunction> {
    let label = state
        .provenance()
        .iter()
        .rev()
        .find_map(|r| r.induced_function_label.as_deref())?;
    parse_function(label, state.charge_q()).ok()
}

fn resolve_function(text: Option<&str>, state: &FockLadderState) -> Result<NonlinearFunction> {
    match text {
        Some(t) => parse_function(t, state.charge_q()),
        None => function_from_provenance(state).ok_or_else(|| {
            TmnlcsError::InvalidParameter(
                "cannot infer the nonlinear function from provenance; pass --function".into(),
            )
        }),
    }
}

fn cmd_transform(args: &TransformArgs) -> Result<i32> {
    let state = read_state(&args.input)?;
    let out = if let Some(gt) = args.kerr {
        kerr_evolve(&state, KerrParams::new(gt)?).0
    } else {
        let f = resolve_function(args.function.as_deref(), &state)?;
        match (&args.add, &args.sub) {
            (Some(mn), None) => photon_add(&state, &f, mn[0], mn[1])?.state,
            (None, Some(mn)) => photon_subtract(&state, &f, mn[0], mn[1])?.state,
            _ => unreachable!("clap enforces exactly one operation"),
        }
    };
    emit(args.output.as_deref(), &tio::state_to_json(&out)?)?;
    Ok(0)
}

fn cmd_evolve(args: &EvolveArgs) -> Result<i32> {
    let state = read_state(&args.input)?;
    let (out, _) = kerr_evolve(&state, KerrParams::new(args.kerr)?);
    emit(args.output.as_deref(), &tio::state_to_json(&out)?)?;
    Ok(0)
}

fn cmd_stats(args: &StatsArgs) -> Result<i32> {
    let state = read_state(&args.input)?;
    let stats = verify::photon_statistics(&state);
    emit(args.output.as_deref(), &tio::to_json_string(&stats)?)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let report = if let Some(p) = &args.spec {
        let spec = tio::spec_from_json(&read_text(p)?)?;
        verify::run_suite(&SuiteGrid::from_specs(vec![spec]))
    } else if let Some(SuiteName::Default) = args.suite {
        verify::run_suite(&SuiteGrid::default_grid())
    } else {
        let path = args.input.as_deref().expect("clap requires one source");
        let state = read_state(path)?;
        let f = resolve_function(args.function.as_deref(), &state)?;
        let alpha = parse_complex(args.eigenvalue.as_deref().unwrap_or("0"))?;
        let mut r = VerificationReport::default();
        r.push(Check::below(
            "eigen_residual",
            eigen_residual(&state, &f, alpha)?,
            EIGEN_TOLERANCE,
        ));
        r
    };
    emit(args.output.as_deref(), &tio::to_json_string(&report)?)?;
    Ok(if report.overall_passed { 0 } else { 1 })
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let grid = match &args.grid {
        Some(p) => serde_json::from_str(&read_text(p)?)?,
        None => SweepGrid {
            kind: args.kind.clone(),
            eigenvalues: parse_list::<String>(&args.eigenvalues, ';')?
                .iter()
                .map(|s| parse_complex(s).map(|c| [c.re, c.im]))
                .collect::<Result<_>>()?,
            charges: parse_list(&args.charges, ',')?,
            gamma_t: parse_list(&args.gamma_t, ',')?,
        },
    };
    let mut truncation = Truncation::adaptive();
    if let Some(max_n) = max_truncation_override()? {
        truncation.max_n = max_n;
    }
    let rows = run_sweep(&grid, &truncation)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    emit(
        args.output.as_deref(),
        &String::from_utf8(buf).expect("csv is UTF-8"),
    )?;
    let all_failed = !rows.is_empty() && rows.iter().all(|r| r.outcome.is_err());
    Ok(if all_failed { 2 } else { 0 })
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Transform(a) => cmd_transform(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

/// Parses arguments, runs, reports errors on stderr, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            let out = ErrorOutput {
                error: e.kind(),
                message: e.to_string(),
            };
            let text = serde_json::to_string(&out).unwrap_or_else(|_| e.to_string());
            eprintln!("{text}");
            e.exit_code()
        }
    }
}
