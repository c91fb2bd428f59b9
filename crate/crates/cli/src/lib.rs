//! `superwav` command-line frontend: filter spec files in, one JSON report
//! plus optional artifacts out.
//!
//! Exit codes: 0 all verdicts passed, 1 some verdict failed, 2 input or
//! contract error, 3 numeric error.

pub mod commands;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const THREADS_ENV: &str = "SUPERWAV_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] superwav::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        use superwav::Error as E;
        match self {
            CliError::Schema(_) => "schema",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e {
                E::Structural(_) => "structural",
                E::Capacity(_) => "capacity",
                E::Input(_) => "input",
                E::Contract(_) => "contract",
                E::Unsupported(_) => "unsupported",
                E::Precision(_) => "precision",
                E::Numeric(_) => "numeric",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(superwav::Error::Numeric(_) | superwav::Error::Precision(_)) => {
                EXIT_NUMERIC
            }
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    Canonical,
    Hat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMethod {
    Cascade,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyWhat {
    Orthogonality,
    Frame,
    ScalingEq,
}

#[derive(Debug, Parser)]
#[command(
    name = "superwav",
    version,
    about = "Super-wavelets from low-pass filters and their cycles"
)]
pub struct Cli {
    /// Override the default tolerance of every check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Omit the timestamp so reports are byte-for-byte reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Drop unknown spec fields with a warning instead of failing.
    #[arg(long, global = true)]
    pub lenient: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the quadrature mirror condition.
    Qmf { spec: PathBuf },
    /// List the m0-cycles of the filter.
    Cycles {
        spec: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_period: u32,
    },
    /// Lawton matrix spectrum and multiplicity of eigenvalue 1.
    Lawton {
        spec: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_period: u32,
    },
    /// ORTHOGONAL or TIGHT_FRAME_ONLY for a choice of cycles.
    Verdict {
        spec: PathBuf,
        /// "all" or comma-separated indices into the detected cycles.
        #[arg(long, default_value = "all")]
        cycles: String,
        #[arg(long, default_value_t = 6)]
        max_period: u32,
    },
    /// Super-scaling vector by cascade iteration or infinite product.
    Scaling {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = ScalingMethod::Cascade)]
        method: ScalingMethod,
        #[arg(long, default_value_t = superwav::cascade::DEFAULT_MAX_ITER)]
        iterations: usize,
        #[arg(long, value_enum, default_value_t = StartKind::Canonical)]
        start: StartKind,
        /// Dyadic refinement levels of the hat start.
        #[arg(long, default_value_t = 6)]
        hat_levels: u32,
        #[arg(long, default_value_t = 6)]
        max_period: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Complete the filter bank and synthesize the super-wavelets.
    Wavelet {
        spec: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_period: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Orthogonality, frame ratio or scaling equation checks.
    Verify {
        spec: PathBuf,
        #[arg(long, value_enum)]
        what: VerifyWhat,
        #[arg(long, default_value = "all")]
        cycles: String,
        #[arg(long, default_value_t = 6)]
        max_period: u32,
        #[arg(long, default_value = "-8..0", allow_hyphen_values = true)]
        m_range: String,
        #[arg(long, default_value = "-16..16", allow_hyphen_values = true)]
        n_range: String,
        #[arg(long, default_value_t = 0.95)]
        min_ratio: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build filters from cycle data.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Stretch a filter: m(θ) ↦ m(pθ).
    Stretch {
        spec: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Characteristic filter of scale 2 from cycles, e.g. "1/3,2/3;1/5,2/5,4/5,3/5".
    CyclesChar {
        #[arg(long)]
        cycles: String,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Global options shared by every command.
#[derive(Clone, Debug, Default)]
pub struct Ctx {
    pub tol: Option<f64>,
    pub lenient: bool,
}

impl Ctx {
    pub fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Qmf { .. } => "qmf",
            Command::Cycles { .. } => "cycles",
            Command::Lawton { .. } => "lawton",
            Command::Verdict { .. } => "verdict",
            Command::Scaling { .. } => "scaling",
            Command::Wavelet { .. } => "wavelet",
            Command::Verify { .. } => "verify",
            Command::Construct { .. } => "construct cycles-char",
            Command::Stretch { .. } => "stretch",
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = text.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got {text:?}"
        ))
    })?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn dispatch(cli: &Cli, report: &mut Report) -> Result<(), CliError> {
    configure_threads()?;
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be a non-negative number, got {t}"
            )));
        }
    }
    let ctx = Ctx {
        tol: cli.tol,
        lenient: cli.lenient,
    };
    match &cli.command {
        Command::Qmf { spec } => commands::qmf(&ctx, spec, report),
        Command::Cycles { spec, max_period } => commands::cycles(&ctx, spec, *max_period, report),
        Command::Lawton { spec, max_period } => commands::lawton(&ctx, spec, *max_period, report),
        Command::Verdict {
            spec,
            cycles,
            max_period,
        } => commands::verdict(&ctx, spec, cycles, *max_period, report),
        Command::Scaling {
            spec,
            method,
            iterations,
            start,
            hat_levels,
            max_period,
            out,
        } => commands::scaling(
            &ctx,
            &commands::ScalingArgs {
                spec,
                product: *method == ScalingMethod::Product,
                iterations: *iterations,
                start: *start,
                hat_levels: *hat_levels,
                max_period: *max_period,
                out,
            },
            report,
        ),
        Command::Wavelet {
            spec,
            max_period,
            out,
        } => commands::wavelet(&ctx, spec, *max_period, out, report),
        Command::Verify {
            spec,
            what,
            cycles,
            max_period,
            m_range,
            n_range,
            min_ratio,
            out,
        } => commands::verify(
            &ctx,
            &commands::VerifyArgs {
                spec,
                what: *what,
                cycles,
                max_period: *max_period,
                m_range: commands::parse_range(m_range)?,
                n_range: commands::parse_range(n_range)?,
                min_ratio: *min_ratio,
                out: out.as_deref(),
            },
            report,
        ),
        Command::Construct {
            what: Construct::CyclesChar { cycles, out },
        } => commands::construct_cycles_char(&ctx, cycles, out, report),
        Command::Stretch { spec, p, out } => commands::stretch(&ctx, spec, *p, out, report),
    }
}

/// Run an already-parsed command, returning the report and exit code.
pub fn execute(cli: &Cli) -> Report {
    let mut report = Report::new(cli.command.name(), !cli.no_timestamp);
    match dispatch(cli, &mut report) {
        Ok(()) => report.settle(),
        Err(e) => report.fail_with(e.kind(), e.to_string(), e.exit_code()),
    }
    report
}

/// Full entry point: parse arguments, run, emit the report, return the exit code.
pub fn run_command<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let report = execute(&cli);
    let text = report.to_json();
    match &cli.report {
        Some(path) => {
            if let Err(e) = commands::write_atomic(path, text.as_bytes()) {
                eprintln!("superwav: {e}");
                return EXIT_INPUT;
            }
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    if let Some(err) = &report.error {
        eprintln!("superwav: {}", err.message);
    }
    report.exit_code
}
