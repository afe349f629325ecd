//! `rbkit` command-line front end.
//!
//! Every command prints a line-oriented JSON report on stdout, one record
//! per check, in a fixed order. Exit codes: 0 when every check passes, 1 on
//! any failing check, 2 when a flow leaves the half-space, 64 on usage or
//! parse errors. `RBKIT_THREADS` caps the worker pool.

pub mod commands;
pub mod params;
pub mod report;

use std::ffi::OsString;
use std::io;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use params::{parse_params, ParamFile, ParseError};
pub use report::{Record, Report, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ESCAPE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Params { path: String, source: ParseError },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Params { .. } => EXIT_USAGE,
            CliError::Io(_) => EXIT_FAIL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rbkit", version, about = "Exact checks for Killing-field solitons on the hyperbolic half-space")]
struct Cli {
    /// Attach wall-clock timings to report records.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the identity suite for one parameter file plus random trials.
    Verify {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Contact matrix, Pfaffian and top-form check (odd n).
    Contact {
        #[arg(long)]
        params: PathBuf,
    },
    /// Integrate a generator flow and write the trajectory CSV.
    Flow {
        /// D, Tk, Gk, or G (planar, n = 2).
        #[arg(long = "gen")]
        generator: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated starting point.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bracket table, closure and structure constants of the generators.
    Algebra {
        #[arg(long)]
        n: usize,
    },
}

fn load_params(path: &PathBuf) -> Result<rbkit_core::SolitonParams, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_params(&text).map_err(|source| CliError::Params {
        path: path.display().to_string(),
        source,
    })
}

fn emit(report: &Report) -> Result<(), CliError> {
    report.write_to(io::stdout().lock()).map_err(|e| CliError::Io(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let timing = cli.timing;
    let report = match cli.command {
        Command::Verify { params, trials, seed } => commands::verify(&load_params(&params)?, trials, seed, timing),
        Command::Contact { params } => commands::contact(&load_params(&params)?, timing)?,
        Command::Algebra { n } => commands::algebra(n, timing)?,
        Command::Flow {
            generator,
            n,
            point,
            t_max,
            dt,
            out,
        } => {
            let (report, escaped) = commands::flow(&commands::FlowArgs {
                generator: &generator,
                n,
                point: &point,
                t_max,
                dt,
                out: &out,
            })?;
            emit(&report)?;
            return Ok(if escaped { EXIT_ESCAPE } else { EXIT_OK });
        }
    };
    emit(&report)?;
    Ok(if report.any_fail() { EXIT_FAIL } else { EXIT_OK })
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("RBKIT_THREADS") {
        let k: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| CliError::Usage(format!("RBKIT_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| dispatch(cli)));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rbkit: {e}");
            e.exit_code()
        }
    }
}
