//! The `qwres` command line tool.
//!
//! Every subcommand reads a JSON run configuration (see [`qwres::config`]),
//! lets flags override its fields, and writes JSON or CSV to `--out` or stdout.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

mod commands;
mod output;

pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 4;
pub const EXIT_SELFTEST_FAILED: u8 = 70;

#[derive(Debug, Parser)]
#[command(
    name = "qwres",
    version,
    about = "Resonances of finitely perturbed quantum walks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Io {
    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a configuration and summarize it
    Validate(#[command(flatten)] Io),
    /// Resonances with multiplicities, as JSON
    Resonances(#[command(flatten)] Io),
    /// Monic transfer polynomial coefficients, lowest degree first
    Polynomial(#[command(flatten)] Io),
    /// Scattering matrix over a grid of spectral parameters, as CSV
    Scattering {
        #[command(flatten)]
        io: Io,
        /// Grid `re0:re1:n,im`
        #[arg(long = "xi-grid", allow_hyphen_values = true)]
        xi_grid: Option<String>,
    },
    /// Exact time evolution of the configured state, as CSV
    Evolve {
        #[command(flatten)]
        io: Io,
        #[arg(long = "T", value_name = "INT")]
        t_max: Option<usize>,
    },
    /// Resonance expansion coefficients of the configured state
    Expand(#[command(flatten)] Io),
    /// Survival norms, optionally with a decay fit
    Survival {
        #[command(flatten)]
        io: Io,
        #[arg(long = "T", value_name = "INT")]
        t_max: Option<usize>,
        /// Print the fitted decay law instead of the norms
        #[arg(long)]
        fit: bool,
    },
    /// Outgoing resolvent identity residuals over a grid
    ResolventCheck {
        #[command(flatten)]
        io: Io,
        #[arg(long = "xi-grid", allow_hyphen_values = true)]
        xi_grid: Option<String>,
        /// Sites added on each side of the perturbation
        #[arg(long, value_name = "INT")]
        window: Option<usize>,
    },
    /// Splitting of a multiple resonance under coin perturbations
    Split {
        #[command(flatten)]
        io: Io,
        /// Comma-separated perturbation strengths
        #[arg(long, value_name = "LIST")]
        eps: Option<String>,
        /// Perturbation direction; swept when absent
        #[arg(long, allow_hyphen_values = true, value_name = "FLOAT")]
        phi: Option<f64>,
    },
    /// Invariant checks on seeded random walks
    Selftest {
        #[arg(long, value_name = "INT")]
        seed: Option<u64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qwres::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} self-test check(s) failed")]
    SelftestFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => e.exit_code() as u8,
            CliError::Io { .. } => EXIT_IO,
            CliError::SelftestFailed { .. } => EXIT_SELFTEST_FAILED,
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    commands::dispatch(cli.command, stdout)
}

/// Parses `args`, runs, reports errors on stderr and returns the exit status.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
