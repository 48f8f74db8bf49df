//! `hlpicone`: problem files in, residual and comparison reports out.
//!
//! Exit codes: 0 success, 1 residual above threshold / counterexample /
//! anomaly, 2 schema, parse or usage error, 3 integration or shooting
//! failure, 4 theorem hypotheses violated (the report is still written).

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod output;
pub mod problem;

pub use problem::Problem;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad file, schema, coefficient text or flag.
    #[error("{0}")]
    Input(String),
    /// The numerics failed: step underflow, singular coefficient, no eigenvalue.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<hlpicone_core::Error> for CliError {
    fn from(e: hlpicone_core::Error) -> Self {
        use hlpicone_core::Error as E;
        match e {
            E::Parse(_) | E::InvalidParameter(_) | E::Precondition(_) => CliError::Input(e.to_string()),
            E::Domain { .. }
            | E::SingularCoefficient { .. }
            | E::StepUnderflow { .. }
            | E::TooManySteps { .. }
            | E::EmptyDomain(_)
            | E::NotFound(_) => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hlpicone", version, about = "Half-linear Picone identities and Sturm comparison checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    pub problem: PathBuf,
    /// JSON report destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV destination for plot data.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Diff,
    Int,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the first equation from `initial[0]`.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Dump the accepted-step mesh instead of the uniform grid.
        #[arg(long)]
        mesh: bool,
    },
    /// Residuals of one identity.
    Verify {
        #[command(flatten)]
        common: Common,
        /// 1.3, 1.6, 2.3, 2.4 or 2.6.
        #[arg(long)]
        identity: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        /// Variant flag, e.g. bracket_power=as_printed; repeatable.
        #[arg(long = "variant", value_name = "KEY=VAL")]
        variants: Vec<String>,
        #[arg(long)]
        grid: Option<usize>,
        /// Run every variant combination and name the best.
        #[arg(long)]
        sweep: bool,
    },
    /// Sampled check of a comparison theorem.
    Compare {
        #[command(flatten)]
        common: Common,
        /// 1, 2 or c3.
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Smallest Dirichlet (order 2) or clamped (order 4) eigenvalue.
    Eigen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: Option<u8>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hlpicone: {e}");
            e.code()
        }
    }
}
