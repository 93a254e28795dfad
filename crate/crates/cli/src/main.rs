//! `poolchain`: chi-square independence testing and Markov-chain analysis
//! for payer/receiver transfer-pool data.
//!
//! Every subcommand prints a human summary by default and deterministic
//! JSON under `--format json`. Errors land on stderr as one-line JSON with
//! a stable exit code (see `error.rs`).

mod error;
mod input;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use poolchain_core::Correction;

use run::{OutputFormat, Sink};

#[derive(Parser)]
#[command(
    name = "poolchain",
    version,
    about = "Transfer-pool transition analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CorrectionArg {
    /// Plain chi-square statistic.
    None,
    /// Continuity correction: shrink each |O - E| by 0.5 before squaring.
    Yates,
}

impl From<CorrectionArg> for Correction {
    fn from(c: CorrectionArg) -> Self {
        match c {
            CorrectionArg::None => Correction::None,
            CorrectionArg::Yates => Correction::Yates,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a contingency-table CSV: independence test,
    /// transition estimate, projections, stationary distribution, sojourn
    /// times, convergence horizon, and classification.
    Analyze {
        /// CSV of non-negative counts with row and column labels.
        #[arg(long)]
        input: PathBuf,
        /// Continuity correction for the chi-square statistic.
        #[arg(long, value_enum, default_value_t = CorrectionArg::None)]
        correction: CorrectionArg,
        /// Significance level for the independence decision.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Coarsen the estimated matrix to three decimals before any
        /// downstream computation, matching published display arithmetic.
        #[arg(long = "paper-rounding")]
        paper_rounding: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        /// Write the report to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raise a transition matrix to the k-th power: state distribution
    /// k years ahead.
    Project {
        /// CSV transition matrix with matching row and column labels.
        #[arg(long)]
        matrix: PathBuf,
        /// Number of one-year steps.
        #[arg(long)]
        years: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Long-run fraction of time in each state.
    Stationary {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected consecutive years in each state per visit.
    Sojourn {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest k with every k-step row within a tolerance of the limit.
    Horizon {
        #[arg(long)]
        matrix: PathBuf,
        /// Maximum entrywise distance from the limiting matrix.
        #[arg(long, default_value_t = 0.005)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo simulation of many plans under a transition matrix,
    /// reproducible from the seed.
    Simulate {
        #[arg(long)]
        matrix: PathBuf,
        /// Number of independent plans to simulate.
        #[arg(long)]
        plans: u64,
        /// Years per plan, including the initial year.
        #[arg(long)]
        years: u32,
        /// Root seed; the same seed always yields the same report.
        #[arg(long)]
        seed: u64,
        /// Start every plan in this state (default: uniform over states).
        #[arg(long)]
        initial: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Absorbing-chain analysis of the craps pass bet, compared with the
    /// bundled pool's long-run receiver share.
    Craps {
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the published analysis of the bundled payer/receiver data
    /// end to end, using its three-decimal display arithmetic.
    Paper {
        #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(command: Command) -> Result<(), error::CliError> {
    match command {
        Command::Analyze {
            input,
            correction,
            alpha,
            paper_rounding,
            format,
            out,
        } => run::analyze(
            &input,
            correction.into(),
            alpha,
            paper_rounding,
            &Sink {
                format,
                out: out.as_deref(),
            },
        ),
        Command::Project {
            matrix,
            years,
            format,
            out,
        } => run::project(
            &matrix,
            years,
            &Sink {
                format,
                out: out.as_deref(),
            },
        ),
        Command::Stationary {
            matrix,
            format,
            out,
        } => run::stationary(
            &matrix,
            &Sink {
                format,
                out: out.as_deref(),
            },
        ),
        Command::Sojourn {
            matrix,
            format,
            out,
        } => run::sojourn(
            &matrix,
            &Sink {
                format,
                out: out.as_deref(),
            },
        ),
        Command::Horizon {
            matrix,
            tol,
            format,
            out,
        } => run::horizon(
            &matrix,
            tol,
            &Sink {
                format,
                out: out.as_deref(),
            },
        ),
        Command::Simulate {
            matrix,
            plans,
            years,
            seed,
            initial,
            format,
            out,
        } => run::simulate(
            &matrix,
            plans,
            years,
            seed,
            initial.as_deref(),
            &Sink {
                format,
                out: out.as_deref(),
            },
        ),
        Command::Craps { format, out } => run::craps(&Sink {
            format,
            out: out.as_deref(),
        }),
        Command::Paper { format, out } => run::paper(&Sink {
            format,
            out: out.as_deref(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_stderr_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
