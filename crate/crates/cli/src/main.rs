//! Command-line driver: single tracking runs, step-size sweeps, budget
//! tables, closed-form bound reports, and the self-check suites.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 verification failure. Every failure prints exactly one line of the
//! form `error code=<CODE> detail="<reason>"` to stderr.

mod boundscmd;
mod budgetcmd;
mod config;
mod output;
mod runcmd;
mod sweepcmd;
mod verifycmd;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unparsable or contradictory configuration, I/O trouble.
    Config(String),
    /// A solver or factorization failed on valid input.
    Numerical(String),
    /// One or more self-check suites failed.
    Verification(String),
}

impl CliError {
    fn code(&self) -> (&'static str, u8) {
        match self {
            CliError::Config(_) => ("E_CONFIG", 2),
            CliError::Numerical(_) => ("E_NUMERICAL", 3),
            CliError::Verification(_) => ("E_VERIFY", 4),
        }
    }

    fn detail(&self) -> &str {
        match self {
            CliError::Config(d) | CliError::Numerical(d) | CliError::Verification(d) => d,
        }
    }
}

impl From<dpc_core::error::Error> for CliError {
    fn from(e: dpc_core::error::Error) -> Self {
        use dpc_core::error::Error;
        match e {
            Error::NotPositiveDefinite { .. } | Error::SolverStall(_) => {
                CliError::Numerical(e.to_string())
            }
            Error::Graph(_) | Error::Dimension(_) | Error::Config(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dpc",
    about = "Decentralized prediction-correction tracking of time-varying optima",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config file; flags override file values, file overrides defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: $DPC_OUT_DIR, then ./out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Benchmark size: desk (n=10, p=3) or paper (n=50, p=10).
    #[arg(long, global = true, value_name = "desk|paper")]
    scale: Option<String>,
    /// Worker threads for sweep cells.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one trajectory; writes run.csv and run_summary.txt.
    Run,
    /// Sweep the sampling period per variant; writes per-variant CSVs and a
    /// summary with log-log slope fits and bound blocks.
    Sweep,
    /// Print and write the communication-budget allocation table.
    Budget,
    /// Run the self-check suites; exit 0 iff all pass.
    Verify {
        /// Fault injection for suite sanity: none | sign-flip |
        /// ledger-off-by-one.
        #[arg(long, default_value = "none", hide = true, value_name = "FAULT")]
        inject: String,
    },
    /// Evaluate the closed-form tracking bounds for the configured method.
    Bounds,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Config(e.to_string().trim().to_string())),
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let settings = config::Settings::load(
        cli.config.as_deref(),
        cli.out,
        cli.seed,
        cli.scale.as_deref(),
        cli.jobs,
    )?;
    match cli.command {
        Command::Run => runcmd::execute(&settings),
        Command::Sweep => sweepcmd::execute(&settings),
        Command::Budget => budgetcmd::execute(&settings),
        Command::Verify { inject } => verifycmd::execute(&settings, &inject),
        Command::Bounds => boundscmd::execute(&settings),
    }
}

/// The single machine-parsable error line; `{:?}` keeps multi-line details
/// on one escaped line.
fn fail(e: &CliError) -> ExitCode {
    let (code, status) = e.code();
    eprintln!("error code={code} detail={:?}", e.detail());
    ExitCode::from(status)
}
