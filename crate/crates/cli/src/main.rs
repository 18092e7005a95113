use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use cds_replica_cli::{
    cmd_calibrate, cmd_implied_repo, cmd_price, cmd_replicate, exit, CliError, Display, MarketConfig,
    ReplicateOptions,
};

/// Stylized CDS replication with repo and cancelable asset swaps.
#[derive(Debug, Parser)]
#[command(name = "cds-replica", version)]
struct Cli {
    /// JSON market configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    /// Show spreads in basis points.
    #[arg(long, global = true)]
    bp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bond, floater, annuity and par spread analytics.
    Price,
    /// Scenario-by-scenario residuals of the replica against the CDS.
    Replicate {
        /// Use a standard asset swap without the default break clause.
        #[arg(long)]
        no_clause: bool,
        /// Also run a Monte Carlo check with this many paths.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Repo and reverse-repo spreads implied by two-way quotes.
    ImpliedRepo,
    /// Flat hazard fitted to `cds_quote`.
    Calibrate,
}

fn emit<T: Serialize>(report: &T, table: impl FnOnce(&T) -> String, pretty: bool) {
    if pretty {
        print!("{}", table(report));
    } else {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let path = cli
        .config
        .ok_or(CliError::Missing("--config <path> is required"))?;
    let cfg = MarketConfig::load(&path)?;
    let display = Display { bp: cli.bp };
    match cli.command {
        Command::Price => {
            emit(&cmd_price(&cfg, display)?, |r| r.table(), cli.pretty);
            Ok(exit::OK)
        }
        Command::Replicate { no_clause, mc, seed } => {
            let opts = ReplicateOptions { no_clause, mc_paths: mc, seed };
            let report = cmd_replicate(&cfg, opts, display)?;
            emit(&report, |r| r.table(), cli.pretty);
            Ok(report.exit_code())
        }
        Command::ImpliedRepo => {
            emit(&cmd_implied_repo(&cfg, display)?, |r| r.table(), cli.pretty);
            Ok(exit::OK)
        }
        Command::Calibrate => {
            emit(&cmd_calibrate(&cfg, display)?, |r| r.table(), cli.pretty);
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
