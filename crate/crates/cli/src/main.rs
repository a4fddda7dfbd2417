mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "hetnet-market",
    version,
    about = "Pricing/bandwidth equilibria for two-tier wireless markets with small-cell floors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Optimal bandwidth split, prices, revenue and welfare for one provider
    Monopoly(CommonArgs),
    /// Constrained duopoly equilibrium with region label and residuals
    Duopoly(CommonArgs),
    /// Equilibrium region for every point of a floor grid (CSV)
    Regions(CommonArgs),
    /// Welfare sweep over partitions of new small-cell-only bandwidth (CSV)
    Sweep(CommonArgs),
    /// Cross-check the analytic solvers against brute-force grid oracles
    Verify(CommonArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Scenario file (TOML)
    #[arg(long)]
    pub scenario: PathBuf,

    /// Write output here instead of the scenario's `output.path` or stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Grid points (regions: per floor axis, sweep: partition points)
    #[arg(long)]
    pub grid: Option<usize>,

    /// Override the per-provider floors, e.g. `--floors 0.5,0.25`
    #[arg(long, value_delimiter = ',')]
    pub floors: Option<Vec<f64>>,

    /// Override the regulator's new bandwidth
    #[arg(long = "b-new")]
    pub b_new: Option<f64>,

    /// Output format (defaults: human for monopoly/duopoly/verify, csv otherwise)
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Human,
}

/// Input problems exit 1, solver diagnostics exit 2.
pub enum CliError {
    Input(String),
    Solver(String),
}

impl From<hetnet_market::Error> for CliError {
    fn from(err: hetnet_market::Error) -> Self {
        use hetnet_market::Error::*;
        match err {
            InvalidParameter { .. }
            | InvalidPrice(_)
            | InvalidAllocation { .. }
            | InvalidFloor { .. } => CliError::Input(err.to_string()),
            _ => CliError::Solver(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("input error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Solver(msg)) => {
            eprintln!("solver diagnostic: {msg}");
            ExitCode::from(2)
        }
    }
}
