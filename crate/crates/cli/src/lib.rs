//! Command-line front end: configuration, orchestration and artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::CliError;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SIGNGUARD_THREADS";

#[derive(Debug, Parser)]
#[command(name = "signguard", version, about = "Equilibrium detection rules for tampered coded road signs")]
pub struct Cli {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Symbol error probability of the channel.
    #[arg(long, global = true)]
    pub pe: Option<f64>,
    /// Code parameters as n,k,d,q.
    #[arg(long, global = true)]
    pub code: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the detection game for one code and channel.
    Solve,
    /// Reproduce a reference table (I, II, III, IV, V or all).
    Tables { id: String },
    /// Monte Carlo run of channel, decoder and equilibrium alert rule without an attacker.
    Simulate {
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Exact best response over the full word space against the equilibrium rule.
    Oracle,
    /// Tabulate the channel distance transition probabilities.
    Rho {
        /// Only this starting distance.
        #[arg(long)]
        n1: Option<usize>,
    },
    /// Figure datasets (fig4, fig5, fig6).
    Figures { id: String },
}

/// What a successful command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = commands::load_config(cli)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    match &cli.command {
        Command::Solve => commands::solve(&cfg, &cli.out),
        Command::Tables { id } => commands::tables(&cfg, &cli.out, id),
        Command::Simulate { trials } => commands::simulate(&cfg, &cli.out, *trials),
        Command::Oracle => commands::oracle(&cfg, &cli.out),
        Command::Rho { n1 } => commands::rho(&cfg, &cli.out, *n1),
        Command::Figures { id } => commands::figures(&cfg, &cli.out, id),
    }
}
