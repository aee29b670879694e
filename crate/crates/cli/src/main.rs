mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

/// Generation of N-photon generalized binomial states by sequential
/// atom-cavity interactions.
#[derive(Debug, Parser)]
#[command(name = "ngbs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan and run the protocol for one target state.
    Generate(commands::GenerateArgs),
    /// Computed coefficient mismatches next to the tabulated reference values.
    Table(commands::TableArgs),
    /// Check the dispersive CNOT against the ideal truth table.
    Cnot(commands::CnotArgs),
    /// Timing-error, lifetime and photon-number estimates plus a jitter study.
    Feasibility(commands::FeasibilityArgs),
    /// Total probability and fidelity over a grid of N and p.
    Sweep(commands::SweepArgs),
}

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid parameters, exit code 2.
    Usage(String),
    /// Anything that goes wrong after validation, exit code 1.
    Compute(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Compute(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Table(a) => commands::table(a),
        Command::Cnot(a) => commands::cnot(a),
        Command::Feasibility(a) => commands::feasibility(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
