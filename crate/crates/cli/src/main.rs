//! `chemotaxis`: train and evaluate curvature-steering swimmers from the command line.
//!
//! Exit status: 0 on success, 2 for configuration errors, 3 for I/O or
//! weight-file errors, 4 for training or evaluation faults.

mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Fault(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Fault(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Fault(m) => write!(f, "{m}"),
        }
    }
}

impl From<chemotaxis::Error> for CliError {
    fn from(e: chemotaxis::Error) -> Self {
        use chemotaxis::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::Dimension { .. } => CliError::Config(e.to_string()),
            E::Persistence(_) => CliError::Io(e.to_string()),
            E::Training(_) | E::Episode { .. } => CliError::Fault(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "chemotaxis", version, about = "Self-learned chemotaxis of a planar swimmer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a Q-network; writes weights.json and training_curve.csv.
    Train(Overrides),
    /// Run a cohort with one policy; writes per-cell CSVs and summary.csv.
    Evaluate(Overrides),
    /// Run networks and both baselines on paired spawns; writes comparison.csv.
    Compare(Overrides),
    /// Like `evaluate`, for the greedy or swinging policy without weights.
    Baseline(Overrides),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(o) => commands::train(&RunConfig::from_flags(&o)?),
        Command::Evaluate(o) => commands::evaluate(&RunConfig::from_flags(&o)?),
        Command::Compare(o) => commands::compare(&RunConfig::from_flags(&o)?),
        Command::Baseline(o) => commands::baseline(&RunConfig::from_flags(&o)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
