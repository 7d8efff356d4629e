//! Library side of the `blockelim` command-line tool: the subcommand
//! implementations and the benchmark harness. The binary in `main.rs` is a
//! thin clap wrapper around these.

pub mod bench;
pub mod commands;

use std::fmt;

use blockelim::generator::GeneratorError;
use blockelim::graph::PartitionViolation;
use blockelim::model::ModelError;
use blockelim::subsolver::SolveError;

/// Command outcomes that map onto distinct process exit codes:
/// 1 check violation, 2 input/parse error, 3 infeasible, 4 timeout,
/// 5 cap or budget exceeded, 6 internal error.
#[derive(Debug)]
pub enum CliError {
    /// A `check` run that found violations; carries the report.
    CheckFailed(String),
    /// Bad input: file I/O, parse errors, invalid parameters, missing
    /// partitions.
    Input(String),
    /// The instance is infeasible (already reported on stdout).
    Infeasible,
    Timeout,
    /// Width cap, block cap, or node budget exceeded.
    Cap(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Infeasible => 3,
            CliError::Timeout => 4,
            CliError::Cap(_) => 5,
            CliError::Internal(_) => 6,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::CheckFailed(report) => write!(f, "{report}"),
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Infeasible => write!(f, "instance is infeasible"),
            CliError::Timeout => write!(f, "solve timed out"),
            CliError::Cap(msg) => write!(f, "{msg}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GeneratorError> for CliError {
    fn from(e: GeneratorError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PartitionViolation> for CliError {
    fn from(e: PartitionViolation) -> Self {
        CliError::Input(format!("invalid partition: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Timeout => CliError::Timeout,
            SolveError::WidthCapExceeded { .. }
            | SolveError::BlockCapExceeded { .. }
            | SolveError::NodeBudgetExhausted { .. } => CliError::Cap(e.to_string()),
            SolveError::InvalidPartition(_) | SolveError::Graph(_) | SolveError::Model(_) => {
                CliError::Input(e.to_string())
            }
            SolveError::InfeasibleRecord | SolveError::Internal(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}
