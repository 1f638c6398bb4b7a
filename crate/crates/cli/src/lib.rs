//! Library side of the command-line tool: the model/dataset file formats and
//! the report renderers. The binary in `main.rs` is a thin argument-parsing
//! shell over these.

pub mod model_file;
pub mod report;

use std::fmt;

/// Command-level failure, carrying the exit-code contract: validation
/// problems exit 2, infeasible configurations exit 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Infeasible(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<preqnet::Error> for CliError {
    fn from(err: preqnet::Error) -> Self {
        match err {
            preqnet::Error::CompletionCapExceeded { .. }
            | preqnet::Error::ConfigCapExceeded { .. }
            | preqnet::Error::EnumerationBound { .. } => CliError::Infeasible(err.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
