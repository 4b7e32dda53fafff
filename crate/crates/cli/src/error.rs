use std::fmt;

use serde::Serialize;
use signguard_core::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration or flags (exit 2).
    Config(String),
    /// A hard tolerance check failed (exit 3).
    Tolerance(String),
    /// Solver or construction invariant violated (exit 4).
    Invariant(String),
    /// Could not write an artifact (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::Invariant(_) | CliError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Tolerance(_) => "tolerance",
            CliError::Invariant(_) => "invariant",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Tolerance(m) | CliError::Invariant(m) | CliError::Io(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            message: &'a str,
            exit_code: i32,
        }
        serde_json::to_string(&Body { error: self.kind(), message: self.message(), exit_code: self.exit_code() }).expect("plain strings serialize")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} error: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidCode(_)
            | Error::NotReedSolomon(_)
            | Error::UnsupportedField(_)
            | Error::SymbolOutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::BoundExceeded { .. }
            | Error::NotMds { .. }
            | Error::InvalidChannel(_)
            | Error::DistanceOutOfRange { .. }
            | Error::InvalidWeights(_)
            | Error::InvalidPrior(_)
            | Error::RelaxationTooSmall { .. } => CliError::Config(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
