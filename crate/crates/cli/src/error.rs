//! CLI error type carrying the process exit code.
//!
//! 0 success, 1 domain error, 2 usage error, 3 non-convergence with
//! partial output written.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    NotConverged(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
            CliError::NotConverged(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::NotConverged(m) => write!(f, "{m}"),
        }
    }
}

impl From<needlecast_core::io::FormatError> for CliError {
    fn from(e: needlecast_core::io::FormatError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<needlecast_core::solver::SolveError> for CliError {
    fn from(e: needlecast_core::solver::SolveError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<needlecast_core::exemplar::DbError> for CliError {
    fn from(e: needlecast_core::exemplar::DbError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<needlecast_core::render::RenderError> for CliError {
    fn from(e: needlecast_core::render::RenderError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<needlecast_core::metrics::MetricsError> for CliError {
    fn from(e: needlecast_core::metrics::MetricsError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}
