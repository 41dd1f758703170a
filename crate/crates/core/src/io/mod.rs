//! Text-first file formats for every pipeline artifact.
//!
//! All formats are ASCII with Unix newlines; `#`-prefixed comment lines are
//! permitted after the headers. Floating-point fields are written with
//! Rust's shortest round-trip formatting, so write-then-read is lossless.
//! Parsers reject malformed input instead of repairing it.

mod db;
mod depth;
mod needle;
mod pgm;

pub use db::{read_db, write_db};
pub use depth::{read_depth, write_depth};
pub use needle::{read_needle_map, render_needle_visualization, write_needle_map};
pub use pgm::{read_pgm, write_pgm, write_pgm_with_maxval};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated data: {0}")]
    TruncatedData(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value: {0}")]
    NonFiniteValue(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Data lines of a text body: trims trailing newline handling, skips blank
/// and `#`-comment lines.
fn data_lines(body: &str) -> impl Iterator<Item = &str> {
    body.lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(token: &str, what: &str) -> Result<f64, FormatError> {
    let v: f64 = token
        .parse()
        .map_err(|_| FormatError::InvalidValue(format!("{what}: `{token}`")))?;
    if !v.is_finite() {
        return Err(FormatError::NonFiniteValue(what.to_string()));
    }
    Ok(v)
}

fn parse_usize(token: &str, what: &str) -> Result<usize, FormatError> {
    token
        .parse()
        .map_err(|_| FormatError::MalformedHeader(format!("{what}: `{token}`")))
}
