//! Error taxonomy. Validation errors (bad parameters, malformed config)
//! are distinguished from runtime errors (numerical aborts, I/O) so the
//! CLI can map them to distinct exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Configuration file is malformed or contains unknown keys.
    #[error("config error: {0}")]
    Config(String),

    /// A field query fell outside the generated band.
    #[error("query outside generated band: y = {y}, band = [{lo}, {hi}]")]
    OutOfBand { y: f64, lo: f64, hi: f64 },

    /// The front developed a slope beyond the cap; the graph description
    /// has broken down and the run is aborted rather than silently wrong.
    #[error("slope cap exceeded at node {node}: |slope| = {slope:.3e} > {cap:.3e}")]
    SlopeCap { node: usize, slope: f64, cap: f64 },

    /// A non-finite number appeared in a state that must stay finite.
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    /// Bisection could not establish a pinned/ballistic bracket.
    #[error("bracketing failed: {0}")]
    Bracket(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors the user can fix by correcting inputs; the CLI maps
    /// these to a different exit code than runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParam(_) | Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
