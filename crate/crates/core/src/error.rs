use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, FracError>;

#[derive(Debug, Error)]
pub enum FracError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A parameter combination outside the regime an estimate holds in
    /// (for instance `s p <= 1` for the Hardy inequality).
    #[error("regime violated: {0}")]
    Regime(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    /// The iteration budget ran out. Carries the last iterate (nodal values)
    /// and its Rayleigh quotient so callers can inspect or restart.
    #[error("no convergence after {iterations} iterations (last value {last_value:.6e}, residual {residual:.3e})")]
    Convergence {
        iterations: usize,
        last_value: f64,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl FracError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        FracError::InvalidInput(msg.into())
    }

    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        FracError::Regime(msg.into())
    }
}
