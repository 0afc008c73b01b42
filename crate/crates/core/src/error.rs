//! Error types shared across the workbench.

use thiserror::Error;

/// Errors produced by workbench operations.
///
/// `Input` covers malformed or mismatched data handed to an operation,
/// `Precondition` covers hypotheses of a construction that failed on the
/// given data (the construction itself is fine, the data is not eligible),
/// and `LogBranch` covers plaquette holonomies outside the injectivity
/// radius of the principal matrix logarithm.
#[derive(Debug, Error)]
pub enum YmtError {
    #[error("input error: {0}")]
    Input(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("log branch singularity at plaquette {plaquette} (vertex {vertex}, plane {mu},{nu}): holonomy at distance {distance:.6} >= pi from identity")]
    LogBranch {
        plaquette: usize,
        vertex: usize,
        mu: usize,
        nu: usize,
        distance: f64,
    },
}

impl YmtError {
    pub fn input(msg: impl Into<String>) -> Self {
        YmtError::Input(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        YmtError::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, YmtError>;
