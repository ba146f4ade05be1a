use thiserror::Error;

/// Errors produced by the solver, its subproblems and the analysis layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("solver failure: {reason} (last gap {last_gap:e})")]
    SolverFailure { reason: String, last_gap: f64 },

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("reference refinement stopped at |theta| = {achieved:e} (target {target:e})")]
    PartialReference {
        achieved: f64,
        target: f64,
        x: Vec<f64>,
    },

    #[error("history and problem do not match: {0}")]
    InvalidPairing(String),

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
