use thiserror::Error;

/// Errors produced while fitting a surrogate model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("training set is empty")]
    Empty,
    #[error("inputs and targets differ in length ({inputs} vs {targets})")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("centers {first} and {second} coincide; deduplicate the training set first")]
    DuplicateCenters { first: usize, second: usize },
    #[error("kernel system is singular")]
    Singular,
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("hypervolume is only exact for 2 or 3 objectives (got {0})")]
    UnsupportedDimension(usize),
    #[error("problem has no analytic Pareto front: {0}")]
    UnsupportedProblem(String),
    #[error("evaluation {fe_index} timed out")]
    EvalTimeout { fe_index: usize },
    #[error("evaluator protocol error at evaluation {fe_index}: {message}")]
    Protocol { fe_index: usize, message: String },
    #[error("evaluator failed at evaluation {fe_index}: {message}")]
    EvalFailure { fe_index: usize, message: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
