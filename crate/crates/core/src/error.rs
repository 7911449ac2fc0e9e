use thiserror::Error;

/// Errors produced by the model, the analytic routines and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("vertex index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    #[error("truncation k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("quadrature did not converge for gap {gap} at k = {k}")]
    Quadrature { gap: usize, k: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("conditioning on connectivity exceeded {budget} attempts")]
    RetryBudget { budget: usize },

    #[error("table {table} is not normalized (off by {deviation:e})")]
    Normalization { table: String, deviation: f64 },

    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    /// Bad input, as opposed to a numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::IndexOutOfRange { .. }
                | Error::KOutOfRange { .. }
                | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
