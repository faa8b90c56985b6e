use thiserror::Error;

/// Errors raised by tensor, symbol, dynamics and model operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid size vector {0:?}: every dimension must be at least 1")]
    InvalidSize(Vec<usize>),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("ensemble size mismatch: {left} vs {right}")]
    EnsembleSize { left: usize, right: usize },

    #[error("state diverged (non-finite entry) at step {step}, t = {t}")]
    Divergence { step: usize, t: f64 },

    #[error("invalid integrator settings: {0}")]
    Integrator(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}
