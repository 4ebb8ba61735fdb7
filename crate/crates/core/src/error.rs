use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the supported domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at (or numerically at) a pole.
    #[error("singularity: {0}")]
    Singularity(String),
    /// Result exceeds the representable floating-point range.
    #[error("overflow: {0}")]
    Overflow(String),
    /// A quadrature or series did not reach the requested accuracy.
    #[error("accuracy not reached: {0}")]
    Accuracy(String),
    /// Input violates a documented precondition of the model.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// An input object does not satisfy its own invariant.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Inconsistent combination of request options.
    #[error("configuration error: {0}")]
    Config(String),
    /// A non-finite intermediate value was produced.
    #[error("non-finite intermediate in {0}")]
    NonFinite(String),
}

impl Error {
    /// True for errors caused by the caller's request rather than by numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Precondition(_) | Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
