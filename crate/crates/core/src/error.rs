use thiserror::Error;

/// Failures raised by the banded linear algebra kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix dimension must be positive")]
    InvalidDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// `pivot` is the 1-based position of the first non-positive pivot.
    #[error("matrix is not positive definite (pivot {pivot} is {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
}

/// Errors produced while evaluating conditionals or running a chain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    /// The data mode and link function cannot be combined.
    #[error("incompatible mode and link: {0}")]
    Incompatible(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("numeric failure in {conditional}: {detail}")]
    Numeric {
        conditional: &'static str,
        detail: String,
    },
    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn numeric(conditional: &'static str, detail: impl Into<String>) -> Self {
        Error::Numeric {
            conditional,
            detail: detail.into(),
        }
    }

    /// True when the error (or the error it wraps) is a numerical failure of a
    /// sampler rather than a problem with the inputs.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Linalg(LinalgError::NotPositiveDefinite { .. }) | Error::Numeric { .. } => true,
            Error::AtIteration { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
