use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one failure class
/// the CLI reports through its exit code.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph has {vertex_count} vertices; exhaustive enumeration is capped at {limit}")]
    SizeLimit { vertex_count: usize, limit: usize },

    #[error("edge list parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("root iteration did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
        best_iterate: Vec<Complex64>,
    },

    #[error("non-finite function value at {re} + {im}i")]
    NonFinite { re: f64, im: f64 },

    #[error("function vanishes on the contour near {re} + {im}i")]
    ZeroOnContour { re: f64, im: f64 },

    #[error("phase refinement exceeded depth {depth} near {re} + {im}i")]
    RefinementDepth { depth: usize, re: f64, im: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
