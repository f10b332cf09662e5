use thiserror::Error;

/// Errors raised by the gate simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or step-control budget ran out before the tolerance was met.
    #[error("convergence error: {message} (best estimate {best_estimate}, error estimate {error_estimate:e})")]
    Convergence {
        message: String,
        best_estimate: num_complex::Complex64,
        error_estimate: f64,
    },

    /// The measurement outcome has vanishing probability, so the conditional state is undefined.
    #[error("zero-probability outcome: P = {0:e} is below the 1e-300 floor")]
    ZeroProbability(f64),

    /// The two cat components cancel exactly.
    #[error("degenerate superposition: normalization denominator vanishes")]
    DegenerateSuperposition,

    /// An internal consistency check failed.
    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
