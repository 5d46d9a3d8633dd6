use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: unsupported domain/boundary pair, bad
    /// resolution, parameter out of range, overlapping intervals, ...
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the validity range of a special-function routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// Internal numerical failure (non-convergence, lost bracket, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The level-set design is degenerate (zero energy density).
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    /// A certified positivity claim failed at index `n`.
    #[error("certification failure: coefficient a_{n} = {value} is not positive")]
    Certification { n: usize, value: f64 },

    /// Truncated observability operator is numerically singular.
    #[error("non-observable at truncation level: lambda_min = {lambda_min}")]
    NonObservable { lambda_min: f64 },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
