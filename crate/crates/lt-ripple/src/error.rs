use thiserror::Error;

/// Crate-wide error type.
///
/// The variant prefixes in the display strings are stable: CLI consumers can
/// parse `error: <kind>: <detail>` lines from stderr.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid-parameter: {0}")]
    InvalidParameter(String),

    /// A distribution file failed validation.
    #[error("format-error: {0}")]
    Format(String),

    /// The operation is only defined for small problem sizes.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The active-set solver hit its iteration cap. Carries the best iterate
    /// found so the caller can inspect how close it got.
    #[error("solver-failure: iteration cap {iterations} reached (residual^2 {residual_sq_norm:.3e})")]
    SolverFailure {
        iterations: usize,
        residual_sq_norm: f64,
        best: Box<crate::nnls::NnlsSolution>,
    },

    /// The design system admits no usable solution (e.g. all-zero weights).
    #[error("degenerate-design: {0}")]
    DegenerateDesign(String),

    /// A decoder session was driven outside its contract.
    #[error("session-error: {0}")]
    Session(String),

    #[error("io-error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
