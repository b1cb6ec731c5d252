use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("geometry precondition failed: {0}")]
    Geometry(String),

    #[error("unsupported region overlap between layers {0} and {1}")]
    UnsupportedOverlap(usize, usize),

    /// The leading singularity vanishes here, so the jump in `a` cannot be
    /// read off the data at this point.
    #[error("cancelling case: {0}")]
    CancellingCase(String),

    #[error("limit extrapolation did not converge (residual {residual:.3e}): {values:?}")]
    NonConvergent { residual: f64, values: Vec<f64> },

    #[error("no sign change of the cancellation expression over [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("solver diverged: {0}")]
    Diverged(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
