use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// `J - aL` is numerically singular, i.e. `a` is (numerically) an eigenvalue of the pencil.
    #[error("shift {shift} makes J - aL singular (pivot {pivot:e} at step {step})")]
    SingularShift {
        shift: Complex64,
        step: usize,
        pivot: f64,
    },

    /// The transform-domain shift sits on the image of the infinite eigenvalue.
    #[error("shift {mu} coincides with the spurious eigenvalue 1")]
    DegenerateShift { mu: Complex64 },

    #[error("algebraic block J4 is singular")]
    SingularAlgebraicBlock,

    #[error("order {order} exceeds dense cap {cap}")]
    DenseCapExceeded { order: usize, cap: usize },

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("Gram matrix of the iteration block is numerically singular")]
    RankDeficientBasis,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
