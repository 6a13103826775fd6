use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the command-line tool to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree {requested} exceeds the capacity {cap}")]
    DegreeTooHigh { requested: usize, cap: usize },

    #[error("input is outside the range of the transform: {0}")]
    NotInRange(String),

    #[error("rule exact to degree {have} but degree {need} is required")]
    InsufficientRule { have: usize, need: usize },

    #[error("series truncated at degree {degree} leaves tail {tail:e}; degree {required} is needed")]
    TruncationTooCoarse { degree: usize, required: usize, tail: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("no positive cubature: {0}")]
    Infeasible(String),

    #[error("lattice violates the separation/covering conditions: {0}")]
    LatticeViolation(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(String),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::IndexOutOfRange(_)
            | Error::InvalidParameter(_)
            | Error::DegreeTooHigh { .. }
            | Error::NotInRange(_)
            | Error::InsufficientRule { .. }
            | Error::TruncationTooCoarse { .. } => ErrorKind::Validation,
            Error::Singular(_) | Error::Infeasible(_) | Error::LatticeViolation(_) | Error::Numerical(_) => {
                ErrorKind::Numerical
            }
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Format(_) => ErrorKind::Io,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
