use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("forbidden measurement outcome at site {site}: probability {probability:e}")]
    ForbiddenOutcome { site: usize, probability: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("infeasible level {level}: boundary value never exceeds {max}")]
    InfeasibleLevel { level: f64, max: f64 },

    #[error("trajectory {index} (seed key {seed:#018x}) failed: {source}")]
    Trajectory {
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("corrupt output {path}: {reason}")]
    Corrupt { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for errors that stem from bad configuration or input rather than
    /// from the numerics themselves.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::Capacity(_)
            | Error::SingularParameter(_)
            | Error::NoSolution(_)
            | Error::InfeasibleLevel { .. }
            | Error::Json(_)
            | Error::Csv(_) => true,
            Error::Trajectory { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}
