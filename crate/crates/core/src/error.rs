//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by profile ingestion, optimization, simulation and the
/// sensitivity engine.
#[derive(Debug, Error)]
pub enum Error {
    /// A profile CSV could not be parsed into 24 hourly values.
    #[error("malformed profile file {path}: {reason}")]
    MalformedFile { path: PathBuf, reason: String },

    /// A profile value was negative (all profile kinds are nonnegative).
    #[error("negative value {value} at hour {hour} in {path}")]
    NegativeValue {
        path: PathBuf,
        hour: usize,
        value: f64,
    },

    /// Requested profile shift exceeds half a day.
    #[error("shift offset {0} exceeds the supported range of +/-12 hours")]
    OffsetTooLarge(i64),

    /// A type invariant was violated while constructing a domain value.
    #[error("invalid {what}: {reason}")]
    InvalidInput { what: &'static str, reason: String },

    /// The linear program has no feasible point. With unbounded grid
    /// purchases this indicates an internal formulation bug.
    #[error("optimization problem is infeasible (internal error)")]
    Infeasible,

    /// The simplex iteration cap was exceeded or the solution failed
    /// post-solve validation.
    #[error("LP solver failure: {0}")]
    SolverFailure(String),

    /// A plan was executed against a horizon it was not built for.
    #[error("plan horizon {actual} does not match expected {expected}")]
    PlanMismatch { expected: usize, actual: usize },

    /// The requested dimension exceeds the embedded direction-number table.
    #[error("Sobol dimension {requested} unsupported (table holds {max})")]
    DimensionUnsupported { requested: usize, max: usize },

    /// The model output is constant; sensitivity indices are undefined.
    #[error("model output variance is zero; sensitivity indices undefined")]
    VarianceZero,

    /// An experiment configuration failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input data (files, config), as opposed
    /// to failures inside a computation.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedFile { .. }
                | Error::NegativeValue { .. }
                | Error::OffsetTooLarge(_)
                | Error::InvalidInput { .. }
                | Error::InvalidConfig(_)
                | Error::Io { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
