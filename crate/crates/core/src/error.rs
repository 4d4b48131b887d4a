use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// A column named by the schema is absent, duplicated, or plays two roles.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at data row {row}, column `{column}`: cannot read {value:?} as a finite number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    /// The data violates a structural invariant (n >= 1, intercept all ones, ...).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Gram matrix is rank deficient or too badly conditioned to invert.
    #[error("singular design: condition estimate of the Gram matrix is {condition:e} (limit {limit:e})")]
    Singular { condition: f64, limit: f64 },

    /// The residual variance estimate is not positive, so bridges cannot be normalised.
    #[error("degenerate model: sigma2_hat = {sigma2_hat:e} must be positive (the fit is exact and the test is undefined)")]
    Degenerate { sigma2_hat: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
