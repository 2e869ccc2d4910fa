use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{column}` in CSV header")]
    Schema { column: String },

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("bin edges do not cover {} value(s): {values:?}", values.len())]
    Coverage { values: Vec<f64> },

    #[error("design matrix is rank deficient; collinear terms: {}", terms.join(", "))]
    Singular { terms: Vec<String> },

    #[error("not enough observations: n = {n} but the model has {p} terms")]
    DegreesOfFreedom { n: usize, p: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no bin contains both groups; the comparison needs extrapolation outside the common support")]
    NoOverlap,

    #[error("insufficient sample size: n = {n}, need at least {min}")]
    InsufficientN { n: usize, min: usize },

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: &'static str, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
