use thiserror::Error;

use crate::problems::ValidationReport;

/// Errors raised by the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("coefficient {value} at ({row}, {col}) is outside the crossbar range [0, 1]")]
    MappingRange { row: usize, col: usize, value: f64 },

    #[error("crossbar conductance matrix is numerically singular (condition estimate {condition:e})")]
    SingularArray { condition: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e} below tolerance {tolerance:e})")]
    NotPsd { eigenvalue: f64, tolerance: f64 },

    #[error("right-hand side has nonzero entry {value} in auxiliary row {row}")]
    Layout { row: usize, value: f64 },

    #[error("linear system is singular: {0}")]
    Singular(String),

    #[error("invalid problem:\n{0}")]
    InvalidProblem(ValidationReport),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("problem file format: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
