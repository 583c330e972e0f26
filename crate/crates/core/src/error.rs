use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The denominator was not strictly positive at a feasible point.
    #[error("denominator g = {value:e} is not positive at iterate {iteration}")]
    PositivityViolation { iteration: usize, value: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    /// The supplied shift was not a lower bound of f/g along the iterates.
    #[error(
        "shifted ratio {value:e} is negative at iterate {iteration}; shift is not a lower bound"
    )]
    ShiftViolation { iteration: usize, value: f64 },

    #[error("invalid starting point: f(x0) = {f0:e} must be <= 0")]
    InvalidStart { f0: f64 },

    #[error("inner solver did not converge at outer iteration {outer}")]
    InnerSolverFailure { outer: usize },

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("parse error at row {row}{}: {message}", col.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        row: usize,
        col: Option<usize>,
        message: String,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate series: sample standard deviation is zero")]
    DegenerateSeries,

    #[error("wealth wiped out at period {period}")]
    WealthWipeout { period: usize },

    #[error("at period {period}: {source}")]
    AtPeriod {
        period: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Solver,
    Data,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) | Error::InvalidStart { .. } => ErrorClass::Usage,
            Error::Parse { .. }
            | Error::InsufficientData(_)
            | Error::DegenerateModel(_)
            | Error::DegenerateSeries
            | Error::WealthWipeout { .. }
            | Error::Io(_)
            | Error::Json(_) => ErrorClass::Data,
            Error::AtPeriod { source, .. } => source.class(),
            _ => ErrorClass::Solver,
        }
    }
}
