use thiserror::Error;

use crate::expr::{DiffError, EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("domain error: {0}")]
    Domain(#[from] EvalError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("point has {got} coordinates but the chart has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point {0:?} is outside the chart domain")]
    NotAdmissible(Vec<f64>),
    #[error("degenerate metric at {point:?}: |det| = {det:e}")]
    DegenerateMetric { point: Vec<f64>, det: f64 },
    #[error("metric signature ({positive},{negative}) is not Riemannian")]
    UnsupportedSignature { positive: usize, negative: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
    #[error("unknown catalog entry `{0}`")]
    UnknownExample(String),
    #[error("Newton solver failed after {iterations} iterations: {reason}")]
    Solver {
        iterations: usize,
        reason: String,
        trace: Vec<f64>,
    },
    #[error("{path}:{line}: {message}")]
    PotentialFile {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
