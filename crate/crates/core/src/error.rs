use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("size error: dimension {dim} exceeds cap {cap}")]
    Size { dim: usize, cap: usize },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("not converged after {iterations} iterations (best value {best})")]
    NotConverged { best: f64, iterations: usize },
    #[error("numerical error: {msg} (iterations {iterations}, residual {residual:e})")]
    Numerical {
        msg: String,
        iterations: usize,
        residual: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
