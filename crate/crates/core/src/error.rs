//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by risk computations, model evaluation, and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alpha: must be in (0, 1], got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("invalid distribution: {message}")]
    InvalidDistribution { message: String },

    #[error("invalid variance: must be strictly positive and finite, got {variance}")]
    InvalidVariance { variance: f64 },

    #[error("invalid parameter `{name}`: {message} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        message: String,
    },

    #[error("unsupported transition: {count} stochastic successors (limit {limit})")]
    UnsupportedTransition { count: usize, limit: usize },

    #[error("invalid mdp: {message}")]
    InvalidMdp { message: String },

    #[error("data error at row {row}: field `{field}` {message}")]
    DataError {
        row: usize,
        field: &'static str,
        message: String,
    },

    #[error("size limit exceeded: {message}")]
    SizeLimit { message: String },

    #[error("method mismatch: solution was produced by {solved} but requested {requested}")]
    MethodMismatch { solved: String, requested: String },

    #[error("internal error: {message}")]
    Internal { message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
