use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the verification library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter lies outside the validity range of the requested family.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The request is degenerate and has to go through another entry point.
    #[error("redirect: {0}")]
    Redirect(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical breakdown at index {index}: {detail}")]
    NumericalBreakdown { index: usize, detail: String },

    #[error("eigen-solver failure: {0}")]
    EigenSolver(String),

    #[error("point outside domain: {0}")]
    Domain(String),

    /// `f(z) - x` left the cut plane of the principal logarithm.
    #[error("branch error at z = {z}, x = {x}")]
    Branch { z: Complex64, x: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("inconsistency: {0}")]
    Inconsistency(String),

    #[error("integration did not converge: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
