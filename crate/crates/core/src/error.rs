use thiserror::Error;

use crate::integrator::Trajectory;

/// Errors raised by the numerics, the integrators and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is numerically singular (pivot {pivot:e} below {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error(
        "basis function {index} is nearly dependent on its predecessors (residual ratio {ratio:e})"
    )]
    DegenerateBasis { index: usize, ratio: f64 },

    #[error("singular interpolation: {0}")]
    SingularInterpolation(String),

    #[error("invalid frequency: v = {v} makes the scheme coefficients singular")]
    InvalidFrequency { v: f64 },

    #[error("invalid method: {0}")]
    InvalidMethod(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("fixed-point iteration produced a non-finite state at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error(
        "fixed-point iteration did not converge in {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("integration aborted at step {step}: {source}")]
    Aborted {
        step: usize,
        #[source]
        source: Box<Error>,
        partial: Box<Trajectory>,
    },

    #[error("problem '{0}' has no closed-form exact solution")]
    NoExactSolution(String),

    #[error("system validation failed: {0}")]
    InvalidSystem(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
