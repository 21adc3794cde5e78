//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by samplers, series evaluators and identity checks.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter lies outside its admissible domain. The message names
    /// the violated inequality.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A series failed to meet its truncation rule before the term cap.
    #[error("series did not converge: {0}")]
    NonConvergence(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// Coefficient extraction produced diagnostics beyond thresholds
    /// (residual imaginary parts or negative masses).
    #[error("oracle instability: {0}")]
    OracleInstability(String),

    /// Rejection sampling exceeded its restart cap.
    #[error("rejection sampler exceeded {attempts} restarts")]
    RestartCapExceeded { attempts: usize },

    /// A simulated path did not cross the requested level within the
    /// configured horizon.
    #[error("path did not cross level {level} within {steps} grid steps")]
    GridExhausted { level: f64, steps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
