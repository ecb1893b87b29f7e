//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by simulation, contrast evaluation, quadrature, and sampling.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter vector has the wrong length, lies outside its box, or
    /// violates a family constraint (for example a non-positive variance).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation left the mathematical domain of an operation, such as a
    /// jump coefficient hitting zero or a diffusion coefficient going
    /// non-positive along a path.
    #[error("domain error: {0}")]
    Domain(String),

    /// The simulated state exceeded the overflow guard, signalling an
    /// unstable model/configuration pair.
    #[error("path explosion: |X| exceeded {limit:e} at substep {step}")]
    PathExplosion { step: usize, limit: f64 },

    /// A filter specification is internally inconsistent (rate exponent out
    /// of range, rank count exceeding the number of increments, ...).
    #[error("invalid filter spec: {0}")]
    InvalidFilterSpec(String),

    /// Adaptive quadrature failed to reach the requested relative accuracy.
    #[error("quadrature did not converge to relative {rel_tol:e} ({context})")]
    QuadratureFailure { rel_tol: f64, context: String },

    /// No chain start with a finite log-target was found among the allowed
    /// number of prior draws.
    #[error("chain initialization failed: no finite-log-target start in {attempts} prior draws")]
    InitializationFailure { attempts: usize },

    /// Every grid point of a quadrature-based posterior mean carries zero
    /// posterior mass.
    #[error("degenerate target: zero posterior mass on the whole grid")]
    DegenerateTarget,

    /// A configuration value fails validation before any computation starts.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
