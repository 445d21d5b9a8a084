use thiserror::Error;

/// Errors raised by the solver, the verifiers and the report layer.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameters outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The integrator gave up before reaching the end of the interval or a
    /// classified breakdown.
    #[error("integration error at gamma = {gamma}: {reason}")]
    Integration { gamma: f64, reason: String },

    /// Shooting could not bracket or converge. `history` carries the probes.
    #[error("solver error: {message}")]
    Solver {
        message: String,
        history: Vec<String>,
    },

    #[error("profile error: {0}")]
    Profile(String),

    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
