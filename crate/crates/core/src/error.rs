//! Error types shared across the solver stack.

use thiserror::Error;

/// Errors produced by contour construction, operator models and solvers.
#[derive(Debug, Error)]
pub enum SolverError {
    /// Spectral characteristics violate their invariants (ρ₁ ≥ ρ₀, φ out of
    /// range, non-finite b₀, ...).
    #[error("invalid spectral characteristics: {0}")]
    InvalidCharacteristics(String),

    /// A strip coordinate ν was requested outside [-d₁/2, d₁/2].
    #[error("nu = {nu} outside analyticity strip [-{half_width}, {half_width}]")]
    OutOfStrip { nu: f64, half_width: f64 },

    /// The contour lower bound 1 - Σ|αₖ|e^{-ρ₁tₖ} is not positive, so the
    /// symbol B(z) may vanish inside the integration strip. `dominant_k`
    /// is the index (0-based) of the tₖ with the largest contribution.
    #[error(
        "contour unsafe: 1 - sum |a_k| exp(-rho1 t_k) = {margin} <= 0, \
         dominated by term k={dominant_k} (t={dominant_t}); increase rho1"
    )]
    ContourUnsafe {
        margin: f64,
        dominant_k: usize,
        dominant_t: f64,
    },

    /// Neither solvability condition could be verified and the caller did
    /// not force execution.
    #[error("solvability verdict is Unknown; pass force to run anyway")]
    UnknownVerdict,

    /// The resolvent was requested at (or numerically at) a spectral point.
    #[error("singular resolvent at z = {z}")]
    SingularResolvent { z: num_complex::Complex64 },

    /// A reference-oracle computation failed to converge; tests must abort
    /// rather than silently pass.
    #[error("oracle failure: {0}")]
    OracleFailure(String),

    /// Malformed user input (dimensions, nonlocal point ordering, config values).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Report serialization target could not be written.
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SolverError>;
