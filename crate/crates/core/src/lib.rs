//! Exponentially convergent solver for the m-point nonlocal problem
//!
//!   u' + A u = f(t),   u(0) + Σₖ αₖ u(tₖ) = u₀,
//!
//! with a strongly positive (sectorial) operator A. The solution splits
//! into a homogeneous part e^{-At} B⁻¹ u₀ and a particular part, both
//! represented by Dunford-Cauchy integrals along a hyperbola enveloping
//! the spectrum and discretized by Sinc (trapezoidal) quadratures whose
//! error decays like e^{-c√N}. Each quadrature node costs one resolvent
//! solve; nodes are independent and evaluated concurrently with a
//! deterministic reduction.
//!
//! Entry points:
//! * [`contour`]: spectral/integration hyperbolas and the strip width.
//! * [`symbol`]: the scalar symbol B(z), solvability checks, |B| bound.
//! * [`operators`]: resolvent-action models and the dense reference oracle.
//! * [`solver_hom`] / [`solver_inhom`]: the quadrature solvers.
//! * [`harness`]: convergence studies and published-table reproduction.

pub mod contour;
pub mod error;
pub mod harness;
pub mod operators;
pub mod solver_hom;
pub mod solver_inhom;
pub mod symbol;

pub use contour::{
    family_axes, hyperbola_eval, integration_hyperbola, strip_height, Hyperbola,
    SpectralCharacteristics,
};
pub use error::{Result, SolverError};
pub use symbol::{check_solvability, q_bound, symbol_b, NonlocalSpec, Verdict};
