//! Scalar nonlocal symbol B(z) = 1 + Σₖ αₖ e^{-z tₖ}, solvability checks,
//! and the lower bound certifying that B does not vanish along the contour.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::SpectralCharacteristics;
use crate::error::{Result, SolverError};

/// Coefficients and points of the m-point condition
/// u(0) + Σₖ αₖ u(tₖ) = u₀ on [0, T]. m = 0 is the plain initial-value
/// problem with B ≡ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NonlocalSpecRaw")]
pub struct NonlocalSpec {
    alphas: Vec<f64>,
    times: Vec<f64>,
    horizon: f64,
}

/// Shadow struct routing deserialization through the validating
/// constructor.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NonlocalSpecRaw {
    alphas: Vec<f64>,
    times: Vec<f64>,
    horizon: f64,
}

impl TryFrom<NonlocalSpecRaw> for NonlocalSpec {
    type Error = SolverError;
    fn try_from(raw: NonlocalSpecRaw) -> Result<Self> {
        NonlocalSpec::new(raw.alphas, raw.times, raw.horizon)
    }
}

impl NonlocalSpec {
    /// Validates 0 < t₁ < t₂ < … < t_m ≤ T.
    pub fn new(alphas: Vec<f64>, times: Vec<f64>, horizon: f64) -> Result<Self> {
        if alphas.len() != times.len() {
            return Err(SolverError::InvalidInput(format!(
                "{} coefficients vs {} points",
                alphas.len(),
                times.len()
            )));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(SolverError::InvalidInput(format!(
                "horizon T = {horizon} must be positive"
            )));
        }
        let mut prev = 0.0;
        for &t in &times {
            if t.is_nan() || t <= prev {
                return Err(SolverError::InvalidInput(format!(
                    "nonlocal points must be strictly increasing and positive, got t = {t} after {prev}"
                )));
            }
            prev = t;
        }
        if prev > horizon {
            return Err(SolverError::InvalidInput(format!(
                "t_m = {prev} exceeds horizon T = {horizon}"
            )));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(SolverError::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self {
            alphas,
            times,
            horizon,
        })
    }

    /// Pure initial-value problem (m = 0).
    pub fn initial_value(horizon: f64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), horizon)
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

/// Which existence/uniqueness condition the coefficients satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Σ|αᵢ| < 1.
    Um1,
    /// Σ|αᵢ| e^{-ρ₀ tᵢ} < 1.
    Um2,
    /// Neither condition holds; solvers refuse unless forced.
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Um1 => write!(f, "UM1"),
            Verdict::Um2 => write!(f, "UM2"),
            Verdict::Unknown => write!(f, "Unknown"),
        }
    }
}

/// Checks the two sufficient solvability conditions in order.
pub fn check_solvability(nl: &NonlocalSpec, spec: &SpectralCharacteristics) -> Verdict {
    let s1: f64 = nl.alphas.iter().map(|a| a.abs()).sum();
    if s1 < 1.0 {
        return Verdict::Um1;
    }
    let s2: f64 = nl
        .alphas
        .iter()
        .zip(&nl.times)
        .map(|(a, t)| a.abs() * (-spec.rho0 * t).exp())
        .sum();
    if s2 < 1.0 {
        Verdict::Um2
    } else {
        Verdict::Unknown
    }
}

/// B(z) = 1 + Σₖ αₖ e^{-z tₖ}.
pub fn symbol_b(nl: &NonlocalSpec, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (&a, &t) in nl.alphas.iter().zip(&nl.times) {
        acc += a * (-z * t).exp();
    }
    acc
}

/// Q = (1 - Σₖ|αₖ| e^{-ρ₁ tₖ})⁻¹, certifying |B(z(ξ))| ≥ 1/Q on every
/// contour whose real semi-axis is at least ρ₁.
///
/// The bound is taken at ρ₁ (not ρ₀) because that is what the quadrature
/// estimate along the translated hyperbola family actually needs.
pub fn q_bound(nl: &NonlocalSpec, spec: &SpectralCharacteristics) -> Result<f64> {
    let mut sum = 0.0;
    let mut dominant = (0usize, f64::NEG_INFINITY);
    for (k, (&a, &t)) in nl.alphas.iter().zip(&nl.times).enumerate() {
        let term = a.abs() * (-spec.rho1 * t).exp();
        if term > dominant.1 {
            dominant = (k, term);
        }
        sum += term;
    }
    let margin = 1.0 - sum;
    if margin <= 0.0 {
        return Err(SolverError::ContourUnsafe {
            margin,
            dominant_k: dominant.0,
            dominant_t: nl.times[dominant.0],
        });
    }
    Ok(1.0 / margin)
}
