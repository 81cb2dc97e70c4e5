//! Spectral and integration hyperbolas.
//!
//! A sectorial operator has its spectrum inside the sector with vertex
//! (ρ₀, 0) and half-angle φ. The spectral hyperbola passes through the
//! vertex with asymptotes parallel to the sector rays; the integration
//! hyperbola lies strictly to its left, inside the resolvent set, at a
//! position fixed by the strip width d₁. Translating the contour
//! parameter ξ ↦ ξ + iν sweeps a hyperbola family between the shifted
//! vertical line through (ρ₁, 0) and the spectral hyperbola.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};

/// Slack used when clamping arccos arguments against rounding.
const ACOS_CLAMP_SLACK: f64 = 1e-15;

/// Sector data of a strongly positive operator: vertex abscissa ρ₀,
/// half-angle φ, resolvent constant M, and contour shift ρ₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCharacteristics {
    /// Sector vertex abscissa, ρ₀ > 0.
    pub rho0: f64,
    /// Sector half-angle, 0 < φ < π/2.
    pub phi: f64,
    /// Resolvent bound constant, M ≥ 1.
    pub m_const: f64,
    /// Contour shift, 0 ≤ ρ₁ < ρ₀.
    pub rho1: f64,
}

impl SpectralCharacteristics {
    /// Builds validated characteristics with an explicit shift ρ₁.
    pub fn new(rho0: f64, phi: f64, m_const: f64, rho1: f64) -> Result<Self> {
        let s = Self {
            rho0,
            phi,
            m_const,
            rho1,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds characteristics with the default shift ρ₁ = ρ₀/2. A positive
    /// shift is required by the contour lower bound on |B| and widens the
    /// strip beyond π/2 - φ; the midpoint balances strip width against the
    /// e^{-ρ₁tₖ} damping.
    pub fn with_default_shift(rho0: f64, phi: f64, m_const: f64) -> Result<Self> {
        Self::new(rho0, phi, m_const, rho0 / 2.0)
    }

    /// Checks all type invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(SolverError::InvalidCharacteristics(msg));
        if !(self.rho0.is_finite() && self.rho0 > 0.0) {
            return fail(format!("rho0 = {} must be positive", self.rho0));
        }
        if !(self.phi > 0.0 && self.phi < std::f64::consts::FRAC_PI_2) {
            return fail(format!("phi = {} must lie in (0, pi/2)", self.phi));
        }
        if self.m_const.is_nan() || self.m_const < 1.0 {
            return fail(format!("M = {} must be >= 1", self.m_const));
        }
        if !(self.rho1 >= 0.0 && self.rho1 < self.rho0) {
            return fail(format!(
                "rho1 = {} must lie in [0, rho0 = {})",
                self.rho1, self.rho0
            ));
        }
        let b0 = self.b0();
        if !(b0.is_finite() && b0 > 0.0) {
            return fail(format!("b0 = rho0 tan(phi) = {b0} must be finite and positive"));
        }
        Ok(())
    }

    /// Imaginary semi-axis b₀ = ρ₀ tan φ of the spectral hyperbola.
    pub fn b0(&self) -> f64 {
        self.rho0 * self.phi.tan()
    }

    /// √(ρ₀² + b₀²), the common scale of the hyperbola family.
    pub fn radius(&self) -> f64 {
        self.rho0.hypot(self.b0())
    }

    /// Spectral hyperbola through the sector vertex: axes (ρ₀, b₀).
    pub fn spectral_hyperbola(&self) -> Hyperbola {
        Hyperbola {
            a: self.rho0,
            b: self.b0(),
        }
    }
}

/// Hyperbola z(ξ) = a cosh ξ - i b sinh ξ with positive semi-axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperbola {
    /// Real semi-axis.
    pub a: f64,
    /// Imaginary semi-axis.
    pub b: f64,
}

impl Hyperbola {
    /// Point and derivative of the parametrization:
    /// z(ξ) = a cosh ξ - i b sinh ξ, z'(ξ) = a sinh ξ - i b cosh ξ.
    ///
    /// cosh/sinh are evaluated once per |ξ|, so z(-ξ) is the bitwise
    /// conjugate of z(ξ).
    pub fn eval(&self, xi: f64) -> (Complex64, Complex64) {
        let ch = xi.abs().cosh();
        let sh = xi.abs().sinh() * xi.signum();
        // signum(0.0) = 1.0 so sh picks up sinh(0) = 0 exactly.
        let sh = if xi == 0.0 { 0.0 } else { sh };
        let z = Complex64::new(self.a * ch, -self.b * sh);
        let dz = Complex64::new(self.a * sh, -self.b * ch);
        (z, dz)
    }
}

/// Point and derivative on a hyperbola; free-function form of
/// [`Hyperbola::eval`].
pub fn hyperbola_eval(h: &Hyperbola, xi: f64) -> (Complex64, Complex64) {
    h.eval(xi)
}

/// Width d₁ of the strip around the real ξ-axis in which the parametrized
/// integrand extends analytically:
/// d₁ = arccos(ρ₁ / √(ρ₀² + b₀²)) - φ.
pub fn strip_height(spec: &SpectralCharacteristics) -> Result<f64> {
    spec.validate()?;
    let arg = clamp_unit(spec.rho1 / spec.radius());
    let d1 = arg.acos() - spec.phi;
    if !(d1 > 0.0 && d1 < std::f64::consts::FRAC_PI_2) {
        return Err(SolverError::InvalidCharacteristics(format!(
            "strip width d1 = {d1} out of (0, pi/2); rho1 too close to the sector"
        )));
    }
    Ok(d1)
}

/// Integration hyperbola: the ν = 0 member of the translated family,
/// axes a_I = √(ρ₀²+b₀²) cos(d₁/2 + φ), b_I = √(ρ₀²+b₀²) sin(d₁/2 + φ).
pub fn integration_hyperbola(spec: &SpectralCharacteristics) -> Result<Hyperbola> {
    let d1 = strip_height(spec)?;
    let (a, b) = axes_at(spec, d1, 0.0);
    Ok(Hyperbola { a, b })
}

/// Axes (a(ν), b(ν)) of the translated hyperbola at strip coordinate ν:
/// a(ν) = √(ρ₀²+b₀²) cos(d₁/2 + φ - ν), b(ν) = √(ρ₀²+b₀²) sin(d₁/2 + φ - ν).
///
/// ν = d₁/2 yields the spectral hyperbola (a = ρ₀, b = b₀); ν = -d₁/2 the
/// hyperbola through (ρ₁, 0).
pub fn family_axes(spec: &SpectralCharacteristics, nu: f64) -> Result<(f64, f64)> {
    let d1 = strip_height(spec)?;
    let half = d1 / 2.0;
    // Allow a few ulps of slack so endpoint queries survive rounding.
    if nu.abs() > half * (1.0 + 1e-12) {
        return Err(SolverError::OutOfStrip {
            nu,
            half_width: half,
        });
    }
    Ok(axes_at(spec, d1, nu))
}

fn axes_at(spec: &SpectralCharacteristics, d1: f64, nu: f64) -> (f64, f64) {
    let r = spec.radius();
    let ang = d1 / 2.0 + spec.phi - nu;
    (r * ang.cos(), r * ang.sin())
}

fn clamp_unit(x: f64) -> f64 {
    debug_assert!(
        (-1.0 - ACOS_CLAMP_SLACK..=1.0 + ACOS_CLAMP_SLACK).contains(&x),
        "arccos argument {x} far outside [-1, 1]"
    );
    x.clamp(-1.0, 1.0)
}
