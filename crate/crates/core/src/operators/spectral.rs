//! Diagonal sine-mode model of the Dirichlet Laplacian on (0, 1).
//!
//! Vectors are sine-series coefficients; the resolvent acts mode-wise,
//! c_k ↦ c_k / (z - (kπ)²). This is the exact-in-space model behind the
//! convergence studies: reported errors are purely quadrature errors.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::contour::SpectralCharacteristics;
use crate::error::{Result, SolverError};
use crate::operators::OperatorModel;

/// Relative distance to an eigenvalue below which the resolvent is
/// treated as singular.
const EIGEN_GUARD: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct SpectralModeModel {
    n_modes: usize,
    eigenvalues: Vec<f64>,
    spec: SpectralCharacteristics,
}

impl SpectralModeModel {
    /// Model with the default contour placement: ρ₀ = (1 - margin)·π² with
    /// margin 0.05, φ = π/6, ρ₁ = ρ₀/2.
    pub fn new(n_modes: usize) -> Result<Self> {
        Self::with_contour(n_modes, 0.05, PI / 6.0, 0.5)
    }

    /// Model with explicit contour placement: ρ₀ = (1 - rho0_margin)·λ₁,
    /// half-angle φ, shift ρ₁ = rho1_frac·ρ₀.
    pub fn with_contour(
        n_modes: usize,
        rho0_margin: f64,
        phi: f64,
        rho1_frac: f64,
    ) -> Result<Self> {
        if n_modes == 0 {
            return Err(SolverError::InvalidInput("n_modes must be >= 1".into()));
        }
        let lambda1 = PI * PI;
        let rho0 = (1.0 - rho0_margin) * lambda1;
        let spec = SpectralCharacteristics::new(rho0, phi, 2.0, rho1_frac * rho0)?;
        let eigenvalues = (1..=n_modes)
            .map(|k| (k as f64 * PI) * (k as f64 * PI))
            .collect();
        Ok(Self {
            n_modes,
            eigenvalues,
            spec,
        })
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// Evaluates a coefficient vector as a function at x: Σ c_k sin(kπx).
    pub fn eval_at(&self, coeffs: &[Complex64], x: f64) -> Complex64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * ((i + 1) as f64 * PI * x).sin())
            .sum()
    }
}

impl OperatorModel for SpectralModeModel {
    fn dim(&self) -> usize {
        self.n_modes
    }

    fn spectral_characteristics(&self) -> &SpectralCharacteristics {
        &self.spec
    }

    fn resolvent_apply(&self, z: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n_modes {
            return Err(SolverError::InvalidInput(format!(
                "vector length {} != n_modes {}",
                v.len(),
                self.n_modes
            )));
        }
        let mut out = Vec::with_capacity(self.n_modes);
        for (c, &lam) in v.iter().zip(&self.eigenvalues) {
            let den = z - lam;
            if den.norm() <= EIGEN_GUARD * lam {
                return Err(SolverError::SingularResolvent { z });
            }
            out.push(c / den);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::test_support::resolvent_identity_residual;
    use crate::contour::integration_hyperbola;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_action_mode_one() {
        let m = SpectralModeModel::new(3).unwrap();
        let v = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        // z = 0: -v/pi^2
        let r = m.resolvent_apply(c(0.0, 0.0), &v).unwrap();
        assert!((r[0] - c(-1.0 / (PI * PI), 0.0)).norm() < 1e-16);
        // z = 2 pi^2: v/pi^2
        let r = m.resolvent_apply(c(2.0 * PI * PI, 0.0), &v).unwrap();
        assert!((r[0] - c(1.0 / (PI * PI), 0.0)).norm() < 1e-16);
    }

    #[test]
    fn eigenvalue_hit_is_singular() {
        let m = SpectralModeModel::new(2).unwrap();
        let r = m.resolvent_apply(c(4.0 * PI * PI, 0.0), &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(r, Err(SolverError::SingularResolvent { .. })));
    }

    #[test]
    fn default_contour_placement() {
        let m = SpectralModeModel::new(1).unwrap();
        let s = m.spectral_characteristics();
        assert!((s.rho0 - 0.95 * PI * PI).abs() < 1e-12);
        assert!((s.phi - PI / 6.0).abs() < 1e-15);
        assert!((s.rho1 - s.rho0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn resolvent_identity_on_contour() {
        let m = SpectralModeModel::new(4).unwrap();
        let h = integration_hyperbola(m.spectral_characteristics()).unwrap();
        let (z1, _) = h.eval(0.4);
        let (z2, _) = h.eval(-1.3);
        let v = vec![c(0.3, -0.1), c(1.0, 0.2), c(-0.5, 0.9), c(0.05, 0.0)];
        let res = resolvent_identity_residual(&m, z1, z2, &v);
        assert!(res <= 1e-12, "identity residual {res}");
    }

    #[test]
    fn linearity() {
        let m = SpectralModeModel::new(3).unwrap();
        let z = c(1.0, -4.0);
        let v = vec![c(1.0, 2.0), c(-0.3, 0.4), c(0.0, 1.0)];
        let w = vec![c(0.5, -1.0), c(2.0, 0.0), c(-1.0, -1.0)];
        let a = c(0.7, 0.3);
        let b = c(-1.2, 0.9);
        let combo: Vec<Complex64> = v.iter().zip(&w).map(|(x, y)| a * x + b * y).collect();
        let lhs = m.resolvent_apply(z, &combo).unwrap();
        let rv = m.resolvent_apply(z, &v).unwrap();
        let rw = m.resolvent_apply(z, &w).unwrap();
        for i in 0..3 {
            let rhs = a * rv[i] + b * rw[i];
            assert!((lhs[i] - rhs).norm() <= 1e-12 * rhs.norm().max(1e-12));
        }
    }

    #[test]
    fn eval_at_midpoint() {
        let m = SpectralModeModel::new(2).unwrap();
        let v = vec![c(2.0, 0.0), c(3.0, 0.0)];
        // sin(pi/2) = 1, sin(pi) = 0
        let y = m.eval_at(&v, 0.5);
        assert!((y - c(2.0, 0.0)).norm() < 1e-14);
    }
}
