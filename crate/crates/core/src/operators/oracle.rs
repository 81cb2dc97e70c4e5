//! Dense reference oracle: e^{-At}v by scaling-and-squaring, the
//! variation-of-constants integral by adaptive quadrature, and the m-point
//! problem by a direct dense solve of B W = B u₀ - u₀ + Σ αᵢ ∫ e^{-A(tᵢ-τ)}f dτ.
//!
//! Desk-scale only (dim ≤ 64); used to freeze expected values for the
//! contour solvers, never by them.

use crate::error::{Result, SolverError};
use crate::operators::dense::{adaptive_simpson_vec, DenseMatrix};
use crate::symbol::NonlocalSpec;

/// Absolute tolerance of the variation-of-constants quadrature.
const CONV_TOL: f64 = 1e-12;

pub struct ExpmOracle {
    a: DenseMatrix,
}

impl ExpmOracle {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        if a.dim() > 64 {
            return Err(SolverError::InvalidInput(format!(
                "oracle is desk-scale only (dim {} > 64)",
                a.dim()
            )));
        }
        Ok(Self { a })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// e^{-At} v.
    pub fn semigroup_apply(&self, t: f64, v: &[f64]) -> Result<Vec<f64>> {
        Ok(self.a.scale(-t).expm()?.mat_vec(v))
    }

    /// ∫₀ᵗ e^{-A(t-τ)} f(τ) dτ.
    pub fn convolution(&self, t: f64, f: &dyn Fn(f64) -> Vec<f64>) -> Result<Vec<f64>> {
        if t == 0.0 {
            return Ok(vec![0.0; self.a.dim()]);
        }
        let integrand = |tau: f64| -> Vec<f64> {
            let ft = f(tau);
            self.a
                .scale(-(t - tau))
                .expm()
                .expect("quadrature integrand hit singular expm")
                .mat_vec(&ft)
        };
        adaptive_simpson_vec(&integrand, 0.0, t, CONV_TOL)
    }

    /// Solution of u' + Au = f, u(0) + Σ αₖ u(tₖ) = u₀ at time t.
    pub fn nonlocal_solve(
        &self,
        nl: &NonlocalSpec,
        u0: &[f64],
        f: Option<&dyn Fn(f64) -> Vec<f64>>,
        t: f64,
    ) -> Result<Vec<f64>> {
        let n = self.a.dim();
        if u0.len() != n {
            return Err(SolverError::InvalidInput(format!(
                "u0 length {} != dim {n}",
                u0.len()
            )));
        }
        // W = sum alpha_i u(t_i) from B W = B u0 - u0 + sum alpha_i I_i
        let mut b = DenseMatrix::identity(n);
        for (&alpha, &ti) in nl.alphas().iter().zip(nl.times()) {
            b = b.add(&self.a.scale(-ti).expm()?.scale(alpha));
        }
        let mut rhs: Vec<f64> = b
            .mat_vec(u0)
            .iter()
            .zip(u0)
            .map(|(bu, u)| bu - u)
            .collect();
        if let Some(f) = f {
            for (&alpha, &ti) in nl.alphas().iter().zip(nl.times()) {
                let conv = self.convolution(ti, f)?;
                for (r, c) in rhs.iter_mut().zip(&conv) {
                    *r += alpha * c;
                }
            }
        }
        let w = b.solve(&rhs)?;
        // u(t) = e^{-At}(u0 - W) + int_0^t e^{-A(t-tau)} f dtau
        let head: Vec<f64> = u0.iter().zip(&w).map(|(u, wi)| u - wi).collect();
        let mut out = self.semigroup_apply(t, &head)?;
        if let Some(f) = f {
            let conv = self.convolution(t, f)?;
            for (o, c) in out.iter_mut().zip(&conv) {
                *o += c;
            }
        }
        Ok(out)
    }
}

/// Convenience form of [`ExpmOracle::semigroup_apply`].
pub fn expm_oracle(a: &DenseMatrix, t: f64, v: &[f64]) -> Result<Vec<f64>> {
    ExpmOracle::new(a.clone())?.semigroup_apply(t, v)
}

/// Convenience form of [`ExpmOracle::nonlocal_solve`].
pub fn nonlocal_oracle(
    a: &DenseMatrix,
    nl: &NonlocalSpec,
    u0: &[f64],
    f: Option<&dyn Fn(f64) -> Vec<f64>>,
    t: f64,
) -> Result<Vec<f64>> {
    ExpmOracle::new(a.clone())?.nonlocal_solve(nl, u0, f, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_generator_is_identity_semigroup() {
        let oracle = ExpmOracle::new(DenseMatrix::zeros(5)).unwrap();
        let v = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        let out = oracle.semigroup_apply(3.7, &v).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn scalar_exponential() {
        let mut a = DenseMatrix::zeros(1);
        a[(0, 0)] = 8.0;
        let oracle = ExpmOracle::new(a).unwrap();
        let out = oracle.semigroup_apply(0.3, &[2.0]).unwrap();
        assert!((out[0] - 2.0 * (-2.4f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn semigroup_property() {
        let a = DenseMatrix::fd_laplacian(8);
        let oracle = ExpmOracle::new(a).unwrap();
        let v: Vec<f64> = (0..8).map(|k| (k as f64 * 0.9).sin()).collect();
        let e_sum = oracle.semigroup_apply(0.05 + 0.02, &v).unwrap();
        let e_step = oracle
            .semigroup_apply(0.05, &oracle.semigroup_apply(0.02, &v).unwrap())
            .unwrap();
        for (x, y) in e_sum.iter().zip(&e_step) {
            assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn convolution_of_constant_forcing() {
        // A = diag(lam): int_0^t e^{-lam(t-s)} c ds = c (1 - e^{-lam t})/lam
        let mut a = DenseMatrix::zeros(2);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = 5.0;
        let oracle = ExpmOracle::new(a).unwrap();
        let conv = oracle.convolution(0.7, &|_| vec![1.0, 3.0]).unwrap();
        let want0 = (1.0 - (-2.0f64 * 0.7).exp()) / 2.0;
        let want1 = 3.0 * (1.0 - (-5.0f64 * 0.7).exp()) / 5.0;
        assert!((conv[0] - want0).abs() < 1e-11);
        assert!((conv[1] - want1).abs() < 1e-11);
    }

    #[test]
    fn nonlocal_solution_satisfies_condition_and_equation() {
        let a = DenseMatrix::fd_laplacian(8);
        let oracle = ExpmOracle::new(a).unwrap();
        let nl = NonlocalSpec::new(vec![0.5, 0.3], vec![0.2, 0.4], 1.0).unwrap();
        let u0: Vec<f64> = (1..=8)
            .map(|j| (std::f64::consts::PI * j as f64 / 9.0).sin())
            .collect();
        let f = |s: f64| -> Vec<f64> {
            (1..=8)
                .map(|j| (-s) * 0.0 + (-s).exp() * (0.2 * j as f64).cos())
                .collect()
        };
        let at0 = oracle.nonlocal_solve(&nl, &u0, Some(&f), 0.0).unwrap();
        let at1 = oracle.nonlocal_solve(&nl, &u0, Some(&f), 0.2).unwrap();
        let at2 = oracle.nonlocal_solve(&nl, &u0, Some(&f), 0.4).unwrap();
        for j in 0..8 {
            let lhs = at0[j] + 0.5 * at1[j] + 0.3 * at2[j];
            assert!((lhs - u0[j]).abs() < 1e-10, "residual {}", lhs - u0[j]);
        }
    }

    #[test]
    fn rejects_large_dimension() {
        assert!(ExpmOracle::new(DenseMatrix::zeros(65)).is_err());
    }
}
