//! Finite-difference Laplacian model: A = (n+1)² tridiag(-1, 2, -1) on the
//! uniform interior grid of (0, 1). The shifted systems (zI - A) are solved
//! by the pivoted complex tridiagonal elimination.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::contour::SpectralCharacteristics;
use crate::error::{Result, SolverError};
use crate::operators::tridiag::solve_complex_tridiagonal;
use crate::operators::OperatorModel;

#[derive(Debug, Clone)]
pub struct FdLaplacianModel {
    n: usize,
    scale: f64,
    spec: SpectralCharacteristics,
}

impl FdLaplacianModel {
    /// Model with the default contour placement ρ₀ = 0.95 λ_min, φ = π/6,
    /// ρ₁ = ρ₀/2, where λ_min = 4(n+1)² sin²(π/(2(n+1))).
    pub fn new(n: usize) -> Result<Self> {
        Self::with_contour(n, 0.05, PI / 6.0, 0.5)
    }

    pub fn with_contour(n: usize, rho0_margin: f64, phi: f64, rho1_frac: f64) -> Result<Self> {
        if n < 1 {
            return Err(SolverError::InvalidInput("n must be >= 1".into()));
        }
        let rho0 = (1.0 - rho0_margin) * Self::lambda_min(n);
        let spec = SpectralCharacteristics::new(rho0, phi, 2.0, rho1_frac * rho0)?;
        Ok(Self {
            n,
            scale: ((n + 1) * (n + 1)) as f64,
            spec,
        })
    }

    /// Smallest eigenvalue 4(n+1)² sin²(π/(2(n+1))) of the discrete
    /// Laplacian; tends to π² as n → ∞.
    pub fn lambda_min(n: usize) -> f64 {
        let h1 = (n + 1) as f64;
        let s = (PI / (2.0 * h1)).sin();
        4.0 * h1 * h1 * s * s
    }

    /// Applies A itself (used by tests).
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut s = 2.0 * v[i];
                if i > 0 {
                    s -= v[i - 1];
                }
                if i + 1 < n {
                    s -= v[i + 1];
                }
                s * self.scale
            })
            .collect()
    }
}

impl OperatorModel for FdLaplacianModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn spectral_characteristics(&self) -> &SpectralCharacteristics {
        &self.spec
    }

    fn resolvent_apply(&self, z: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n {
            return Err(SolverError::InvalidInput(format!(
                "vector length {} != n {}",
                v.len(),
                self.n
            )));
        }
        // zI - A has diagonal z - 2s and off-diagonals +s.
        let s = Complex64::new(self.scale, 0.0);
        let diag = vec![z - 2.0 * s; self.n];
        let off = vec![s; self.n - 1];
        solve_complex_tridiagonal(&off, &diag, &off, v).map_err(|e| match e {
            SolverError::SingularResolvent { .. } => SolverError::SingularResolvent { z },
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::integration_hyperbola;
    use crate::operators::test_support::resolvent_identity_residual;
    use crate::operators::DenseMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_point_model_is_scalar() {
        // n = 1: A = [8], resolvent v/(z - 8)
        let m = FdLaplacianModel::new(1).unwrap();
        let z = c(3.0, 2.0);
        let r = m.resolvent_apply(z, &[c(1.0, 0.0)]).unwrap();
        assert!((r[0] - 1.0 / (z - 8.0)).norm() < 1e-15);
    }

    #[test]
    fn matches_dense_lu_solve() {
        // n = 8, fixed pseudo-random v, z = -1 + 3i, against a dense
        // complex solve assembled as two coupled real systems.
        let n = 8;
        let m = FdLaplacianModel::new(n).unwrap();
        let z = c(-1.0, 3.0);
        let v: Vec<Complex64> = (0..n)
            .map(|k| c((k as f64 * 0.77).sin(), (k as f64 * 1.31).cos()))
            .collect();
        let r = m.resolvent_apply(z, &v).unwrap();

        // dense oracle: real 2n x 2n block system [[Re, -Im], [Im, Re]]
        let a = DenseMatrix::fd_laplacian(n);
        let mut big = DenseMatrix::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                let re = if i == j { z.re } else { 0.0 } - a[(i, j)];
                let im = if i == j { z.im } else { 0.0 };
                big[(i, j)] = re;
                big[(i, j + n)] = -im;
                big[(i + n, j)] = im;
                big[(i + n, j + n)] = re;
            }
        }
        let mut rhs = vec![0.0; 2 * n];
        for i in 0..n {
            rhs[i] = v[i].re;
            rhs[i + n] = v[i].im;
        }
        let x = big.solve(&rhs).unwrap();
        for i in 0..n {
            let want = c(x[i], x[i + n]);
            assert!((r[i] - want).norm() <= 1e-12 * want.norm().max(1.0));
        }
    }

    #[test]
    fn lambda_min_tends_to_pi_squared() {
        // frozen from 4 (n+1)^2 sin^2(pi / (2(n+1))) at n = 100
        let l = FdLaplacianModel::lambda_min(100);
        assert!((l - 9.868_808_678_86).abs() < 1e-9, "lambda_min = {l}");
        assert!(FdLaplacianModel::lambda_min(4000) < PI * PI);
        assert!((FdLaplacianModel::lambda_min(4000) - PI * PI).abs() < 1e-5);
    }

    #[test]
    fn resolvent_identity_on_contour() {
        let m = FdLaplacianModel::new(8).unwrap();
        let h = integration_hyperbola(m.spectral_characteristics()).unwrap();
        let (z1, _) = h.eval(0.9);
        let (z2, _) = h.eval(-0.2);
        let v: Vec<Complex64> = (0..8).map(|k| c(1.0 / (k + 1) as f64, 0.3 * k as f64)).collect();
        let res = resolvent_identity_residual(&m, z1, z2, &v);
        assert!(res <= 1e-12, "identity residual {res}");
    }

    #[test]
    fn solves_shifted_system_exactly() {
        let n = 12;
        let m = FdLaplacianModel::new(n).unwrap();
        let z = c(4.0, -9.0);
        let x_true: Vec<Complex64> = (0..n).map(|k| c((k as f64).cos(), 0.1 * k as f64)).collect();
        // v = (zI - A) x_true
        let ax = m.apply(&x_true);
        let v: Vec<Complex64> = x_true
            .iter()
            .zip(&ax)
            .map(|(x, a)| z * x - a)
            .collect();
        let x = m.resolvent_apply(z, &v).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-11);
        }
    }
}
