//! Operator models: the resolvent-action contract plus three built-in
//! models (diagonal sine-mode, Green-function quadrature, finite
//! difference) and a dense reference oracle.

use num_complex::Complex64;

use crate::contour::SpectralCharacteristics;
use crate::error::Result;

mod dense;
mod fd;
mod green;
mod oracle;
mod spectral;
mod tridiag;

pub use dense::DenseMatrix;
pub use fd::FdLaplacianModel;
pub use green::GreenFunctionModel;
pub use oracle::{expm_oracle, nonlocal_oracle, ExpmOracle};
pub use spectral::SpectralModeModel;
pub use tridiag::solve_complex_tridiagonal;

/// Contract for an operator A given through its resolvent action
/// v ↦ (zI - A)⁻¹ v on finite-dimensional complex vectors.
///
/// Implementations must be immutable after construction and reentrant:
/// solver layers evaluate all contour nodes concurrently.
pub trait OperatorModel: Sync {
    /// Vector length (grid points or mode count).
    fn dim(&self) -> usize;

    /// Sector data of the operator.
    fn spectral_characteristics(&self) -> &SpectralCharacteristics;

    /// Applies (zI - A)⁻¹ to `v`.
    fn resolvent_apply(&self, z: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>>;

    /// Applies the modified resolvent (zI - A)⁻¹ - z⁻¹ I, the m = 0
    /// correction that restores quadrature accuracy near t = 0.
    fn modified_resolvent_apply(&self, z: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = self.resolvent_apply(z, v)?;
        for (o, vi) in out.iter_mut().zip(v) {
            *o -= vi / z;
        }
        Ok(out)
    }
}

/// Complex values on the uniform interior grid x_j = j/(n+1), j = 1..n,
/// of (0, 1) with homogeneous Dirichlet boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    /// Samples a real-valued profile on the interior grid of size n.
    pub fn sample(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (1..=n)
            .map(|j| Complex64::new(f(j as f64 / (n + 1) as f64), 0.0))
            .collect();
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// j-th grid abscissa for a function of this length.
    pub fn grid_point(&self, j: usize) -> f64 {
        (j + 1) as f64 / (self.values.len() + 1) as f64
    }
}

/// Interior grid abscissas x_j = j/(n+1), j = 1..n.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|j| j as f64 / (n + 1) as f64).collect()
}
