//! Complex tridiagonal solve by banded LU with partial pivoting.
//!
//! Row swaps widen the band by one superdiagonal, so the factorization
//! tracks two superdiagonals. Shifted systems (zI - A) off the real axis
//! are well conditioned, but pivoting keeps the elimination safe near the
//! spectrum as well.

use num_complex::Complex64;

use crate::error::{Result, SolverError};

/// Solves the tridiagonal system with sub-diagonal `lower`, diagonal
/// `diag`, super-diagonal `upper` and right-hand side `rhs`.
///
/// `lower.len() == upper.len() == diag.len() - 1`; a pivot of exactly
/// zero reports a singular system.
pub fn solve_complex_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if lower.len() != n - 1 || upper.len() != n - 1 || rhs.len() != n {
        return Err(SolverError::InvalidInput(format!(
            "tridiagonal shape mismatch: n = {n}, lower = {}, upper = {}, rhs = {}",
            lower.len(),
            upper.len(),
            rhs.len()
        )));
    }

    // Working bands: d = diagonal, u1 = first superdiagonal,
    // u2 = second superdiagonal (fill-in from pivoting).
    let zero = Complex64::new(0.0, 0.0);
    let mut d = diag.to_vec();
    let mut u1 = upper.to_vec();
    let mut u2 = vec![zero; n.saturating_sub(2)];
    let mut x = rhs.to_vec();
    let mut low = lower.to_vec();

    for i in 0..n - 1 {
        // Row i holds (d[i], u1[i], u2[i]) in columns i, i+1, i+2;
        // row i+1 holds (low[i], d[i+1], u1[i+1]).
        if low[i].norm() > d[i].norm() {
            let row_i = (d[i], u1[i], if i + 2 < n { u2[i] } else { zero });
            d[i] = low[i];
            u1[i] = d[i + 1];
            if i + 2 < n {
                u2[i] = if i + 1 < n - 1 { u1[i + 1] } else { zero };
            }
            low[i] = row_i.0;
            d[i + 1] = row_i.1;
            if i + 1 < n - 1 {
                u1[i + 1] = row_i.2;
            }
            x.swap(i, i + 1);
        }
        let pivot = d[i];
        if pivot.norm() == 0.0 {
            return Err(SolverError::SingularResolvent {
                z: Complex64::new(f64::NAN, f64::NAN),
            });
        }
        let m = low[i] / pivot;
        d[i + 1] -= m * u1[i];
        if i + 2 < n {
            u1[i + 1] -= m * u2[i];
        }
        let xi = x[i];
        x[i + 1] -= m * xi;
    }
    if d[n - 1].norm() == 0.0 {
        return Err(SolverError::SingularResolvent {
            z: Complex64::new(f64::NAN, f64::NAN),
        });
    }

    // Back substitution over the (up to) two superdiagonals.
    for i in (0..n).rev() {
        let mut s = x[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    Ok(x)
}
