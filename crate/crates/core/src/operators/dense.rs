//! Small dense real matrices: LU solves, the scaling-and-squaring matrix
//! exponential, and adaptive quadrature of vector-valued integrands.
//! Desk-scale only; everything is O(n³) with n ≤ 64.

use crate::error::{Result, SolverError};

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "square matrices only");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    /// Dirichlet finite-difference Laplacian (n+1)² tridiag(-1, 2, -1).
    pub fn fd_laplacian(n: usize) -> Self {
        let s = ((n + 1) * (n + 1)) as f64;
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 2.0 * s;
            if i + 1 < n {
                m[(i, i + 1)] = -s;
                m[(i + 1, i)] = -s;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        self.data
            .chunks_exact(n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mat_mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].abs()).sum())
            .fold(0.0, f64::max)
    }

    /// LU factorization with partial pivoting; returns the factors packed
    /// in place plus the pivot row indices.
    fn lu(&self) -> Result<(Vec<f64>, Vec<usize>)> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut piv = (0..n).collect::<Vec<_>>();
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(SolverError::OracleFailure(
                    "singular matrix in dense LU".into(),
                ));
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let m = a[i * n + k] / pivot;
                a[i * n + k] = m;
                for j in k + 1..n {
                    a[i * n + j] -= m * a[k * n + j];
                }
            }
        }
        Ok((a, piv))
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let (lu, piv) = self.lu()?;
        let mut x: Vec<f64> = piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let s: f64 = (0..i).map(|j| lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / lu[i * n + i];
        }
        Ok(x)
    }

    /// Solves A X = B column by column.
    pub fn solve_matrix(&self, b: &Self) -> Result<Self> {
        let n = self.n;
        let mut out = Self::zeros(n);
        for j in 0..n {
            let col: Vec<f64> = (0..n).map(|i| b.data[i * n + j]).collect();
            let x = self.solve(&col)?;
            for (i, xi) in x.iter().enumerate() {
                out.data[i * n + j] = *xi;
            }
        }
        Ok(out)
    }

    /// Matrix exponential e^{A} by scaling and squaring with the diagonal
    /// Padé(13) kernel.
    pub fn expm(&self) -> Result<Self> {
        // Padé 13 numerator coefficients (denominator has alternating signs).
        const B: [f64; 14] = [
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ];
        const THETA_13: f64 = 4.25;

        let norm = self.norm_1();
        let s = if norm > THETA_13 {
            (norm / THETA_13).log2().ceil().max(0.0) as u32
        } else {
            0
        };
        let a = self.scale(0.5f64.powi(s as i32));

        let n = self.n;
        let id = Self::identity(n);
        let a2 = a.mat_mul(&a);
        let a4 = a2.mat_mul(&a2);
        let a6 = a4.mat_mul(&a2);

        // u = A (a6 (b13 a6 + b11 a4 + b9 a2) + b7 a6 + b5 a4 + b3 a2 + b1 I)
        let w1 = a6.scale(B[13]).add(&a4.scale(B[11])).add(&a2.scale(B[9]));
        let w2 = a6
            .scale(B[7])
            .add(&a4.scale(B[5]))
            .add(&a2.scale(B[3]))
            .add(&id.scale(B[1]));
        let u = a.mat_mul(&a6.mat_mul(&w1).add(&w2));
        // v = a6 (b12 a6 + b10 a4 + b8 a2) + b6 a6 + b4 a4 + b2 a2 + b0 I
        let z1 = a6.scale(B[12]).add(&a4.scale(B[10])).add(&a2.scale(B[8]));
        let v = a6
            .mat_mul(&z1)
            .add(&a6.scale(B[6]))
            .add(&a4.scale(B[4]))
            .add(&a2.scale(B[2]))
            .add(&id.scale(B[0]));

        // (v - u) r = (v + u)
        let mut r = v.sub(&u).solve_matrix(&v.add(&u))?;
        for _ in 0..s {
            r = r.mat_mul(&r);
        }
        Ok(r)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Adaptive Simpson quadrature of a vector-valued integrand, refined until
/// the sup-norm of the local correction meets `tol`. Reports a failure
/// instead of returning a low-quality value when the depth budget runs out.
pub fn adaptive_simpson_vec(
    f: &dyn Fn(f64) -> Vec<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    fn simpson(fa: &[f64], fm: &[f64], fb: &[f64], h: f64) -> Vec<f64> {
        fa.iter()
            .zip(fm)
            .zip(fb)
            .map(|((&x, &y), &z)| h / 6.0 * (x + 4.0 * y + z))
            .collect()
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> Vec<f64>,
        a: f64,
        b: f64,
        fa: Vec<f64>,
        fm: Vec<f64>,
        fb: Vec<f64>,
        whole: Vec<f64>,
        tol: f64,
        depth: u32,
    ) -> Result<Vec<f64>> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(&fa, &flm, &fm, m - a);
        let right = simpson(&fm, &frm, &fb, b - m);
        let diff: Vec<f64> = left
            .iter()
            .zip(&right)
            .zip(&whole)
            .map(|((l, r), w)| l + r - w)
            .collect();
        let err = diff.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        if err <= 15.0 * tol {
            return Ok(left
                .iter()
                .zip(&right)
                .zip(&diff)
                .map(|((l, r), d)| l + r + d / 15.0)
                .collect());
        }
        if depth == 0 {
            return Err(SolverError::OracleFailure(format!(
                "adaptive quadrature failed to converge on [{a}, {b}] (residual {err:.3e})"
            )));
        }
        let lv = rec(f, a, m, fa, flm, fm.clone(), left, tol / 2.0, depth - 1)?;
        let rv = rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
        Ok(lv.iter().zip(&rv).map(|(x, y)| x + y).collect())
    }

    if a == b {
        return Ok(vec![0.0; f(a).len()]);
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(&fa, &fm, &fb, b - a);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_matches_known_system() {
        let a = DenseMatrix::from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let x_true = vec![1.0, -2.0, 3.0];
        let b = a.mat_vec(&x_true);
        let x = a.solve(&b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).abs() < 1e-13);
        }
    }

    #[test]
    fn expm_zero_is_identity() {
        let e = DenseMatrix::zeros(4).expm().unwrap();
        assert_eq!(e, DenseMatrix::identity(4));
    }

    #[test]
    fn expm_scalar() {
        let mut a = DenseMatrix::zeros(1);
        a[(0, 0)] = -2.4;
        let e = a.expm().unwrap();
        assert!((e[(0, 0)] - (-2.4f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn expm_diagonal() {
        let mut a = DenseMatrix::zeros(3);
        for (i, l) in [0.5, -1.0, -30.0].iter().enumerate() {
            a[(i, i)] = *l;
        }
        let e = a.expm().unwrap();
        for (i, l) in [0.5f64, -1.0, -30.0].iter().enumerate() {
            assert!((e[(i, i)] - l.exp()).abs() <= 1e-14 * l.exp().max(1.0));
        }
    }

    #[test]
    fn expm_semigroup_on_laplacian() {
        let a = DenseMatrix::fd_laplacian(6).scale(-0.1);
        let e1 = a.expm().unwrap();
        let e2 = a.scale(2.0).expm().unwrap();
        let prod = e1.mat_mul(&e1);
        let diff = e2.sub(&prod).norm_1();
        assert!(diff < 1e-13 * e2.norm_1().max(1.0), "diff = {diff}");
    }

    #[test]
    fn adaptive_simpson_polynomial_and_exp() {
        let v = adaptive_simpson_vec(&|x| vec![x * x, (2.0 * x).exp()], 0.0, 1.0, 1e-12).unwrap();
        assert!((v[0] - 1.0 / 3.0).abs() < 1e-11);
        assert!((v[1] - (2f64.exp() - 1.0) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_simpson_empty_interval() {
        let v = adaptive_simpson_vec(&|_| vec![1.0, 2.0], 0.3, 0.3, 1e-12).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
    }
}
