//! Green-function model of the Dirichlet Laplacian on (0, 1):
//! (zI - A)⁻¹ f at x is ∫₀¹ G(x, s; z) f(s) ds with
//!
//!   G(x, s; z) = -sin(min(x,s)√z) sin((1-max(x,s))√z) / (√z sin √z).
//!
//! The kernel has a derivative kink at s = x, so the integral is split
//! there and each half is mapped onto the line by s = c + r·tanh ξ, then
//! evaluated by the trapezoidal Sinc rule. The kernel itself is computed
//! in factored-exponential form: the quotient of sines is O(e^{-(M-m)|Im √z|})
//! while its factors overflow separately once |z| ≳ 10⁷ on the contour.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::contour::SpectralCharacteristics;
use crate::error::{Result, SolverError};
use crate::operators::{uniform_grid, OperatorModel};

/// |1 - e^{-2iσ√z}| below this means sin(√z) ≈ 0: z at an eigenvalue.
const SIN_GUARD: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct GreenFunctionModel {
    n_quad: usize,
    h_quad: f64,
    grid: Vec<f64>,
    spec: SpectralCharacteristics,
}

impl GreenFunctionModel {
    /// Model on the uniform interior grid of size `n` with `n_quad`
    /// Sinc nodes per half-interval (2·n_quad + 1 points each) and the
    /// default contour placement ρ₀ = 0.95 π², φ = π/6, ρ₁ = ρ₀/2.
    pub fn new(n_quad: usize, n: usize) -> Result<Self> {
        Self::with_contour(n_quad, n, 0.05, PI / 6.0, 0.5)
    }

    pub fn with_contour(
        n_quad: usize,
        n: usize,
        rho0_margin: f64,
        phi: f64,
        rho1_frac: f64,
    ) -> Result<Self> {
        if n_quad < 8 {
            return Err(SolverError::InvalidInput("n_quad must be >= 8".into()));
        }
        if n < 1 {
            return Err(SolverError::InvalidInput("grid size must be >= 1".into()));
        }
        let rho0 = (1.0 - rho0_margin) * PI * PI;
        let spec = SpectralCharacteristics::new(rho0, phi, 2.0, rho1_frac * rho0)?;
        Ok(Self {
            n_quad,
            h_quad: PI / (2.0 * n_quad as f64).sqrt(),
            grid: uniform_grid(n),
            spec,
        })
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// G(x, s; z) in the stable factored form.
    pub fn kernel(z: Complex64, x: f64, s: f64) -> Result<Complex64> {
        let w = z.sqrt(); // principal branch, Re w >= 0 on the contour
        let lo = x.min(s);
        let hi = x.max(s);
        // sgn picks the exponential that grows, so every factor below has
        // modulus <= 1.
        let sgn = if w.im <= 0.0 { 1.0 } else { -1.0 };
        let i_sgn_w = Complex64::new(0.0, sgn) * w;
        let e = |a: f64| (-2.0 * a * i_sgn_w).exp();
        let denom = 1.0 - e(1.0);
        if denom.norm() < SIN_GUARD {
            return Err(SolverError::SingularResolvent { z });
        }
        // sin(aw) sin((1-b)w)/sin(w) with a = lo, 1-b = 1-hi:
        //   e^{-i sgn (hi-lo) w} (1-E(lo))(1-E(1-hi)) / (2 i sgn (1-E(1)))
        let ratio = (-(hi - lo) * i_sgn_w).exp() * (1.0 - e(lo)) * (1.0 - e(1.0 - hi))
            / (Complex64::new(0.0, 2.0 * sgn) * denom);
        Ok(-ratio / w)
    }

    /// ∫₀¹ G(x, s; z) f(s) ds by the split tanh-Sinc rule with this
    /// model's (n_quad, h_quad).
    pub fn resolvent_fn_at(
        &self,
        z: Complex64,
        f: &(dyn Fn(f64) -> Complex64 + Sync),
        x: f64,
    ) -> Result<Complex64> {
        self.quadrature_at(z, f, x, self.n_quad, self.h_quad)
    }

    /// Same as [`Self::resolvent_fn_at`] but also reports the relative
    /// change when the node count is doubled; a change above 1e-8 is the
    /// accuracy warning threshold.
    pub fn resolvent_fn_at_checked(
        &self,
        z: Complex64,
        f: &(dyn Fn(f64) -> Complex64 + Sync),
        x: f64,
    ) -> Result<(Complex64, f64)> {
        let coarse = self.quadrature_at(z, f, x, self.n_quad, self.h_quad)?;
        let h2 = PI / (2.0 * (2 * self.n_quad) as f64).sqrt();
        let fine = self.quadrature_at(z, f, x, 2 * self.n_quad, h2)?;
        let rel = (fine - coarse).norm() / fine.norm().max(1e-300);
        Ok((fine, rel))
    }

    /// Function-input resolvent sampled on the model grid.
    pub fn resolvent_apply_fn(
        &self,
        z: Complex64,
        f: &(dyn Fn(f64) -> Complex64 + Sync),
    ) -> Result<Vec<Complex64>> {
        self.grid
            .iter()
            .map(|&x| self.resolvent_fn_at(z, f, x))
            .collect()
    }

    fn quadrature_at(
        &self,
        z: Complex64,
        f: &(dyn Fn(f64) -> Complex64 + Sync),
        x: f64,
        n_quad: usize,
        h: f64,
    ) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(SolverError::InvalidInput(format!(
                "evaluation point x = {x} outside [0, 1]"
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        // halves (0, x) and (x, 1); an empty half contributes nothing
        for (a, b) in [(0.0, x), (x, 1.0)] {
            let r = (b - a) / 2.0;
            if r == 0.0 {
                continue;
            }
            let mid = (a + b) / 2.0;
            for p in -(n_quad as i64)..=(n_quad as i64) {
                let xi = p as f64 * h;
                let th = xi.tanh();
                let s = mid + r * th;
                let sech2 = {
                    let c = xi.cosh();
                    1.0 / (c * c)
                };
                if sech2 == 0.0 {
                    continue;
                }
                let g = Self::kernel(z, x, s)?;
                acc += g * f(s) * (r * sech2);
            }
        }
        Ok(acc * h)
    }

    /// Discrete sine coefficients of samples on the uniform grid
    /// (inverse of evaluating Σ c_k sin(kπ x_j) at the grid).
    fn dst_coefficients(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.len();
        let scale = 2.0 / (n + 1) as f64;
        (1..=n)
            .map(|k| {
                let mut c = Complex64::new(0.0, 0.0);
                for (j, &vj) in v.iter().enumerate() {
                    c += vj * (k as f64 * PI * self.grid[j]).sin();
                }
                c * scale
            })
            .collect()
    }
}

impl OperatorModel for GreenFunctionModel {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn spectral_characteristics(&self) -> &SpectralCharacteristics {
        &self.spec
    }

    /// Grid samples are interpolated in the discrete sine basis (exact for
    /// band-limited samples, spectrally accurate for smooth ones) and the
    /// interpolant is integrated against the kernel.
    fn resolvent_apply(&self, z: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.grid.len() {
            return Err(SolverError::InvalidInput(format!(
                "vector length {} != grid size {}",
                v.len(),
                self.grid.len()
            )));
        }
        let coeffs = self.dst_coefficients(v);
        let interp = move |s: f64| -> Complex64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * ((i + 1) as f64 * PI * s).sin())
                .sum()
        };
        self.resolvent_apply_fn(z, &interp)
    }
}
