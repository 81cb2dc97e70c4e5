//! Inhomogeneous-part solver. The particular solution splits as
//! u_ih(t) = u₁(t) - Σ_j α_j u_{2,j}(t):
//!
//!  * u₁ is the variation-of-constants integral ∫₀ᵗ e^{-A(t-τ)} f(τ) dτ,
//!    discretized by a double Sinc sum: contour nodes outside, tanh-mapped
//!    time nodes ω_p(t) with weights μ_{k,p}(t) inside.
//!  * u_{2,j} carries the nonlocal correction ∫₀^{t_j} B⁻¹ e^{-A(t+t_j-τ)}
//!    f(τ) dτ: the same contour sum as the homogeneous part with the
//!    inner quadrature f_{k,j} = ∫₀^{t_j} e^{-z_k(t_j-s)} f(s) ds per node.
//!
//! Both inner quadratures use the conformal map s = (t/2)(1 + tanh ξ).

use num_complex::Complex64;

use crate::error::{Result, SolverError};
use crate::operators::OperatorModel;
use crate::solver_hom::{contour_sum, SincPlan, SolveResult, DROP_EXPONENT};

/// Right-hand side f(t): a reentrant vector-valued evaluation plus its
/// declared sector-decay data. Analyticity in the sector and the decay
/// bound ‖f(w)‖ ≤ c e^{-δ|Re w|} are a contract of the caller, used to
/// justify convergence; they are never probed numerically. f is sampled
/// only at real arguments in (0, max(t, t_m)).
pub struct SourceTerm {
    eval: Box<dyn Fn(f64) -> Vec<f64> + Sync>,
    decay_delta: f64,
    smoothness_alpha: f64,
    dim: usize,
    is_zero: bool,
}

impl SourceTerm {
    pub fn new(
        dim: usize,
        decay_delta: f64,
        smoothness_alpha: f64,
        eval: impl Fn(f64) -> Vec<f64> + Sync + 'static,
    ) -> Result<Self> {
        if !(decay_delta > 0.0 && decay_delta.is_finite()) {
            return Err(SolverError::InvalidInput(format!(
                "decay delta = {decay_delta} must be positive"
            )));
        }
        if !(smoothness_alpha > 0.0 && smoothness_alpha <= 1.0) {
            return Err(SolverError::InvalidInput(format!(
                "smoothness alpha = {smoothness_alpha} must lie in (0, 1]"
            )));
        }
        Ok(Self {
            eval: Box::new(eval),
            decay_delta,
            smoothness_alpha,
            dim,
            is_zero: false,
        })
    }

    /// f ≡ 0; solvers short-circuit on it.
    pub fn zero(dim: usize) -> Self {
        Self {
            eval: Box::new(move |_| vec![0.0; dim]),
            decay_delta: 1.0,
            smoothness_alpha: 1.0,
            dim,
            is_zero: true,
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        (self.eval)(t)
    }

    pub fn decay_delta(&self) -> f64 {
        self.decay_delta
    }

    pub fn smoothness_alpha(&self) -> f64 {
        self.smoothness_alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    /// δ must lie in (0, √2 ρ₀] for the operator at hand.
    fn check_against(&self, rho0: f64, model_dim: usize) -> Result<()> {
        if self.dim != model_dim {
            return Err(SolverError::InvalidInput(format!(
                "source dim {} != model dim {model_dim}",
                self.dim
            )));
        }
        let limit = 2.0f64.sqrt() * rho0;
        if self.decay_delta > limit {
            return Err(SolverError::InvalidInput(format!(
                "decay delta = {} exceeds sqrt(2) rho0 = {limit}",
                self.decay_delta
            )));
        }
        Ok(())
    }
}

/// Inner-quadrature weight μ_{k,p}(t) = (t/2) e^{-(t/2) z (1 - tanh(ph))} / cosh²(ph).
///
/// Underflowing exponents round to zero weight; the companion node is
/// [`omega_node`].
pub fn mu_weight(z: Complex64, t: f64, p: i64, h: f64) -> Complex64 {
    let th = (p as f64 * h).tanh();
    let ch = (p as f64 * h).cosh();
    let expo = -(t / 2.0) * z * (1.0 - th);
    if !expo.re.is_finite() || expo.re < DROP_EXPONENT {
        return Complex64::new(0.0, 0.0);
    }
    expo.exp() * (t / 2.0) / (ch * ch)
}

/// Inner-quadrature node ω_p(t) = (t/2)(1 + tanh(ph)) ∈ (0, t).
pub fn omega_node(t: f64, p: i64, h: f64) -> f64 {
    (t / 2.0) * (1.0 + (p as f64 * h).tanh())
}

/// Samples of f at all inner nodes for one upper limit t.
fn sample_source(f: &SourceTerm, t: f64, n: usize, h: f64) -> Vec<Vec<f64>> {
    (-(n as i64)..=n as i64)
        .map(|p| f.eval(omega_node(t, p, h)))
        .collect()
}

/// Inner Sinc sum h Σ_p μ_{k,p} f(ω_p) from precomputed samples.
fn inner_sum(
    z: Complex64,
    t: f64,
    n: usize,
    h: f64,
    samples: &[Vec<f64>],
    dim: usize,
) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    for (idx, p) in (-(n as i64)..=n as i64).enumerate() {
        let mu = mu_weight(z, t, p, h);
        if mu == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (a, &s) in acc.iter_mut().zip(&samples[idx]) {
            *a += mu * s;
        }
    }
    for a in acc.iter_mut() {
        *a *= h;
    }
    acc
}

/// f_{k,j,N} = h Σ_p μ_{k,p,j} f(ω_{p,j}): the Sinc approximation of
/// ∫₀^{t_j} e^{-z_k (t_j - s)} f(s) ds.
pub fn f_inner_quadrature(
    z_k: Complex64,
    t_j: f64,
    f: &SourceTerm,
    n: usize,
    h: f64,
) -> Vec<Complex64> {
    if t_j == 0.0 {
        return vec![Complex64::new(0.0, 0.0); f.dim()];
    }
    let samples = sample_source(f, t_j, n, h);
    inner_sum(z_k, t_j, n, h, &samples, f.dim())
}

/// u_{1,N}(t): double Sinc sum for ∫₀ᵗ e^{-A(t-τ)} f(τ) dτ. No B factor
/// and no e^{-zt} weight; the time decay sits inside μ_{k,p}(t).
pub fn solve_u1(
    plan: &SincPlan,
    model: &dyn OperatorModel,
    f: &SourceTerm,
    t: f64,
) -> Result<SolveResult> {
    check_time(plan, t)?;
    f.check_against(model.spectral_characteristics().rho0, model.dim())?;
    if f.is_zero() || t == 0.0 {
        return Ok(SolveResult {
            values: vec![0.0; model.dim()],
            imag_residual: 0.0,
        });
    }
    let (n_in, h_in) = plan.inner_params();
    let samples = sample_source(f, t, n_in, h_in);
    let sum = contour_sum(plan.truncation(), plan.step(), model.dim(), |k| {
        let node = plan.node(k);
        if !node.z.re.is_finite() {
            return Ok(None);
        }
        let w = inner_sum(node.z, t, n_in, h_in, &samples, model.dim());
        let mut v = model.modified_resolvent_apply(node.z, &w)?;
        for vi in v.iter_mut() {
            *vi *= node.dz;
        }
        Ok(Some(v))
    })?;
    Ok(solve_result(sum))
}

/// u_{2,j,N}(t): contour sum e^{-z_k t} z'_k B(z_k)⁻¹ [modified resolvent]
/// f_{k,j,N} for one nonlocal point t_j.
pub fn solve_u2_single(
    plan: &SincPlan,
    model: &dyn OperatorModel,
    f: &SourceTerm,
    t_j: f64,
    t: f64,
) -> Result<SolveResult> {
    check_time(plan, t)?;
    f.check_against(model.spectral_characteristics().rho0, model.dim())?;
    let (n_in, h_in) = plan.inner_params();
    let samples = sample_source(f, t_j, n_in, h_in);
    let sum = contour_sum(plan.truncation(), plan.step(), model.dim(), |k| {
        let node = plan.node(k);
        if !node.z.re.is_finite() || -t * node.z.re < DROP_EXPONENT {
            return Ok(None);
        }
        let fkj = inner_sum(node.z, t_j, n_in, h_in, &samples, model.dim());
        let mut v = model.modified_resolvent_apply(node.z, &fkj)?;
        let coeff = (-node.z * t).exp() * node.dz / node.b;
        for vi in v.iter_mut() {
            *vi *= coeff;
        }
        Ok(Some(v))
    })?;
    Ok(solve_result(sum))
}

/// Σ_j α_j u_{2,j,N}(t). The assembled particular solution subtracts this
/// from u₁ (the representation carries a leading minus).
pub fn solve_u2(
    plan: &SincPlan,
    model: &dyn OperatorModel,
    f: &SourceTerm,
    t: f64,
) -> Result<SolveResult> {
    let nl = plan.nonlocal().clone();
    let mut acc = vec![0.0; model.dim()];
    let mut residual = 0.0f64;
    if f.is_zero() {
        return Ok(SolveResult {
            values: acc,
            imag_residual: 0.0,
        });
    }
    for (&alpha, &tj) in nl.alphas().iter().zip(nl.times()) {
        let part = solve_u2_single(plan, model, f, tj, t)?;
        for (a, v) in acc.iter_mut().zip(&part.values) {
            *a += alpha * v;
        }
        residual = residual.max(alpha.abs() * part.imag_residual);
    }
    Ok(SolveResult {
        values: acc,
        imag_residual: residual,
    })
}

/// Full solution u_N(t) = u_{h,N}(t) + u_{1,N}(t) - Σ_j α_j u_{2,j,N}(t).
///
/// A zero source reduces bitwise to the homogeneous solve; m = 0 reduces
/// bitwise to homogeneous + u₁.
pub fn solve_full(
    plan: &SincPlan,
    model: &dyn OperatorModel,
    u0: &[f64],
    f: &SourceTerm,
    t: f64,
) -> Result<SolveResult> {
    let hom = crate::solver_hom::solve_homogeneous(plan, model, u0, t)?;
    if f.is_zero() {
        return Ok(hom);
    }
    let u1 = solve_u1(plan, model, f, t)?;
    let mut values: Vec<f64> = hom
        .values
        .iter()
        .zip(&u1.values)
        .map(|(a, b)| a + b)
        .collect();
    let mut residual = hom.imag_residual.max(u1.imag_residual);
    if !plan.nonlocal().is_empty() {
        let u2 = solve_u2(plan, model, f, t)?;
        for (v, w) in values.iter_mut().zip(&u2.values) {
            *v -= w;
        }
        residual = residual.max(u2.imag_residual);
    }
    Ok(SolveResult {
        values,
        imag_residual: residual,
    })
}

fn check_time(plan: &SincPlan, t: f64) -> Result<()> {
    if !(0.0..=plan.nonlocal().horizon()).contains(&t) {
        return Err(SolverError::InvalidInput(format!(
            "t = {t} outside [0, T = {}]",
            plan.nonlocal().horizon()
        )));
    }
    Ok(())
}

fn solve_result(sum: Vec<Complex64>) -> SolveResult {
    let imag_residual = sum.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
    SolveResult {
        values: sum.into_iter().map(|v| v.re).collect(),
        imag_residual,
    }
}
