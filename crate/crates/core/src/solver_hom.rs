//! Homogeneous-part solver: u_h(t) = e^{-At} B⁻¹ u₀ through the
//! Dunford-Cauchy integral along the integration hyperbola, discretized by
//! the trapezoidal Sinc rule
//!
//!   u_{h,N}(t) = (h / 2πi) Σ_{k=-N}^{N} e^{-z_k t} z'_k B(z_k)⁻¹
//!                 [(z_k I - A)⁻¹ - z_k⁻¹ I] u₀,   z_k = z(kh).
//!
//! The z⁻¹ correction (modified resolvent) keeps the convergence rate
//! uniform down to t = 0.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{integration_hyperbola, strip_height, Hyperbola, SpectralCharacteristics};
use crate::error::{Result, SolverError};
use crate::operators::OperatorModel;
use crate::symbol::{check_solvability, q_bound, symbol_b, NonlocalSpec, Verdict};

/// Exponents below ln(min-normal) + 20 are dropped rather than evaluated:
/// past that point a term is pure underflow noise and cosh may overflow.
pub(crate) const DROP_EXPONENT: f64 = -688.0;

/// Step-size rule of a Sinc plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum StepRule {
    /// h = sqrt(2 π d₁ / (α (N+1))): error uniform in t ≥ 0. α is the
    /// smoothness exponent of the data (u₀ ∈ D(A^α)).
    UniformT0 { alpha: f64 },
    /// h = c₁ ln N / N: asymptotically better for one fixed t > 0.
    FixedT { c1: f64 },
    /// h = N^{-1/2}, the literal choice behind the published tables.
    Published,
}

/// One cached contour node: z(kh), z'(kh) and B(z(kh)).
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub z: Complex64,
    pub dz: Complex64,
    pub b: Complex64,
}

/// Frozen quadrature data for one (spec, nonlocal, rule, N) combination.
#[derive(Debug, Clone)]
pub struct SincPlan {
    n: usize,
    h: f64,
    rule: StepRule,
    d1: f64,
    hyperbola: Hyperbola,
    q: Option<f64>,
    verdict: Verdict,
    spec: SpectralCharacteristics,
    nonlocal: NonlocalSpec,
    /// Override for the inner (time) quadratures; defaults to (N, h).
    inner: Option<(usize, f64)>,
    /// index 0..=2N holds k = index - N
    nodes: Vec<Node>,
}

impl SincPlan {
    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn rule(&self) -> StepRule {
        self.rule
    }

    pub fn strip_width(&self) -> f64 {
        self.d1
    }

    pub fn hyperbola(&self) -> &Hyperbola {
        &self.hyperbola
    }

    /// Contour lower-bound constant: |B(z(ξ))| ≥ 1/Q along the contour.
    /// `None` when the certification failed and the plan was forced.
    pub fn q(&self) -> Option<f64> {
        self.q
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn nonlocal(&self) -> &NonlocalSpec {
        &self.nonlocal
    }

    pub fn node(&self, k: i64) -> &Node {
        &self.nodes[(k + self.n as i64) as usize]
    }

    /// Truncation and step of the inner (time) quadratures; the outer
    /// (N, h) unless overridden.
    pub fn inner_params(&self) -> (usize, f64) {
        self.inner.unwrap_or((self.n, self.h))
    }

    /// Decouples the inner quadratures from the contour sum (tuning knob;
    /// both share (N, h) by default).
    pub fn with_inner(mut self, n_inner: usize, h_inner: f64) -> Self {
        self.inner = Some((n_inner, h_inner));
        self
    }

    /// Abscissa ξ_k = k h.
    pub fn xi(&self, k: i64) -> f64 {
        k as f64 * self.h
    }

    fn check_model(&self, model: &dyn OperatorModel) -> Result<()> {
        if *model.spectral_characteristics() != self.spec {
            return Err(SolverError::InvalidInput(
                "plan was built for different spectral characteristics".into(),
            ));
        }
        Ok(())
    }
}

/// Step size for a rule, strip width and truncation order.
pub fn step_size(rule: StepRule, d1: f64, n: usize) -> Result<f64> {
    match rule {
        StepRule::UniformT0 { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(SolverError::InvalidInput(format!(
                    "smoothness alpha = {alpha} must lie in (0, 1]"
                )));
            }
            if n < 1 {
                return Err(SolverError::InvalidInput("N must be >= 1".into()));
            }
            Ok((2.0 * std::f64::consts::PI * d1 / (alpha * (n + 1) as f64)).sqrt())
        }
        StepRule::FixedT { c1 } => {
            if c1.is_nan() || c1 <= 0.0 {
                return Err(SolverError::InvalidInput(format!(
                    "step constant c1 = {c1} must be positive"
                )));
            }
            if n < 2 {
                return Err(SolverError::InvalidInput(
                    "fixed-t rule needs N >= 2 (ln N > 0)".into(),
                ));
            }
            Ok(c1 * (n as f64).ln() / n as f64)
        }
        StepRule::Published => {
            if n < 1 {
                return Err(SolverError::InvalidInput("N must be >= 1".into()));
            }
            Ok(1.0 / (n as f64).sqrt())
        }
    }
}

/// Builds the plan: solvability pre-flight, contour, step size and the
/// node cache. `force` downgrades both an Unknown verdict and a failed
/// contour certification to warnings (an Unknown verdict always fails the
/// certification too, since e^{-ρ₁tₖ} ≥ e^{-ρ₀tₖ}); the representation
/// may still be valid for specific data.
pub fn make_plan(
    spec: &SpectralCharacteristics,
    nl: &NonlocalSpec,
    rule: StepRule,
    n: usize,
    force: bool,
) -> Result<SincPlan> {
    let verdict = check_solvability(nl, spec);
    if verdict == Verdict::Unknown && !force {
        return Err(SolverError::UnknownVerdict);
    }
    let q = match q_bound(nl, spec) {
        Ok(q) => Some(q),
        Err(_) if force => None,
        Err(e) => return Err(e),
    };
    let d1 = strip_height(spec)?;
    let hyperbola = integration_hyperbola(spec)?;
    let h = step_size(rule, d1, n)?;

    // cosh/sinh evaluated once per |k| and mirrored, so z_{-k} is the
    // bitwise conjugate of z_k.
    let mut nodes = vec![
        Node {
            z: Complex64::new(0.0, 0.0),
            dz: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        };
        2 * n + 1
    ];
    for k in 0..=n {
        let (z, dz) = hyperbola.eval(k as f64 * h);
        let b = symbol_b(nl, z);
        nodes[n + k] = Node { z, dz, b };
        if k > 0 {
            nodes[n - k] = Node {
                z: z.conj(),
                dz: -dz.conj(),
                b: b.conj(),
            };
        }
    }

    Ok(SincPlan {
        n,
        h,
        rule,
        d1,
        hyperbola,
        q,
        verdict,
        spec: *spec,
        nonlocal: nl.clone(),
        inner: None,
        nodes,
    })
}

/// Solver output: real part of the quadrature sum plus the size of the
/// imaginary part that was discarded after the conjugate-symmetry check.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub values: Vec<f64>,
    pub imag_residual: f64,
}

impl SolveResult {
    fn from_complex(sum: Vec<Complex64>) -> Self {
        let imag_residual = sum.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max);
        Self {
            values: sum.into_iter().map(|v| v.re).collect(),
            imag_residual,
        }
    }
}

/// One integrand term F(t, ξ_k) = e^{-z_k t} z'_k B(z_k)⁻¹
/// [(z_k I - A)⁻¹ - z_k⁻¹ I] u₀ (without the h/2πi factor). Returns `None`
/// when the term is dropped by the underflow guard.
pub fn integrand_term(
    plan: &SincPlan,
    model: &dyn OperatorModel,
    u0: &[Complex64],
    t: f64,
    k: i64,
) -> Result<Option<Vec<Complex64>>> {
    let node = plan.node(k);
    if !node.z.re.is_finite() || -t * node.z.re < DROP_EXPONENT {
        return Ok(None);
    }
    let coeff = (-node.z * t).exp() * node.dz / node.b;
    let mut v = model.modified_resolvent_apply(node.z, u0)?;
    for vi in v.iter_mut() {
        *vi *= coeff;
    }
    Ok(Some(v))
}

/// A (+k, -k) pair of node terms; dropped terms are `None`.
type TermPair = (Option<Vec<Complex64>>, Option<Vec<Complex64>>);

/// Deterministic center-out pairwise reduction of 2N+1 node terms scaled
/// by h/2πi. Shared by the homogeneous and inhomogeneous sums.
pub(crate) fn contour_sum<F>(n: usize, h: f64, dim: usize, term: F) -> Result<Vec<Complex64>>
where
    F: Fn(i64) -> Result<Option<Vec<Complex64>>> + Sync,
{
    // Evaluate all pairs concurrently, then reduce in a fixed order:
    // k = 0 first, then (k, -k) pairs in ascending |k|, each pair summed
    // before it is added. Identical bytes for any thread count.
    let pairs: Vec<TermPair> = (0..=n as i64)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let plus = term(k)?;
            let minus = if k > 0 { term(-k)? } else { None };
            Ok((plus, minus))
        })
        .collect::<Result<_>>()?;

    let mut acc = vec![Complex64::new(0.0, 0.0); dim];
    if let (Some(center), _) = &pairs[0] {
        acc.clone_from_slice(center);
    }
    for (plus, minus) in pairs.iter().skip(1) {
        match (plus, minus) {
            (Some(p), Some(m)) => {
                for i in 0..dim {
                    acc[i] += p[i] + m[i];
                }
            }
            (Some(p), None) => {
                for i in 0..dim {
                    acc[i] += p[i];
                }
            }
            (None, Some(m)) => {
                for i in 0..dim {
                    acc[i] += m[i];
                }
            }
            (None, None) => {}
        }
    }
    let scale = Complex64::new(0.0, -h / (2.0 * std::f64::consts::PI));
    // h/(2 pi i) = -i h/(2 pi)
    for a in acc.iter_mut() {
        *a *= scale;
    }
    Ok(acc)
}

/// u_{h,N}(t) for real data u₀.
pub fn solve_homogeneous(
    plan: &SincPlan,
    model: &dyn OperatorModel,
    u0: &[f64],
    t: f64,
) -> Result<SolveResult> {
    plan.check_model(model)?;
    if t < 0.0 {
        return Err(SolverError::InvalidInput(format!("t = {t} must be >= 0")));
    }
    if u0.len() != model.dim() {
        return Err(SolverError::InvalidInput(format!(
            "u0 length {} != model dim {}",
            u0.len(),
            model.dim()
        )));
    }
    let u0c: Vec<Complex64> = u0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let sum = contour_sum(plan.truncation(), plan.step(), model.dim(), |k| {
        integrand_term(plan, model, &u0c, t, k)
    })?;
    Ok(SolveResult::from_complex(sum))
}

/// One a-posteriori rate estimate c ≈ ln(ε_N / ε_{2N}) / ((√2 - 1)√N)
/// for a doubling pair starting at N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Start of the doubling pair.
    pub n: usize,
    /// Estimated constant; `None` when the pair touches the precision
    /// floor and is excluded.
    pub c: Option<f64>,
    pub floored: bool,
}

/// Rate constants for every consecutive doubling pair in `errors`.
/// Pairs whose error is at or below 50 ε_mach · scale are flagged as
/// floor-contaminated and excluded from the estimate.
pub fn estimate_rate_constant(errors: &[(usize, f64)], scale: f64) -> Vec<RateEstimate> {
    let floor = 50.0 * f64::EPSILON * scale.abs().max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for w in errors.windows(2) {
        let (n1, e1) = w[0];
        let (n2, e2) = w[1];
        if n2 != 2 * n1 {
            continue;
        }
        let floored = !(e1 > floor && e2 > floor);
        let c = if floored || e1 <= 0.0 || e2 <= 0.0 {
            None
        } else {
            Some((e1 / e2).ln() / ((2.0f64.sqrt() - 1.0) * (n1 as f64).sqrt()))
        };
        out.push(RateEstimate {
            n: n1,
            c,
            floored,
        });
    }
    out
}
