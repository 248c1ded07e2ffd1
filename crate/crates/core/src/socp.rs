//! ADMM for `min cᵀx  s.t.  Ax = b, ‖x[..n-1]‖₂ ≤ x[n-1]`.
//!
//! The problem is split as `min cᵀx + I_affine(x) + I_cone(y)  s.t.  x = y`:
//!
//! 1. x-step: solve `[[I, Aᵀ], [A, 0]] [x; λ] = [u; b]` on the linear backend,
//! 2. y-step: `y = Π_cone(x + µ/ρ)`,
//! 3. `µ += ρ(x − y)`, `u = y − (µ + c)/ρ`.
//!
//! Iteration stops once `‖x⁺ − x‖₂ ≤ ε` and the consensus gap `‖x⁺ − y⁺‖₂ ≤ PRIMAL_GAP_FACTOR·ε`.

use crate::backend::LinearBackend;
use crate::linalg::{dist2, norm2};
use crate::mapping::build_socp_kkt;
use crate::problems::SocpProblem;
use crate::scalar::Scalar;
use crate::solve::{AdmmConfig, Residuals, SolveResult, SolveStatus, DIVERGENCE_NORM};
use crate::{Error, Result};

/// On `Converged`, `‖x − y‖₂ ≤ PRIMAL_GAP_FACTOR · ε`.
pub const PRIMAL_GAP_FACTOR: f64 = 1.0;

/// Euclidean projection onto `{v : ‖v[..n-1]‖₂ ≤ v[n-1]}`.
pub fn project_soc<T: Scalar>(v: &[T]) -> Result<Vec<T>> {
    let mut out = v.to_vec();
    project_soc_in_place(&mut out)?;
    Ok(out)
}

/// In-place form of [`project_soc`].
pub fn project_soc_in_place<T: Scalar>(v: &mut [T]) -> Result<()> {
    let n = v.len();
    if n < 2 {
        return Err(Error::Dimension(format!("second-order cone needs dimension >= 2, got {n}")));
    }
    let (w, tail) = v.split_at_mut(n - 1);
    let s = tail[0];
    let norm_w = norm2(w);
    if norm_w <= -s {
        w.iter_mut().for_each(|e| *e = T::zero());
        tail[0] = T::zero();
    } else if norm_w <= s {
        // already inside
    } else {
        let half = T::lit(0.5);
        let alpha = half * (T::one() + s / norm_w);
        w.iter_mut().for_each(|e| *e *= alpha);
        tail[0] = alpha * norm_w;
    }
    Ok(())
}

fn finish<T: Scalar>(problem: &SocpProblem<T>, status: SolveStatus, x: Vec<T>, k: usize, trace: Vec<Residuals<T>>, msg: Option<String>) -> SolveResult<T> {
    SolveResult { objective: problem.objective(&x), x, iterations: k, status, residual_trace: trace, failure: msg }
}

pub fn solve_socp<T: Scalar, B: LinearBackend<T>>(
    problem: &SocpProblem<T>,
    config: &AdmmConfig<T>,
    backend: &B,
) -> Result<SolveResult<T>> {
    config.validate()?;
    let (kkt, layout) = build_socp_kkt(problem)?;
    let n = problem.n;
    let rho = config.rho;
    let inv_rho = T::one() / rho;
    let eps = config.epsilon;
    let gap_tol = eps * T::lit(PRIMAL_GAP_FACTOR);

    let handle = match backend.prepare(&kkt, &layout) {
        Ok(h) => h,
        Err(e) => return Ok(finish(problem, SolveStatus::BackendFailure, vec![T::zero(); n], 0, vec![], Some(e.to_string()))),
    };

    let mut x = vec![T::zero(); n];
    let mut mu = vec![T::zero(); n];
    let mut rhs: Vec<T> = problem.c.iter().map(|&c| -c * inv_rho).collect();
    rhs.extend_from_slice(&problem.b);
    let mut trace = Vec::new();

    for k in 1..=config.max_iterations {
        let solution = match backend.apply(&handle, &rhs) {
            Ok(s) => s,
            Err(e) => return Ok(finish(problem, SolveStatus::BackendFailure, x, k - 1, trace, Some(e.to_string()))),
        };
        let x_new = &solution[..n];

        let mut y: Vec<T> = x_new.iter().zip(&mu).map(|(&xi, &mi)| xi + inv_rho * mi).collect();
        project_soc_in_place(&mut y)?;
        for i in 0..n {
            mu[i] += rho * (x_new[i] - y[i]);
            rhs[i] = y[i] - inv_rho * (mu[i] + problem.c[i]);
        }

        let step = dist2(x_new, &x);
        let gap = dist2(x_new, &y);
        trace.push(Residuals { step, primal: gap });
        x.copy_from_slice(x_new);

        let size = norm2(&x);
        if !size.is_finite() || size > T::lit(DIVERGENCE_NORM) || mu.iter().any(|m| !m.is_finite()) {
            return Ok(finish(problem, SolveStatus::Diverged, x, k, trace, None));
        }
        if step <= eps && gap <= gap_tol {
            return Ok(finish(problem, SolveStatus::Converged, x, k, trace, None));
        }
    }
    let k = config.max_iterations;
    Ok(finish(problem, SolveStatus::IterationLimit, x, k, trace, None))
}
