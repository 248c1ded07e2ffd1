//! ADMM for homogeneous QCQP: `min xᵀP₀x  s.t.  xᵀPᵢx ≤ rᵢ, Ax = b`.
//!
//! Each quadratic constraint is lifted to a second-order cone constraint on
//! `zᵢ = Cᵢx + dᵢ = [Qᵢx; √rᵢ]` where `QᵢᵀQᵢ = Pᵢ`. The x-step solves the constant normal
//! equations `(2P₀ + ρΣPᵢ + ρAᵀA) x = ρΣCᵢᵀgᵢ + ρAᵀh` on the linear backend; each z-step is a
//! projection onto the cone in `R^{n+1}`; `uᵢ` and `v` are the usual scaled multiplier updates.

use crate::backend::LinearBackend;
use crate::linalg::{dist2, norm2, symmetric_eigen, Matrix};
use crate::mapping::{build_qcqp_normal, RhsLayout};
use crate::problems::QcqpProblem;
use crate::scalar::Scalar;
use crate::socp::project_soc_in_place;
use crate::solve::{AdmmConfig, Residuals, SolveResult, SolveStatus, DIVERGENCE_NORM};
use crate::{Error, Result};

/// `Q = Λ^{1/2} Uᵀ` from `P = UΛUᵀ`, so that `QᵀQ = P`.
///
/// Eigenvalues in `[-10⁻¹⁰·max(1, λ_max), 0)` are clamped to zero; anything more negative is
/// rejected.
pub fn factor_psd<T: Scalar>(p: &Matrix<T>) -> Result<Matrix<T>> {
    if !p.is_square() {
        return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", p.rows(), p.cols())));
    }
    if p.relative_asymmetry().as_f64() > crate::problems::SYMMETRY_TOLERANCE {
        return Err(Error::Dimension("matrix is not symmetric".into()));
    }
    let n = p.rows();
    let (values, vectors) = symmetric_eigen(p);
    let lambda_max = values.last().copied().unwrap_or_else(T::zero);
    let tol = T::lit(1e-10) * lambda_max.max(T::one());
    let mut q = Matrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda < -tol {
            return Err(Error::NotPsd { eigenvalue: lambda.as_f64(), tolerance: tol.as_f64() });
        }
        let root = lambda.max(T::zero()).sqrt();
        for j in 0..n {
            q[(k, j)] = root * vectors[(j, k)];
        }
    }
    Ok(q)
}

/// Second-order cone form of the quadratic constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeLift<T> {
    /// `Qᵢ` with `QᵢᵀQᵢ = Pᵢ`.
    pub q: Vec<Matrix<T>>,
    /// `Cᵢ = [Qᵢ; 0]`, `(n+1)×n`.
    pub c: Vec<Matrix<T>>,
    /// `dᵢ = [0; √rᵢ]`, length `n+1`.
    pub d: Vec<Vec<T>>,
}

impl<T: Scalar> ConeLift<T> {
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `Cᵢx + dᵢ`.
    pub fn affine(&self, i: usize, x: &[T]) -> Vec<T> {
        let mut out = self.c[i].mul_vec(x);
        for (o, &d) in out.iter_mut().zip(&self.d[i]) {
            *o += d;
        }
        out
    }
}

pub fn lift_constraints<T: Scalar>(problem: &QcqpProblem<T>) -> Result<ConeLift<T>> {
    let n = problem.n;
    let mut lift = ConeLift { q: Vec::new(), c: Vec::new(), d: Vec::new() };
    for con in &problem.constraints {
        if con.r < T::zero() {
            return Err(Error::InvalidConfig(format!("negative quadratic bound {}", con.r)));
        }
        let q = factor_psd(&con.p)?;
        let mut c = Matrix::zeros(n + 1, n);
        for i in 0..n {
            c.row_mut(i).copy_from_slice(q.row(i));
        }
        let mut d = vec![T::zero(); n + 1];
        d[n] = con.r.sqrt();
        lift.q.push(q);
        lift.c.push(c);
        lift.d.push(d);
    }
    Ok(lift)
}

pub fn solve_qcqp<T: Scalar, B: LinearBackend<T>>(
    problem: &QcqpProblem<T>,
    config: &AdmmConfig<T>,
    backend: &B,
) -> Result<SolveResult<T>> {
    config.validate()?;
    let (left, recipe) = build_qcqp_normal(problem, config.rho)?;
    let n = problem.n;
    let rho = config.rho;
    let inv_rho = T::one() / rho;
    let eps = config.epsilon;
    let lift = &recipe.lift;

    let finish = |status, x: Vec<T>, k, trace, failure| SolveResult {
        objective: problem.objective(&x),
        x,
        iterations: k,
        status,
        residual_trace: trace,
        failure,
    };

    let handle = match backend.prepare(&left, &RhsLayout::varying(n)) {
        Ok(h) => h,
        Err(e) => return Ok(finish(SolveStatus::BackendFailure, vec![T::zero(); n], 0, vec![], Some(e.to_string()))),
    };

    let mut x = vec![T::zero(); n];
    let mut z: Vec<Vec<T>> = lift.d.clone();
    let mut u: Vec<Vec<T>> = vec![vec![T::zero(); n + 1]; lift.len()];
    let mut v = vec![T::zero(); problem.m];
    let mut trace = Vec::new();

    for k in 1..=config.max_iterations {
        let rhs = recipe.assemble(&z, &u, &v, &problem.b);
        let x_new = match backend.apply(&handle, &rhs) {
            Ok(s) => s,
            Err(e) => return Ok(finish(SolveStatus::BackendFailure, x, k - 1, trace, Some(e.to_string()))),
        };

        let mut step = dist2(&x_new, &x);
        let mut consensus = T::zero();
        for i in 0..lift.len() {
            let cxd = lift.affine(i, &x_new);
            let mut zi: Vec<T> = cxd.iter().zip(&u[i]).map(|(&a, &ui)| a - inv_rho * ui).collect();
            project_soc_in_place(&mut zi)?;
            for ((uk, &zk), &ak) in u[i].iter_mut().zip(&zi).zip(&cxd) {
                *uk += rho * (zk - ak);
            }
            step += dist2(&zi, &z[i]);
            consensus += dist2(&zi, &cxd);
            z[i] = zi;
        }
        let ax = problem.a.mul_vec(&x_new);
        let mut eq_residual = vec![T::zero(); problem.m];
        for ((vi, ri), (&axi, &bi)) in v.iter_mut().zip(eq_residual.iter_mut()).zip(ax.iter().zip(&problem.b)) {
            *ri = axi - bi;
            *vi += rho * *ri;
        }
        let primal = norm2(&eq_residual) + consensus;
        trace.push(Residuals { step, primal });
        x = x_new;

        let size = norm2(&x);
        if !size.is_finite() || size > T::lit(DIVERGENCE_NORM) || !primal.is_finite() {
            return Ok(finish(SolveStatus::Diverged, x, k, trace, None));
        }
        if step <= eps && primal <= eps {
            return Ok(finish(SolveStatus::Converged, x, k, trace, None));
        }
    }
    Ok(finish(SolveStatus::IterationLimit, x, config.max_iterations, trace, None))
}
