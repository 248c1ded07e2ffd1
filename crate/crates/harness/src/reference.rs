//! The software reference every crossbar result is measured against: the same ADMM loop on the
//! exact backend at a tight tolerance.

use xbar_core::{
    solve_qcqp, solve_socp, AdmmConfig, AdmmConfigF64, ExactBackend, ProblemF64, Result, SolveResultF64,
};

pub const REFERENCE_EPSILON: f64 = 1e-9;
pub const REFERENCE_MAX_ITERATIONS: usize = 1_000_000;

/// Reference configuration for a penalty `rho`.
pub fn reference_config(rho: f64) -> AdmmConfigF64 {
    AdmmConfig { rho, epsilon: REFERENCE_EPSILON, max_iterations: REFERENCE_MAX_ITERATIONS }
}

/// Solves `problem` with the exact backend at [`REFERENCE_EPSILON`]. Solver statuses are
/// returned unchanged; callers decide what a non-converged reference means.
pub fn reference_solve(problem: &ProblemF64, rho: f64) -> Result<SolveResultF64> {
    let config = reference_config(rho);
    match problem {
        ProblemF64::Socp(p) => solve_socp(p, &config, &ExactBackend),
        ProblemF64::Qcqp(p) => solve_qcqp(p, &config, &ExactBackend),
    }
}

/// `|obj − obj_ref| / max(1, |obj_ref|)`.
pub fn relative_error(objective: f64, reference: f64) -> f64 {
    (objective - reference).abs() / reference.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use xbar_core::{Matrix, QcqpProblem, QuadConstraint, SocpProblem, SolveStatus};

    #[test]
    fn hand_socp() {
        let p = ProblemF64::Socp(SocpProblem::new(vec![0.0, 1.0], Matrix::from_f64_rows(&[[1.0, 0.0]]), vec![1.0]));
        let r = reference_solve(&p, 1.0).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.objective - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn hand_qcqp() {
        let p = ProblemF64::Qcqp(QcqpProblem::new(
            Matrix::identity(2),
            vec![QuadConstraint { p: Matrix::identity(2), r: 4.0 }],
            Matrix::from_f64_rows(&[[1.0, 1.0]]),
            vec![2.0],
        ));
        let r = reference_solve(&p, 10.0).unwrap();
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.objective - 2.0).abs() <= 1e-6);
    }

    #[test]
    fn relative_error_guards_small_optima() {
        assert_eq!(relative_error(0.5, 0.0), 0.5);
        assert_eq!(relative_error(110.0, 100.0), 0.1);
        assert_eq!(relative_error(-3.0, -2.0), 0.5);
    }
}
