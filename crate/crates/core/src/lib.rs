//! ADMM solvers for second-order cone programs and homogeneous QCQPs whose per-iteration
//! linear system is solved on a simulated memristor crossbar.
//!
//! The constant system matrix (the SOCP KKT matrix or the QCQP normal-equation matrix) is made
//! non-negative with auxiliary compensation unknowns, scaled into `[0, g_max]`, programmed once
//! with multiplicative process variation, and then reverse-solved every iteration. An exact
//! dense-LU backend runs the same loop as the software reference.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at the crate root fix
//! the scalar to `f64`.
//!
//! ```
//! use xbar_core::{solve_socp, AdmmConfig, ExactBackend, Matrix, SocpProblem};
//!
//! // min x₂  s.t.  x₁ = 1,  |x₁| ≤ x₂
//! let problem: SocpProblem<f64> = SocpProblem::new(vec![0.0, 1.0], Matrix::from_f64_rows(&[[1.0, 0.0]]), vec![1.0]);
//! let result = solve_socp(&problem, &AdmmConfig::socp().with_epsilon(1e-6), &ExactBackend).unwrap();
//! assert!((result.objective - 1.0).abs() < 1e-4);
//! ```

pub mod backend;
pub mod crossbar;
mod error;
pub mod linalg;
pub mod mapping;
pub mod problems;
pub mod qcqp;
mod scalar;
pub mod socp;
pub mod solve;

pub use backend::{Backend, CrossbarBackend, ExactBackend, LinearBackend};
pub use crossbar::{program, CrossbarArray, DeviceParams, VariationModel};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use mapping::{build_qcqp_normal, build_socp_kkt, crossbar_solve, eliminate_negatives, AugmentedSystem};
pub use problems::{
    generate_qcqp, generate_socp, Problem, ProblemKind, QcqpProblem, QuadConstraint, SocpProblem, ValidationReport,
};
pub use qcqp::{factor_psd, lift_constraints, solve_qcqp, ConeLift};
pub use scalar::Scalar;
pub use socp::{project_soc, solve_socp};
pub use solve::{AdmmConfig, EpsilonPreset, Residuals, SolveResult, SolveStatus};

pub type MatrixF64 = Matrix<f64>;
pub type SocpProblemF64 = SocpProblem<f64>;
pub type QcqpProblemF64 = QcqpProblem<f64>;
pub type ProblemF64 = Problem<f64>;
pub type SolveResultF64 = SolveResult<f64>;
pub type AdmmConfigF64 = AdmmConfig<f64>;
pub type CrossbarArrayF64 = CrossbarArray<f64>;
pub type AugmentedSystemF64 = AugmentedSystem<f64>;
pub type BackendF64 = Backend<f64>;

pub type SocpProblemF32 = SocpProblem<f32>;
pub type QcqpProblemF32 = QcqpProblem<f32>;
pub type SolveResultF32 = SolveResult<f32>;
