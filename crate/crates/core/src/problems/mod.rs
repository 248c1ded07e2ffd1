//! Problem definitions, validation, random instance generation and file I/O.
//!
//! Two problem classes are supported:
//!
//! * [`SocpProblem`]: minimize `cᵀx` subject to `Ax = b` and `‖x[..n-1]‖₂ ≤ x[n-1]`.
//! * [`QcqpProblem`]: minimize `xᵀP₀x` subject to `xᵀPᵢx ≤ rᵢ` and `Ax = b`, with every
//!   `Pᵢ` positive semidefinite (homogeneous: no linear terms).

mod generate;
pub mod io;

use std::fmt;

pub use generate::{generate_qcqp, generate_socp, QCQP_RIDGE, QCQP_SLACK};
pub use io::{read_problem, write_problem, MatrixDoc, ProblemFile};

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Relative asymmetry above which a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SocpProblem<T> {
    pub n: usize,
    pub m: usize,
    pub c: Vec<T>,
    pub a: Matrix<T>,
    pub b: Vec<T>,
    /// Feasible point recorded by the generator, if any.
    pub witness: Option<Vec<T>>,
}

impl<T: Scalar> SocpProblem<T> {
    /// Builds a problem with `n` and `m` taken from the data. Dimensions are not checked;
    /// call [`SocpProblem::validate`].
    pub fn new(c: Vec<T>, a: Matrix<T>, b: Vec<T>) -> Self {
        Self { n: c.len(), m: b.len(), c, a, b, witness: None }
    }

    pub fn objective(&self, x: &[T]) -> T {
        crate::linalg::dot(&self.c, x)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.n < 2 {
            report.push(Issue::TooSmall { what: "n", min: 2, found: self.n });
        }
        report.check_len("c", self.n, self.c.len());
        report.check_len("b", self.m, self.b.len());
        report.check_len("A rows", self.m, self.a.rows());
        report.check_len("A cols", self.n, self.a.cols());
        if let Some(w) = &self.witness {
            report.check_len("witness_x0", self.n, w.len());
        }
        report.check_finite("c", &self.c);
        report.check_finite("b", &self.b);
        report.check_finite("A", self.a.as_slice());
        report
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadConstraint<T> {
    pub p: Matrix<T>,
    pub r: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QcqpProblem<T> {
    pub n: usize,
    pub m: usize,
    pub p0: Matrix<T>,
    pub constraints: Vec<QuadConstraint<T>>,
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub witness: Option<Vec<T>>,
}

impl<T: Scalar> QcqpProblem<T> {
    pub fn new(p0: Matrix<T>, constraints: Vec<QuadConstraint<T>>, a: Matrix<T>, b: Vec<T>) -> Self {
        Self { n: p0.rows(), m: b.len(), p0, constraints, a, b, witness: None }
    }

    /// `xᵀP₀x`.
    pub fn objective(&self, x: &[T]) -> T {
        crate::linalg::dot(x, &self.p0.mul_vec(x))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.n < 1 {
            report.push(Issue::TooSmall { what: "n", min: 1, found: self.n });
        }
        report.check_square("P0", self.n, &self.p0);
        report.check_finite("P0", self.p0.as_slice());
        for (i, con) in self.constraints.iter().enumerate() {
            let name = format!("P{}", i + 1);
            report.check_square(&name, self.n, &con.p);
            report.check_finite(&name, con.p.as_slice());
            if !con.r.is_finite() {
                report.push(Issue::NonFinite { what: format!("r{}", i + 1) });
            } else if con.r < T::zero() {
                report.push(Issue::NegativeBound { index: i + 1, value: con.r.as_f64() });
            }
        }
        report.check_len("b", self.m, self.b.len());
        report.check_len("A rows", self.m, self.a.rows());
        report.check_len("A cols", self.n, self.a.cols());
        report.check_finite("A", self.a.as_slice());
        report.check_finite("b", &self.b);
        if let Some(w) = &self.witness {
            report.check_len("witness_x0", self.n, w.len());
        }
        report
    }
}

/// One violated invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    DimensionMismatch { what: String, expected: usize, found: usize },
    TooSmall { what: &'static str, min: usize, found: usize },
    NonFinite { what: String },
    Asymmetric { what: String, relative_asymmetry: f64 },
    NegativeBound { index: usize, value: f64 },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::DimensionMismatch { what, expected, found } => {
                write!(f, "dimension mismatch: {what} is {found}, expected {expected}")
            }
            Issue::TooSmall { what, min, found } => write!(f, "{what} = {found} is below the minimum {min}"),
            Issue::NonFinite { what } => write!(f, "{what} has non-finite entries"),
            Issue::Asymmetric { what, relative_asymmetry } => {
                write!(f, "{what} is not symmetric (relative asymmetry {relative_asymmetry:e})")
            }
            Issue::NegativeBound { index, value } => write!(f, "r{index} = {value} is negative"),
        }
    }
}

/// Every invariant a problem violates. Empty means well-formed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn push(&mut self, issue: Issue) {
        self.issues.push(issue);
    }

    /// `Ok(())` when empty, otherwise the report wrapped as an error.
    pub fn into_result(self) -> crate::Result<()> {
        if self.is_empty() { Ok(()) } else { Err(crate::Error::InvalidProblem(self)) }
    }

    fn check_len(&mut self, what: &str, expected: usize, found: usize) {
        if expected != found {
            self.push(Issue::DimensionMismatch { what: what.to_string(), expected, found });
        }
    }

    fn check_finite<T: Scalar>(&mut self, what: &str, values: &[T]) {
        if values.iter().any(|v| !v.is_finite()) {
            self.push(Issue::NonFinite { what: what.to_string() });
        }
    }

    fn check_square<T: Scalar>(&mut self, what: &str, n: usize, m: &Matrix<T>) {
        if m.rows() != n || m.cols() != n {
            self.check_len(&format!("{what} rows"), n, m.rows());
            self.check_len(&format!("{what} cols"), n, m.cols());
            return;
        }
        let asym = m.relative_asymmetry().as_f64();
        if asym > SYMMETRY_TOLERANCE {
            self.push(Issue::Asymmetric { what: what.to_string(), relative_asymmetry: asym });
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "  - {issue}")?;
        }
        Ok(())
    }
}

/// Either problem class, as stored in a problem file.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem<T> {
    Socp(SocpProblem<T>),
    Qcqp(QcqpProblem<T>),
}

impl<T: Scalar> Problem<T> {
    pub fn validate(&self) -> ValidationReport {
        match self {
            Problem::Socp(p) => p.validate(),
            Problem::Qcqp(p) => p.validate(),
        }
    }

    pub fn kind(&self) -> ProblemKind {
        match self {
            Problem::Socp(_) => ProblemKind::Socp,
            Problem::Qcqp(_) => ProblemKind::Qcqp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Socp,
    Qcqp,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Socp => "socp",
            ProblemKind::Qcqp => "qcqp",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "socp" => Ok(ProblemKind::Socp),
            "qcqp" => Ok(ProblemKind::Qcqp),
            other => Err(format!("unknown problem kind `{other}` (expected socp or qcqp)")),
        }
    }
}
