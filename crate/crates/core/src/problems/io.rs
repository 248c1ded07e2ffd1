//! Text problem files: one JSON document per problem.
//!
//! ```text
//! {
//!   "kind": "socp", "n": 3, "m": 1,
//!   "c": [..], "b": [..],
//!   "a": {"rows": 1, "cols": 3, "triplets": [[0, 0, 1.0000000000000000e0], ...]},
//!   "witness_x0": [..]
//! }
//! ```
//!
//! QCQP files carry `p0` and `constraints: [{"p": .., "r": ..}, ..]` instead of `c`. Matrices are
//! accepted either as coordinate lists (zero-based) or as nested row arrays. Numbers are written
//! with 17 significant digits so reading back is exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{Problem, ProblemKind, QcqpProblem, QuadConstraint, SocpProblem};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A number that serializes with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite number {}", self.0)));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Num)
    }
}

fn nums<T: Scalar>(v: &[T]) -> Vec<Num> {
    v.iter().map(|x| Num(x.as_f64())).collect()
}

fn scalars<T: Scalar>(v: &[Num]) -> Vec<T> {
    v.iter().map(|x| T::lit(x.0)).collect()
}

/// Matrix encoding: coordinate list or nested rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixDoc {
    Sparse { rows: usize, cols: usize, triplets: Vec<(usize, usize, Num)> },
    Dense(Vec<Vec<Num>>),
}

impl MatrixDoc {
    pub fn sparse<T: Scalar>(m: &Matrix<T>) -> Self {
        MatrixDoc::Sparse {
            rows: m.rows(),
            cols: m.cols(),
            triplets: m.triplets().map(|(i, j, v)| (i, j, Num(v.as_f64()))).collect(),
        }
    }

    pub fn dense<T: Scalar>(m: &Matrix<T>) -> Self {
        MatrixDoc::Dense((0..m.rows()).map(|i| nums(m.row(i))).collect())
    }

    /// Decodes the matrix; `cols_hint` sizes an empty dense encoding.
    pub fn to_matrix<T: Scalar>(&self, cols_hint: usize) -> Result<Matrix<T>> {
        match self {
            MatrixDoc::Sparse { rows, cols, triplets } => {
                let mut m = Matrix::zeros(*rows, *cols);
                for &(i, j, v) in triplets {
                    if i >= *rows || j >= *cols {
                        return Err(Error::Format(format!("triplet ({i}, {j}) outside {rows}x{cols}")));
                    }
                    m[(i, j)] = T::lit(v.0);
                }
                Ok(m)
            }
            MatrixDoc::Dense(rows) if rows.is_empty() => Ok(Matrix::zeros(0, cols_hint)),
            MatrixDoc::Dense(rows) => {
                let converted: Vec<Vec<T>> = rows.iter().map(|r| scalars(r)).collect();
                Matrix::from_rows(&converted).ok_or_else(|| Error::Format("ragged dense matrix".into()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub p: MatrixDoc,
    pub r: Num,
}

/// Serialized form of a [`Problem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<ConstraintDoc>>,
    pub a: MatrixDoc,
    pub b: Vec<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_x0: Option<Vec<Num>>,
}

impl ProblemFile {
    pub fn from_problem<T: Scalar>(problem: &Problem<T>) -> Self {
        match problem {
            Problem::Socp(p) => ProblemFile {
                kind: ProblemKind::Socp,
                n: p.n,
                m: p.m,
                c: Some(nums(&p.c)),
                p0: None,
                constraints: None,
                a: MatrixDoc::sparse(&p.a),
                b: nums(&p.b),
                witness_x0: p.witness.as_deref().map(nums),
            },
            Problem::Qcqp(p) => ProblemFile {
                kind: ProblemKind::Qcqp,
                n: p.n,
                m: p.m,
                c: None,
                p0: Some(MatrixDoc::dense(&p.p0)),
                constraints: Some(
                    p.constraints
                        .iter()
                        .map(|c| ConstraintDoc { p: MatrixDoc::dense(&c.p), r: Num(c.r.as_f64()) })
                        .collect(),
                ),
                a: MatrixDoc::sparse(&p.a),
                b: nums(&p.b),
                witness_x0: p.witness.as_deref().map(nums),
            },
        }
    }

    pub fn into_problem<T: Scalar>(self) -> Result<Problem<T>> {
        let a = self.a.to_matrix(self.n)?;
        let b = scalars(&self.b);
        let witness = self.witness_x0.as_deref().map(scalars);
        match self.kind {
            ProblemKind::Socp => {
                let c = self.c.ok_or_else(|| Error::Format("socp problem is missing `c`".into()))?;
                Ok(Problem::Socp(SocpProblem { n: self.n, m: self.m, c: scalars(&c), a, b, witness }))
            }
            ProblemKind::Qcqp => {
                let p0 = self.p0.ok_or_else(|| Error::Format("qcqp problem is missing `p0`".into()))?;
                let constraints = self
                    .constraints
                    .unwrap_or_default()
                    .into_iter()
                    .map(|c| Ok(QuadConstraint { p: c.p.to_matrix(self.n)?, r: T::lit(c.r.0) }))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Problem::Qcqp(QcqpProblem {
                    n: self.n,
                    m: self.m,
                    p0: p0.to_matrix(self.n)?,
                    constraints,
                    a,
                    b,
                    witness,
                }))
            }
        }
    }
}

impl<T: Scalar> Problem<T> {
    pub fn to_document(&self) -> Result<String> {
        serde_json::to_string_pretty(&ProblemFile::from_problem(self)).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let doc: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        doc.into_problem()
    }
}

pub fn write_problem<T: Scalar>(problem: &Problem<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = problem.to_document()?;
    fs::write(path, text + "\n").map_err(|source| Error::Io { path: path.display().to_string(), source })
}

pub fn read_problem<T: Scalar>(path: impl AsRef<Path>) -> Result<Problem<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Problem::from_document(&text)
}
