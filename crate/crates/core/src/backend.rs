//! Pluggable linear-system step.
//!
//! Both ADMM loops factor one constant matrix per solve and then solve against a new
//! right-hand side every iteration. [`ExactBackend`] does this with a dense LU factorization;
//! [`CrossbarBackend`] eliminates negatives, programs a simulated crossbar (with process
//! variation) and reads the solution back through the reverse-solve circuit model.

use crate::crossbar::{program, CrossbarArray, DeviceParams, VariationModel, SINGULAR_CONDITION};
use crate::linalg::{Lu, Matrix};
use crate::mapping::{crossbar_solve, eliminate_negatives, AugmentedSystem, RhsLayout, SegmentKind};
use crate::scalar::Scalar;
use crate::{Error, Result};

pub trait LinearBackend<T: Scalar> {
    type Handle;

    /// Called once per solve with the constant left-hand matrix.
    fn prepare(&self, matrix: &Matrix<T>, layout: &RhsLayout) -> Result<Self::Handle>;

    /// Called once per iteration; returns the solution of the prepared system.
    fn apply(&self, handle: &Self::Handle, rhs: &[T]) -> Result<Vec<T>>;
}

/// Software reference: dense LU with partial pivoting.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactBackend;

impl<T: Scalar> LinearBackend<T> for ExactBackend {
    type Handle = Lu<T>;

    fn prepare(&self, matrix: &Matrix<T>, _layout: &RhsLayout) -> Result<Lu<T>> {
        let lu = Lu::factor(matrix).map_err(|e| Error::Singular(e.to_string()))?;
        let condition = lu.condition_estimate().as_f64();
        if !(condition <= SINGULAR_CONDITION) {
            return Err(Error::Singular(format!("condition estimate {condition:e}")));
        }
        Ok(lu)
    }

    fn apply(&self, lu: &Lu<T>, rhs: &[T]) -> Result<Vec<T>> {
        if rhs.len() != lu.dim() {
            return Err(Error::Dimension(format!("rhs length {} for a system of size {}", rhs.len(), lu.dim())));
        }
        Ok(lu.solve(rhs))
    }
}

/// Simulated crossbar; one variation draw per `prepare`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossbarBackend<T> {
    pub params: DeviceParams<T>,
    pub variation: VariationModel<T>,
}

impl<T: Scalar> CrossbarBackend<T> {
    pub fn new(params: DeviceParams<T>, variation: VariationModel<T>) -> Self {
        Self { params, variation }
    }

    pub fn ideal() -> Self {
        Self::new(DeviceParams::default(), VariationModel::ideal())
    }
}

#[derive(Clone, Debug)]
pub struct CrossbarHandle<T> {
    pub system: AugmentedSystem<T>,
    pub array: CrossbarArray<T>,
}

impl<T: Scalar> LinearBackend<T> for CrossbarBackend<T> {
    type Handle = CrossbarHandle<T>;

    fn prepare(&self, matrix: &Matrix<T>, layout: &RhsLayout) -> Result<CrossbarHandle<T>> {
        let mask: Vec<bool> = (0..matrix.rows()).map(|i| layout.kind_of(i) != Some(SegmentKind::Varying)).collect();
        let system = eliminate_negatives(matrix, &mask)?;
        let array = program(&system.normalized(), self.params, self.variation)?;
        // Factor now so a singular array is reported at programming time.
        array.reverse_solve(&vec![T::zero(); array.size()])?;
        Ok(CrossbarHandle { system, array })
    }

    fn apply(&self, handle: &CrossbarHandle<T>, rhs: &[T]) -> Result<Vec<T>> {
        if rhs.len() != handle.system.n_core() {
            return Err(Error::Dimension(format!(
                "rhs length {} for a system of size {}",
                rhs.len(),
                handle.system.n_core()
            )));
        }
        crossbar_solve(&handle.system, &handle.system.extend_rhs(rhs), &handle.array)
    }
}

/// Runtime choice between the two backends.
#[derive(Clone, Copy, Debug)]
pub enum Backend<T> {
    Exact,
    Crossbar(CrossbarBackend<T>),
}

#[derive(Clone, Debug)]
pub enum BackendHandle<T> {
    Exact(Lu<T>),
    Crossbar(Box<CrossbarHandle<T>>),
}

impl<T: Scalar> LinearBackend<T> for Backend<T> {
    type Handle = BackendHandle<T>;

    fn prepare(&self, matrix: &Matrix<T>, layout: &RhsLayout) -> Result<BackendHandle<T>> {
        match self {
            Backend::Exact => ExactBackend.prepare(matrix, layout).map(BackendHandle::Exact),
            Backend::Crossbar(b) => b.prepare(matrix, layout).map(|h| BackendHandle::Crossbar(Box::new(h))),
        }
    }

    fn apply(&self, handle: &BackendHandle<T>, rhs: &[T]) -> Result<Vec<T>> {
        match (self, handle) {
            (Backend::Exact, BackendHandle::Exact(lu)) => ExactBackend.apply(lu, rhs),
            (Backend::Crossbar(b), BackendHandle::Crossbar(h)) => b.apply(h, rhs),
            _ => Err(Error::InvalidConfig("backend handle prepared by a different backend".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree_without_variation() {
        let k: Matrix<f64> = Matrix::from_f64_rows(&[[1.0, 0.0, -0.5], [0.0, 1.0, 2.0], [-0.5, 2.0, 0.0]]);
        let layout = RhsLayout::varying(3);
        let exact = ExactBackend.prepare(&k, &layout).unwrap();
        let xbar = CrossbarBackend::ideal();
        let handle = xbar.prepare(&k, &layout).unwrap();
        let rhs = [0.3, -1.0, 2.0];
        let a = ExactBackend.apply(&exact, &rhs).unwrap();
        let b = xbar.apply(&handle, &rhs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let residual: Vec<f64> = k.mul_vec(&a).iter().zip(rhs).map(|(l, r)| l - r).collect();
        assert!(crate::linalg::norm2(&residual) < 1e-12 * crate::linalg::norm2(&rhs));
    }

    #[test]
    fn singular_systems_fail_at_prepare() {
        let k = Matrix::from_f64_rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let layout = RhsLayout::varying(2);
        assert!(LinearBackend::<f64>::prepare(&ExactBackend, &k, &layout).is_err());
        assert!(matches!(CrossbarBackend::ideal().prepare(&k, &layout), Err(Error::SingularArray { .. })));
    }

    #[test]
    fn dynamic_backend_rejects_foreign_handle() {
        let k = Matrix::<f64>::identity(2);
        let layout = RhsLayout::varying(2);
        let handle = Backend::Exact.prepare(&k, &layout).unwrap();
        assert!(Backend::Crossbar(CrossbarBackend::ideal()).apply(&handle, &[1.0, 2.0]).is_err());
    }
}
