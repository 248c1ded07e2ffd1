//! Dense linear algebra kernels: row-major matrices, LU with partial pivoting,
//! a 1-norm condition estimator and a cyclic Jacobi symmetric eigensolver.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from a row-major buffer. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length does not match {rows}x{cols}");
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Ragged input yields `None`.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Option<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return None;
            }
            data.extend_from_slice(r);
        }
        Some(Self { rows: rows.len(), cols, data })
    }

    /// Convenience for tests and literals.
    pub fn from_f64_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let converted: Vec<Vec<T>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&v| T::lit(v)).collect()).collect();
        Self::from_rows(&converted).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ * x` without materializing the transpose.
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `selfᵀ * self`.
    pub fn gram(&self) -> Self {
        self.transpose().matmul(self)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn max_entry(&self) -> Option<T> {
        self.data.iter().copied().reduce(T::max)
    }

    pub fn min_entry(&self) -> Option<T> {
        self.data.iter().copied().reduce(T::min)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&v| v != T::zero()).count()
    }

    /// Largest `|a_ij - a_ji|` relative to the largest `|a_ij|`; zero for the zero matrix.
    pub fn relative_asymmetry(&self) -> T {
        debug_assert!(self.is_square());
        let mut scale = T::zero();
        let mut skew = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                scale = scale.max(self[(i, j)].abs());
                skew = skew.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        if scale == T::zero() { T::zero() } else { skew / scale }
    }

    /// Non-zero entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != T::zero())
            .map(move |(k, &v)| (k / self.cols, k % self.cols, v))
    }

    pub fn map<F: FnMut(T) -> T>(&self, mut f: F) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| U::lit(v.as_f64())).collect() }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&&self.data[i * self.cols..(i + 1) * self.cols]);
        }
        list.finish()
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
pub fn norm2<T: Scalar>(v: &[T]) -> T {
    // Scaled accumulation keeps huge iterates from overflowing before divergence checks.
    let big = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if big == T::zero() || !big.is_finite() {
        return big;
    }
    let s: T = v.iter().map(|&x| (x / big) * (x / big)).sum();
    big * s.sqrt()
}

/// `‖a - b‖₂`.
pub fn dist2<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let diff: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    norm2(&diff)
}

/// Numerical failure while factoring.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FactorError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular (zero pivot at column {column})")]
    ZeroPivot { column: usize },
}

/// `PA = LU` with partial (row) pivoting. Unit-diagonal `L` and `U` share storage.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    norm_one: T,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self, FactorError> {
        if !a.is_square() {
            return Err(FactorError::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == T::zero() || !pivot_abs.is_finite() {
                return Err(FactorError::ZeroPivot { column: k });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == T::zero() {
                    continue;
                }
                let (upper, lower) = lu.data.split_at_mut(i * n);
                let src = &upper[k * n + k + 1..k * n + n];
                for (dst, &s) in lower[k + 1..n].iter_mut().zip(src) {
                    *dst -= factor * s;
                }
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s = dot(&row[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = dot(&row[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transposed(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Uᵀ w = b, then Lᵀ v = w, then x = Pᵀ v.
        let mut w = b.to_vec();
        for i in 0..n {
            let wi = w[i] / self.lu[(i, i)];
            w[i] = wi;
            for j in i + 1..n {
                w[j] -= self.lu[(i, j)] * wi;
            }
        }
        for i in (0..n).rev() {
            let wi = w[i];
            for j in 0..i {
                w[j] -= self.lu[(i, j)] * wi;
            }
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// Hager/Higham estimate of `‖A‖₁ ‖A⁻¹‖₁`. A lower bound that is usually within a small factor.
    pub fn condition_estimate(&self) -> T {
        let n = self.dim();
        if n == 0 {
            return T::one();
        }
        let inv_n = T::one() / T::lit(n as f64);
        let mut x = vec![inv_n; n];
        let mut estimate = T::zero();
        for _ in 0..5 {
            let y = self.solve(&x);
            let y_norm: T = y.iter().map(|v| v.abs()).sum();
            if !y_norm.is_finite() {
                return T::infinity();
            }
            let xi: Vec<T> = y.iter().map(|&v| if v >= T::zero() { T::one() } else { -T::one() }).collect();
            let z = self.solve_transposed(&xi);
            let (j, z_max) = z
                .iter()
                .enumerate()
                .fold((0, -T::one()), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best });
            let converged = y_norm <= estimate || z_max <= dot(&z, &x);
            estimate = estimate.max(y_norm);
            if converged {
                break;
            }
            x = vec![T::zero(); n];
            x[j] = T::one();
        }
        // Alternating-sign probe catches cases the power iteration misses.
        let probe: Vec<T> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { T::one() } else { -T::one() };
                sign * (T::one() + T::lit(i as f64) / T::lit((n.max(2) - 1) as f64))
            })
            .collect();
        let y = self.solve(&probe);
        let alt = T::lit(2.0) * y.iter().map(|v| v.abs()).sum::<T>() / T::lit(3.0 * n as f64);
        estimate.max(alt) * self.norm_one
    }
}

/// Symmetric eigendecomposition `A = U diag(λ) Uᵀ` by cyclic Jacobi rotations.
/// Eigenvalues are returned ascending with matching columns of `U`.
pub fn symmetric_eigen<T: Scalar>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    // Work on the exactly symmetrized matrix.
    for i in 0..n {
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)]) / T::lit(2.0);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut v = Matrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)] * m[(i, j)]).sum();
        let diag: T = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = T::zero();
                m[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    (values, vectors)
}
