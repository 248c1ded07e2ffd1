//! Seeded random instances that are feasible by construction.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{QcqpProblem, QuadConstraint, SocpProblem};
use crate::linalg::{norm2, Matrix};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Multiplicative slack on the quadratic bounds at the witness: `rᵢ = (1 + γ) x₀ᵀPᵢx₀`.
pub const QCQP_SLACK: f64 = 0.5;
/// Ridge added to the objective Gram matrix so the objective is strictly convex.
pub const QCQP_RIDGE: f64 = 1e-3;

fn normal<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Random `m×n` matrix with standard-normal nonzeros.
///
/// The pattern always contains a covering skeleton: row `i < m` gets a distinct column, and
/// every leftover column gets one random row. That makes the matrix structurally full row rank
/// with no empty rows or columns. The remaining nonzeros are placed uniformly until the count
/// reaches `round(density·m·n)`.
fn sparse_normal<T: Scalar>(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> Matrix<T> {
    let mut used = vec![false; m * n];
    let mut cols: Vec<usize> = (0..n).collect();
    cols.shuffle(rng);
    for (k, &j) in cols.iter().enumerate() {
        let i = if k < m { k } else { rng.random_range(0..m) };
        used[i * n + j] = true;
    }
    let target = ((density * (m * n) as f64).round() as usize).min(m * n);
    let extra = target.saturating_sub(n);
    if extra > 0 {
        let free: Vec<usize> = (0..m * n).filter(|&k| !used[k]).collect();
        for k in index::sample(rng, free.len(), extra.min(free.len())) {
            used[free[k]] = true;
        }
    }
    let mut a = Matrix::zeros(m, n);
    for (k, _) in used.iter().enumerate().filter(|(_, &u)| u) {
        a[(k / n, k % n)] = normal(rng);
    }
    a
}

fn dense_normal<T: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| normal(rng)).collect())
}

fn check_density(density: f64) -> Result<()> {
    if density > 0.0 && density <= 1.0 {
        Ok(())
    } else {
        Err(Error::Dimension(format!("density {density} outside (0, 1]")))
    }
}

/// Random SOCP with `b = A·x₀` for a recorded strictly cone-interior witness `x₀`.
pub fn generate_socp<T: Scalar>(n: usize, m: usize, density: f64, seed: u64) -> Result<SocpProblem<T>> {
    if n < 2 || m < 1 || m >= n {
        return Err(Error::Dimension(format!("generate_socp needs 2 <= n and 1 <= m < n (got n={n}, m={m})")));
    }
    check_density(density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = sparse_normal::<T>(&mut rng, m, n, density);

    let mut x0: Vec<T> = (0..n - 1).map(|_| normal(&mut rng)).collect();
    let head = norm2(&x0);
    let margin: T = normal::<T>(&mut rng).abs() + T::lit(0.5);
    x0.push(head + margin);

    let b = a.mul_vec(&x0);
    let c = (0..n).map(|_| normal(&mut rng)).collect();
    Ok(SocpProblem { n, m, c, a, b, witness: Some(x0) })
}

/// Random homogeneous QCQP with PSD Gram-matrix data and a recorded feasible witness.
pub fn generate_qcqp<T: Scalar>(
    n: usize,
    m_c: usize,
    m: usize,
    density: f64,
    seed: u64,
) -> Result<QcqpProblem<T>> {
    if n < 1 || m_c < 1 || m < 1 || m >= n {
        return Err(Error::Dimension(format!(
            "generate_qcqp needs n >= 1, m_c >= 1 and 1 <= m < n (got n={n}, m_c={m_c}, m={m})"
        )));
    }
    check_density(density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = sparse_normal::<T>(&mut rng, m, n, density);

    let mut p0 = dense_normal::<T>(&mut rng, n, n).gram();
    for i in 0..n {
        p0[(i, i)] += T::lit(QCQP_RIDGE);
    }
    let factors: Vec<Matrix<T>> = (0..m_c).map(|_| dense_normal(&mut rng, n, n)).collect();
    let x0: Vec<T> = (0..n).map(|_| normal(&mut rng)).collect();

    let constraints = factors
        .iter()
        .map(|f| {
            let p = f.gram();
            let fx = f.mul_vec(&x0);
            let r = crate::linalg::dot(&fx, &fx) * T::lit(1.0 + QCQP_SLACK);
            QuadConstraint { p, r }
        })
        .collect();
    let b = a.mul_vec(&x0);
    Ok(QcqpProblem { n, m, p0, constraints, a, b, witness: Some(x0) })
}
