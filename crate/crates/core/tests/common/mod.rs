//! Independent oracles for the integration tests. Nothing here calls into the crate's own
//! linear algebra.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xbar_core::Matrix;

/// Gauss–Jordan elimination with full pivoting on a plain `Vec<Vec<f64>>`.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for i in k..n {
            for j in k..n {
                if m[i][j].abs() > best {
                    best = m[i][j].abs();
                    pi = i;
                    pj = j;
                }
            }
        }
        if best < 1e-300 {
            return None;
        }
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        perm.swap(k, pj);
        let pivot = m[k][k];
        for v in m[k].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != k && row[k] != 0.0 {
                let f = row[k];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in 0..n {
        x[perm[k]] = m[k][n];
    }
    Some(x)
}

pub fn to_rows(m: &Matrix<f64>) -> Vec<Vec<f64>> {
    m.to_rows()
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixed-sign matrix with roughly a third of the entries negative and a third zero, made
/// diagonally dominant so it is comfortably nonsingular.
pub fn mixed_sign_matrix(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let mut rows = vec![vec![0.0f64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for v in row.iter_mut() {
            let pick: f64 = rng.random();
            *v = if pick < 0.33 { 0.0 } else { rng.random_range(-2.0..2.0) };
        }
        let off: f64 = row.iter().map(|v| v.abs()).sum();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        row[i] = sign * (off + 1.0);
    }
    Matrix::from_rows(&rows).unwrap()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()
}
