//! Oracles shared by the harness tests. Nothing here calls into the crates' own linear algebra.

#![allow(dead_code)]

use xbar_harness::seeds::splitmix64;

/// Counter-based stream over splitmix64.
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(1);
        splitmix64(self.0)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Gauss-Jordan elimination with full pivoting.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| row.iter().copied().chain([bi]).collect()).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pi, mut pj, mut best) = (k, k, 0.0);
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().take(n).skip(k) {
                if v.abs() > best {
                    (pi, pj, best) = (i, j, v.abs());
                }
            }
        }
        if best < 1e-300 {
            return None;
        }
        m.swap(k, pi);
        m.iter_mut().for_each(|row| row.swap(k, pj));
        perm.swap(k, pj);
        let pivot = m[k][k];
        m[k].iter_mut().for_each(|v| *v /= pivot);
        let pivot_row = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != k && row[k] != 0.0 {
                let f = row[k];
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in 0..n {
        x[perm[k]] = m[k][n];
    }
    Some(x)
}

/// Bit-line voltages of the forward-mode circuit by nodal analysis: cell `(i, j)` connects
/// driven word-line `i` to bit-line `j`, every bit-line has `g_s` to ground.
pub fn nodal_forward(g: &[Vec<f64>], g_s: f64, v_in: &[f64]) -> Vec<f64> {
    let n = g.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { g_s + (0..n).map(|i| g[i][r]).sum::<f64>() } else { 0.0 }).collect())
        .collect();
    let b: Vec<f64> = (0..n).map(|r| (0..n).map(|i| g[i][r] * v_in[i]).sum()).collect();
    dense_solve(&a, &b).unwrap()
}

/// Diagonally dominant matrix with about a third of the entries zero and mixed signs elsewhere.
pub fn mixed_sign_rows(s: &mut Stream, n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0f64; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v = if s.uniform(0.0, 1.0) < 0.33 { 0.0 } else { s.uniform(-2.0, 2.0) };
        }
        let off: f64 = row.iter().map(|v| v.abs()).sum();
        row[i] = if s.next_u64() & 1 == 0 { off + 1.0 } else { -(off + 1.0) };
    }
    rows
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
