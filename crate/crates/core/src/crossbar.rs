//! Simulated memristor crossbar.
//!
//! An `N×N` array has a memristor with conductance `g[i][j]` between word-line `i` and
//! bit-line `j`; every bit-line is terminated by a sense conductance `g_s`.
//!
//! * Forward mode drives the word-lines and reads the bit-line divider voltages:
//!   `V_O[i] = Σ_j g[j][i]·V_I[j] / (g_s + Σ_k g[k][i])`.
//! * Reverse mode holds the bit-line sense voltages and reads the word-line voltages that
//!   satisfy `Σ_i g[i][j]·V_I[i] = g_s·V_O[j]` for every bit-line `j`, i.e. `Gᵀ·V_I = g_s·V_O`.
//!
//! A coefficient matrix `M` is programmed transposed (`g[i][j] = g_max·M[j][i]`) so the
//! reverse-mode bit-line equations are the rows of `M`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Lu, Matrix};
use crate::problems::io::MatrixDoc;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Condition estimate above which the reverse solve is refused.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceParams<T> {
    /// Maximum programmable conductance (S).
    pub g_max: T,
    /// Sense conductance on each bit-line (S).
    pub g_s: T,
    /// `g_max / g_min`; `None` is an ideal zero off-state.
    pub on_off_ratio: Option<T>,
}

impl<T: Scalar> Default for DeviceParams<T> {
    fn default() -> Self {
        Self { g_max: T::lit(1e-3), g_s: T::lit(1e-3), on_off_ratio: None }
    }
}

impl<T: Scalar> DeviceParams<T> {
    pub fn g_min(&self) -> T {
        self.on_off_ratio.map_or(T::zero(), |r| self.g_max / r)
    }

    fn check(&self) -> Result<()> {
        let ratio_ok = self.on_off_ratio.is_none_or(|r| r > T::one());
        if self.g_max > T::zero() && self.g_s > T::zero() && ratio_ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid device parameters {self:?}")))
        }
    }
}

/// Multiplicative, truncated-normal conductance variation drawn once per programming event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationModel<T> {
    /// Relative standard deviation, e.g. 0.05.
    pub sigma: T,
    /// Deviates beyond `±truncation·sigma` are rejected and redrawn.
    pub truncation: T,
    pub seed: u64,
}

impl<T: Scalar> VariationModel<T> {
    pub fn ideal() -> Self {
        Self::new(T::zero(), 0)
    }

    pub fn new(sigma: T, seed: u64) -> Self {
        Self { sigma, truncation: T::lit(3.0), seed }
    }

    fn check(&self) -> Result<()> {
        if self.sigma >= T::zero() && self.truncation > T::zero() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid variation model {self:?}")))
        }
    }
}

/// A programmed array. Immutable; the reverse-solve factorization is built on first use.
#[derive(Debug)]
pub struct CrossbarArray<T> {
    conductance: Matrix<T>,
    nominal: Matrix<T>,
    params: DeviceParams<T>,
    reverse: OnceLock<std::result::Result<Lu<T>, f64>>,
}

impl<T: Clone> Clone for CrossbarArray<T> {
    fn clone(&self) -> Self {
        Self {
            conductance: self.conductance.clone(),
            nominal: self.nominal.clone(),
            params: self.params.clone(),
            reverse: OnceLock::new(),
        }
    }
}

/// Programs `m_norm` (entries in `[0, 1]`) into a fresh array.
pub fn program<T: Scalar>(
    m_norm: &Matrix<T>,
    params: DeviceParams<T>,
    variation: VariationModel<T>,
) -> Result<CrossbarArray<T>> {
    params.check()?;
    variation.check()?;
    if !m_norm.is_square() {
        return Err(Error::Dimension(format!(
            "crossbar needs a square matrix, got {}x{}",
            m_norm.rows(),
            m_norm.cols()
        )));
    }
    let n = m_norm.rows();
    for i in 0..n {
        for j in 0..n {
            let v = m_norm[(i, j)];
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::MappingRange { row: i, col: j, value: v.as_f64() });
            }
        }
    }

    let g_min = params.g_min();
    let nominal = m_norm.transpose().scale(params.g_max);
    let mut rng = ChaCha8Rng::seed_from_u64(variation.seed);
    let noisy = variation.sigma > T::zero();
    let conductance = nominal.map(|target| {
        let target = target.max(g_min);
        let delta = if noisy { truncated_normal(&mut rng, variation.truncation) * variation.sigma } else { T::zero() };
        (target * (T::one() + delta)).max(g_min).min(params.g_max)
    });
    Ok(CrossbarArray { conductance, nominal, params, reverse: OnceLock::new() })
}

fn truncated_normal<T: Scalar>(rng: &mut ChaCha8Rng, limit: T) -> T {
    let limit = limit.as_f64();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= limit {
            return T::lit(z);
        }
    }
}

impl<T: Scalar> CrossbarArray<T> {
    pub fn size(&self) -> usize {
        self.conductance.rows()
    }

    /// Realized (post-variation) conductances, `[word-line][bit-line]`.
    pub fn conductance(&self) -> &Matrix<T> {
        &self.conductance
    }

    /// Target conductances before variation.
    pub fn nominal(&self) -> &Matrix<T> {
        &self.nominal
    }

    pub fn params(&self) -> &DeviceParams<T> {
        &self.params
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.size() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("vector of length {len} applied to a {0}x{0} array", self.size())))
        }
    }

    /// Matrix–vector product in forward mode (divider readout).
    pub fn forward_mvm(&self, v_in: &[T]) -> Result<Vec<T>> {
        self.check_len(v_in.len())?;
        let g = &self.conductance;
        let mut out = g.tr_mul_vec(v_in);
        for (i, o) in out.iter_mut().enumerate() {
            let column: T = (0..self.size()).map(|k| g[(k, i)]).sum();
            *o /= self.params.g_s + column;
        }
        Ok(out)
    }

    /// Word-line voltages `V_I` with `Gᵀ·V_I = g_s·V_out`.
    pub fn reverse_solve(&self, v_out: &[T]) -> Result<Vec<T>> {
        self.check_len(v_out.len())?;
        let lu = self
            .reverse
            .get_or_init(|| {
                let gt = self.conductance.transpose();
                match Lu::factor(&gt) {
                    Ok(lu) => {
                        let cond = lu.condition_estimate().as_f64();
                        if cond.is_finite() && cond <= SINGULAR_CONDITION { Ok(lu) } else { Err(cond) }
                    }
                    Err(_) => Err(f64::INFINITY),
                }
            })
            .as_ref()
            .map_err(|&condition| Error::SingularArray { condition })?;
        let rhs: Vec<T> = v_out.iter().map(|&v| v * self.params.g_s).collect();
        Ok(lu.solve(&rhs))
    }

    /// Realized conductances in the problem-file coordinate encoding.
    pub fn to_matrix_doc(&self) -> MatrixDoc {
        MatrixDoc::sparse(&self.conductance)
    }
}
