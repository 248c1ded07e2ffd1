//! Solver configuration and results shared by the SOCP and QCQP loops.

use std::fmt;

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Iterates with a Euclidean norm above this are treated as diverged.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// ADMM tuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmmConfig<T> {
    /// Penalty / step size `ρ`.
    pub rho: T,
    /// Stopping tolerance `ε`.
    pub epsilon: T,
    pub max_iterations: usize,
}

/// Named tolerance regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EpsilonPreset {
    /// `1e-4`
    Strict,
    /// `1e-3`
    Relaxed,
}

impl EpsilonPreset {
    pub fn value(self) -> f64 {
        match self {
            EpsilonPreset::Strict => 1e-4,
            EpsilonPreset::Relaxed => 1e-3,
        }
    }
}

impl<T: Scalar> AdmmConfig<T> {
    /// SOCP defaults: `ρ = 1`, `ε = 1e-4`, 20000 iterations.
    pub fn socp() -> Self {
        Self { rho: T::one(), epsilon: T::lit(EpsilonPreset::Strict.value()), max_iterations: 20_000 }
    }

    /// QCQP defaults for a tolerance: `ρ = 10`, `round(5/ε)` iterations capped at 10⁶.
    pub fn qcqp(epsilon: T) -> Self {
        Self { rho: T::lit(10.0), epsilon, max_iterations: qcqp_iteration_budget(epsilon.as_f64()) }
    }

    pub fn with_rho(mut self, rho: T) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > T::zero() && self.rho.is_finite()) {
            return Err(Error::InvalidConfig(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.epsilon > T::zero() && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// `round(5/ε)` capped at 10⁶.
pub fn qcqp_iteration_budget(epsilon: f64) -> usize {
    ((5.0 / epsilon).round() as usize).clamp(1, 1_000_000)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    Diverged,
    BackendFailure,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::IterationLimit => "iteration_limit",
            SolveStatus::Diverged => "diverged",
            SolveStatus::BackendFailure => "backend_failure",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One entry per iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals<T> {
    /// Change of the iterate between consecutive iterations.
    pub step: T,
    /// Constraint-consensus residual.
    pub primal: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    pub x: Vec<T>,
    /// Objective evaluated at `x`.
    pub objective: T,
    pub iterations: usize,
    pub status: SolveStatus,
    pub residual_trace: Vec<Residuals<T>>,
    /// Backend error message when `status` is `BackendFailure`.
    pub failure: Option<String>,
}

impl<T: Scalar> SolveResult<T> {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn final_residuals(&self) -> Option<Residuals<T>> {
        self.residual_trace.last().copied()
    }
}
