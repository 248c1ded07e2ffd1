//! Monte-Carlo runner: generate, reference-solve, program a crossbar per variation level and
//! compare.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xbar_core::crossbar::{DeviceParams, VariationModel};
use xbar_core::{
    generate_qcqp, generate_socp, solve_qcqp, solve_socp, AdmmConfig, AdmmConfigF64, CrossbarBackend,
    EpsilonPreset, ProblemF64, ProblemKind, SolveStatus,
};

use crate::reference::{reference_solve, relative_error};
use crate::seeds::{instance_seed, variation_seed};
use crate::HarnessError;

pub const DEFAULT_FAILURE_THRESHOLD: f64 = 0.05;
pub const DESK_SIZES: [usize; 4] = [16, 32, 64, 128];
pub const DESK_TRIALS: usize = 50;
pub const FULL_SIZES: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];
pub const FULL_TRIALS: usize = 200;

/// Stopping tolerance as a named preset or an explicit value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Epsilon {
    Preset(PresetName),
    Value(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Strict,
    Relaxed,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Preset(PresetName::Strict) => EpsilonPreset::Strict.value(),
            Epsilon::Preset(PresetName::Relaxed) => EpsilonPreset::Relaxed.value(),
            Epsilon::Value(v) => v,
        }
    }
}

impl Default for Epsilon {
    fn default() -> Self {
        Epsilon::Preset(PresetName::Strict)
    }
}

fn default_sizes() -> Vec<usize> {
    DESK_SIZES.to_vec()
}

fn default_densities() -> Vec<f64> {
    vec![0.1, 0.2]
}

fn default_sigmas() -> Vec<f64> {
    vec![0.0, 0.05, 0.1]
}

fn default_trials() -> usize {
    DESK_TRIALS
}

fn default_quad_constraints() -> usize {
    2
}

/// One experiment grid. Every field except `problem_kind` has a desk-scale default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem_kind: ProblemKind,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_densities")]
    pub densities: Vec<f64>,
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, alias = "epsilon_preset")]
    pub epsilon: Epsilon,
    /// Defaults to 1 for SOCP and 10 for QCQP.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub failure_threshold: Option<f64>,
    /// `m/n`; defaults to 0.75 for SOCP and 0.5 for QCQP. `m = ceil(ratio·n)` clamped to `[1, n-1]`.
    #[serde(default)]
    pub constraint_ratio: Option<f64>,
    /// QCQP only.
    #[serde(default = "default_quad_constraints")]
    pub quad_constraints: usize,
    /// Crossbar-solve iteration cap; defaults to the solver's own default.
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub g_max: Option<f64>,
    #[serde(default)]
    pub g_s: Option<f64>,
}

impl ExperimentSpec {
    pub fn new(problem_kind: ProblemKind) -> Self {
        Self {
            problem_kind,
            sizes: default_sizes(),
            densities: default_densities(),
            sigmas: default_sigmas(),
            trials: DESK_TRIALS,
            epsilon: Epsilon::default(),
            rho: None,
            master_seed: 0,
            failure_threshold: None,
            constraint_ratio: None,
            quad_constraints: default_quad_constraints(),
            max_iterations: None,
            g_max: None,
            g_s: None,
        }
    }

    /// Switches to the full published grid (sizes 2⁴…2¹⁰, 200 trials).
    pub fn into_full(mut self) -> Self {
        self.sizes = FULL_SIZES.to_vec();
        self.trials = FULL_TRIALS;
        self
    }

    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or(match self.problem_kind {
            ProblemKind::Socp => 1.0,
            ProblemKind::Qcqp => 10.0,
        })
    }

    pub fn failure_threshold(&self) -> f64 {
        self.failure_threshold.unwrap_or(DEFAULT_FAILURE_THRESHOLD)
    }

    pub fn constraint_count(&self, n: usize) -> usize {
        let ratio = self.constraint_ratio.unwrap_or(match self.problem_kind {
            ProblemKind::Socp => 0.75,
            ProblemKind::Qcqp => 0.5,
        });
        ((ratio * n as f64).ceil() as usize).clamp(1, n.saturating_sub(1).max(1))
    }

    pub fn device(&self) -> DeviceParams<f64> {
        let d = DeviceParams::default();
        DeviceParams { g_max: self.g_max.unwrap_or(d.g_max), g_s: self.g_s.unwrap_or(d.g_s), on_off_ratio: None }
    }

    /// Configuration for the crossbar solves.
    pub fn solver_config(&self) -> AdmmConfigF64 {
        let eps = self.epsilon.value();
        let base = match self.problem_kind {
            ProblemKind::Socp => AdmmConfig::socp().with_epsilon(eps),
            ProblemKind::Qcqp => AdmmConfig::qcqp(eps),
        }
        .with_rho(self.rho());
        match self.max_iterations {
            Some(k) => base.with_max_iterations(k),
            None => base,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Spec(msg));
        if self.sizes.is_empty() || self.densities.is_empty() || self.sigmas.is_empty() {
            return bad("sizes, densities and sigmas must be non-empty".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 2) {
            return bad(format!("size {n} is below 2"));
        }
        if let Some(d) = self.densities.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            return bad(format!("density {d} outside (0, 1]"));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return bad(format!("sigma {s} must be finite and non-negative"));
        }
        if self.problem_kind == ProblemKind::Qcqp && self.quad_constraints == 0 {
            return bad("quad_constraints must be at least 1".into());
        }
        if let Some(r) = self.constraint_ratio {
            if !(r > 0.0 && r < 1.0) {
                return bad(format!("constraint_ratio {r} outside (0, 1)"));
            }
        }
        if !(self.failure_threshold() > 0.0) {
            return bad("failure_threshold must be positive".into());
        }
        if self.max_iterations == Some(0) {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.device().g_max > 0.0 && self.device().g_s > 0.0) {
            return bad("g_max and g_s must be positive".into());
        }
        self.solver_config().validate()?;
        Ok(())
    }
}

/// Outcome of one trial at one variation level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialStatus {
    /// The reference did not converge (unbounded or degenerate draw); excluded from rates.
    Skipped,
    Solved(SolveStatus),
    /// The crossbar solve returned an error instead of a status.
    Error,
}

impl TrialStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialStatus::Skipped => "skipped",
            TrialStatus::Solved(s) => s.as_str(),
            TrialStatus::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub kind: ProblemKind,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    pub sigma: f64,
    pub trial: usize,
    /// Instance seed; the variation seed is derived from it and `sigma`.
    pub seed: u64,
    pub status: TrialStatus,
    pub iterations: usize,
    pub obj_ref: f64,
    pub obj_xbar: Option<f64>,
    pub rel_error: Option<f64>,
    pub failed: bool,
}

impl TrialOutcome {
    pub fn skipped(&self) -> bool {
        self.status == TrialStatus::Skipped
    }

    fn sort_key(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.density.total_cmp(&other.density))
            .then(self.sigma.total_cmp(&other.sigma))
            .then(self.trial.cmp(&other.trial))
    }
}

/// Statistics over a set of trials. Skipped trials count only toward `skipped`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stats {
    pub trials: usize,
    pub skipped: usize,
    pub failures: usize,
    /// `failures / (trials − skipped)`; NaN when every trial was skipped.
    pub failure_rate: f64,
    /// Over non-failed trials; NaN if there are none.
    pub mean_rel_error: f64,
    pub median_rel_error: f64,
    /// Over non-skipped trials.
    pub mean_iterations: f64,
}

impl Stats {
    pub fn from_trials<'a>(trials: impl IntoIterator<Item = &'a TrialOutcome>) -> Self {
        let mut count = 0;
        let mut skipped = 0;
        let mut failures = 0;
        let mut iterations = 0usize;
        let mut errors = Vec::new();
        for t in trials {
            count += 1;
            if t.skipped() {
                skipped += 1;
                continue;
            }
            iterations += t.iterations;
            if t.failed {
                failures += 1;
            } else if let Some(e) = t.rel_error {
                errors.push(e);
            }
        }
        let done = count - skipped;
        let failure_rate = if done == 0 { f64::NAN } else { failures as f64 / done as f64 };
        let mean_iterations = if done == 0 { f64::NAN } else { iterations as f64 / done as f64 };
        Stats {
            trials: count,
            skipped,
            failures,
            failure_rate,
            mean_rel_error: mean(&errors),
            median_rel_error: median(&mut errors),
            mean_iterations,
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    if values.len() % 2 == 1 {
        values[k]
    } else {
        (values[k - 1] + values[k]) / 2.0
    }
}

/// Aggregate row for one `(n, density, sigma)` scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSummary {
    pub kind: ProblemKind,
    pub n: usize,
    pub density: f64,
    pub sigma: f64,
    pub stats: Stats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    /// Sorted by `(n, density, sigma, trial)`.
    pub trials: Vec<TrialOutcome>,
    pub scenarios: Vec<ScenarioSummary>,
}

impl ExperimentReport {
    pub fn from_trials(spec: ExperimentSpec, mut trials: Vec<TrialOutcome>) -> Self {
        trials.sort_by(TrialOutcome::sort_key);
        let scenarios = trials
            .chunk_by(|a, b| a.n == b.n && a.density == b.density && a.sigma == b.sigma)
            .map(|group| ScenarioSummary {
                kind: group[0].kind,
                n: group[0].n,
                density: group[0].density,
                sigma: group[0].sigma,
                stats: Stats::from_trials(group),
            })
            .collect();
        Self { spec, trials, scenarios }
    }

    pub fn scenario(&self, n: usize, density: f64, sigma: f64) -> Option<&ScenarioSummary> {
        self.scenarios.iter().find(|s| s.n == n && s.density == density && s.sigma == sigma)
    }
}

struct Job {
    n: usize,
    density: f64,
    trial: usize,
}

fn generate(spec: &ExperimentSpec, n: usize, m: usize, density: f64, seed: u64) -> xbar_core::Result<ProblemF64> {
    Ok(match spec.problem_kind {
        ProblemKind::Socp => ProblemF64::Socp(generate_socp(n, m, density, seed)?),
        ProblemKind::Qcqp => ProblemF64::Qcqp(generate_qcqp(n, spec.quad_constraints, m, density, seed)?),
    })
}

fn run_job(spec: &ExperimentSpec, job: &Job) -> Vec<TrialOutcome> {
    let kind = spec.problem_kind;
    let m = spec.constraint_count(job.n);
    let seed = instance_seed(spec.master_seed, kind, job.n, job.density, job.trial);
    let blank = |sigma: f64, status: TrialStatus, obj_ref: f64| TrialOutcome {
        kind,
        n: job.n,
        m,
        density: job.density,
        sigma,
        trial: job.trial,
        seed,
        status,
        iterations: 0,
        obj_ref,
        obj_xbar: None,
        rel_error: None,
        failed: status == TrialStatus::Error,
    };

    let problem = match generate(spec, job.n, m, job.density, seed) {
        Ok(p) => p,
        Err(_) => return spec.sigmas.iter().map(|&s| blank(s, TrialStatus::Error, f64::NAN)).collect(),
    };
    let reference = match reference_solve(&problem, spec.rho()) {
        Ok(r) if r.status == SolveStatus::Converged => r,
        Ok(r) => return spec.sigmas.iter().map(|&s| blank(s, TrialStatus::Skipped, r.objective)).collect(),
        Err(_) => return spec.sigmas.iter().map(|&s| blank(s, TrialStatus::Skipped, f64::NAN)).collect(),
    };

    let config = spec.solver_config();
    let threshold = spec.failure_threshold();
    spec.sigmas
        .iter()
        .map(|&sigma| {
            let backend = CrossbarBackend::new(spec.device(), VariationModel::new(sigma, variation_seed(seed, sigma)));
            let result = match &problem {
                ProblemF64::Socp(p) => solve_socp(p, &config, &backend),
                ProblemF64::Qcqp(p) => solve_qcqp(p, &config, &backend),
            };
            match result {
                Ok(r) => {
                    let err = relative_error(r.objective, reference.objective);
                    let failed = r.status != SolveStatus::Converged || !(err <= threshold);
                    TrialOutcome {
                        status: TrialStatus::Solved(r.status),
                        iterations: r.iterations,
                        obj_xbar: Some(r.objective),
                        rel_error: Some(err),
                        failed,
                        ..blank(sigma, TrialStatus::Error, reference.objective)
                    }
                }
                Err(_) => blank(sigma, TrialStatus::Error, reference.objective),
            }
        })
        .collect()
}

/// Runs every `(n, density, trial)` instance on a pool of `workers` threads. Each instance is
/// reference-solved once and then crossbar-solved at every sigma. Output order is independent
/// of scheduling.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentReport, HarnessError> {
    spec.validate()?;
    let jobs: Vec<Job> = spec
        .sizes
        .iter()
        .flat_map(|&n| {
            spec.densities.iter().flat_map(move |&density| (0..spec.trials).map(move |trial| Job { n, density, trial }))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Spec(format!("cannot start worker pool: {e}")))?;
    let trials: Vec<TrialOutcome> = pool.install(|| jobs.par_iter().flat_map_iter(|job| run_job(spec, job)).collect());
    Ok(ExperimentReport::from_trials(spec.clone(), trials))
}
