//! Experiment harness for crossbar-accelerated ADMM: reference solves, Monte-Carlo trials over
//! device variation, CSV/summary reports and the `xbar` command-line tool.

pub mod experiment;
pub mod reference;
pub mod report;
pub mod seeds;

pub use experiment::{run_experiment, ExperimentReport, ExperimentSpec, ScenarioSummary, Stats, TrialOutcome, TrialStatus};
pub use reference::{reference_solve, relative_error, REFERENCE_EPSILON};
pub use report::{emit_report, ReportPaths};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid experiment spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Solver(#[from] xbar_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl HarnessError {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), source }
    }
}
