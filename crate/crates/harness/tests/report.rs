use xbar_core::{ProblemKind, SolveStatus};
use xbar_harness::experiment::{median, ExperimentReport, ExperimentSpec, TrialOutcome, TrialStatus};
use xbar_harness::report::{aggregate_csv, trials_csv, AGGREGATE_HEADER, TRIALS_HEADER};
use xbar_harness::{emit_report, run_experiment};

fn small_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(ProblemKind::Socp);
    spec.sizes = vec![8, 12];
    spec.densities = vec![0.2, 0.4];
    spec.sigmas = vec![0.0, 0.05, 0.1];
    spec.trials = 4;
    spec.master_seed = 11;
    spec
}

fn parse_field(s: &str) -> Option<f64> {
    (!s.is_empty()).then(|| s.parse().unwrap())
}

#[test]
fn csv_schema_and_row_counts() {
    let spec = small_spec();
    let report = run_experiment(&spec, 1).unwrap();
    let trials = trials_csv(&report);
    let mut lines = trials.lines();
    assert_eq!(lines.next(), Some(TRIALS_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 3 * 4);
    for r in &rows {
        assert_eq!(r.len(), 13);
        assert_eq!(r[0], "socp");
        assert!(["converged", "iteration_limit", "diverged", "backend_failure", "skipped", "error"].contains(&r[7]));
        assert!(r[12] == "true" || r[12] == "false");
    }
    let agg = aggregate_csv(&report);
    let mut lines = agg.lines();
    assert_eq!(lines.next(), Some(AGGREGATE_HEADER));
    assert_eq!(lines.count(), 2 * 2 * 3);
}

/// Recomputes every aggregate row from the per-trial CSV alone.
#[test]
fn aggregates_follow_from_the_trial_rows() {
    let report = run_experiment(&small_spec(), 1).unwrap();
    let trials = trials_csv(&report);
    let agg = aggregate_csv(&report);
    for row in agg.lines().skip(1) {
        let a: Vec<&str> = row.split(',').collect();
        let group: Vec<Vec<&str>> = trials
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|t| t[1] == a[1] && t[3] == a[2] && t[4] == a[3])
            .collect();
        let done: Vec<&Vec<&str>> = group.iter().filter(|t| t[7] != "skipped").collect();
        let failures = done.iter().filter(|t| t[12] == "true").count();
        let mut errors: Vec<f64> =
            done.iter().filter(|t| t[12] == "false").map(|t| parse_field(t[11]).unwrap()).collect();
        let iterations: f64 = done.iter().map(|t| t[8].parse::<f64>().unwrap()).sum();

        assert_eq!(a[4].parse::<usize>().unwrap(), group.len());
        assert_eq!(a[5].parse::<usize>().unwrap(), group.len() - done.len());
        let close = |got: &str, want: f64| {
            let got: f64 = got.parse().unwrap();
            assert!(
                (got.is_nan() && want.is_nan()) || (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "{row}: {got} vs {want}"
            );
        };
        close(a[6], failures as f64 / done.len() as f64);
        close(a[7], errors.iter().sum::<f64>() / errors.len() as f64);
        close(a[8], median(&mut errors));
        close(a[9], iterations / done.len() as f64);
    }
}

#[test]
fn output_is_independent_of_worker_count() {
    let spec = small_spec();
    let one = run_experiment(&spec, 1).unwrap();
    let three = run_experiment(&spec, 3).unwrap();
    let (d1, d3) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    emit_report(&one, d1.path(), true).unwrap();
    emit_report(&three, d3.path(), true).unwrap();
    for f in ["trials.csv", "aggregate.csv", "summary.txt", "chart.svg"] {
        assert_eq!(std::fs::read(d1.path().join(f)).unwrap(), std::fs::read(d3.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn emit_report_names_the_failing_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let report = ExperimentReport::from_trials(small_spec(), vec![]);
    let err = emit_report(&report, &blocker.join("sub"), false).unwrap_err();
    assert!(err.to_string().contains("file"), "{err}");
}

fn outcome(trial: usize, status: TrialStatus, rel_error: Option<f64>, failed: bool, iterations: usize) -> TrialOutcome {
    TrialOutcome {
        kind: ProblemKind::Socp,
        n: 16,
        m: 12,
        density: 0.1,
        sigma: 0.05,
        trial,
        seed: trial as u64,
        status,
        iterations,
        obj_ref: 1.0,
        obj_xbar: rel_error.map(|e| 1.0 + e),
        rel_error,
        failed,
    }
}

#[test]
fn skipped_trials_leave_the_denominators() {
    let ok = TrialStatus::Solved(SolveStatus::Converged);
    let trials = vec![
        outcome(0, ok, Some(0.01), false, 10),
        outcome(1, ok, Some(0.2), true, 20),
        outcome(2, TrialStatus::Skipped, None, false, 0),
        outcome(3, TrialStatus::Solved(SolveStatus::IterationLimit), Some(0.001), true, 90),
        outcome(4, ok, Some(0.03), false, 40),
    ];
    let report = ExperimentReport::from_trials(small_spec(), trials);
    let s = &report.scenarios[0].stats;
    assert_eq!((s.trials, s.skipped, s.failures), (5, 1, 2));
    assert_eq!(s.failure_rate, 0.5);
    assert!((s.mean_rel_error - 0.02).abs() < 1e-15);
    assert!((s.median_rel_error - 0.02).abs() < 1e-15);
    assert_eq!(s.mean_iterations, 40.0);
}

#[test]
fn all_skipped_scenario_reports_nan() {
    let trials = (0..3).map(|t| outcome(t, TrialStatus::Skipped, None, false, 0)).collect();
    let report = ExperimentReport::from_trials(small_spec(), trials);
    let s = &report.scenarios[0].stats;
    assert!(s.failure_rate.is_nan() && s.mean_rel_error.is_nan() && s.mean_iterations.is_nan());
    assert!(aggregate_csv(&report).lines().nth(1).unwrap().ends_with("3,3,NaN,NaN,NaN,NaN"));
}
