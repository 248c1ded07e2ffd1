use std::path::Path;
use std::process::{Command, Output};

fn xbar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xbar")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn gen_then_solve_both_backends() {
    let dir = tempfile::tempdir().unwrap();
    let o = xbar(&["gen", "socp", "--n", "12", "--m", "9", "--density", "0.3", "--seed", "4", "--out", "p.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let exact = xbar(&["solve", "socp", "--problem", "p.json", "--eps", "1e-8", "--out", "exact.json"], dir.path());
    let xbar_run = xbar(
        &["solve", "socp", "--problem", "p.json", "--backend", "crossbar", "--eps", "1e-8", "--out", "xbar.json"],
        dir.path(),
    );
    assert_eq!(code(&exact), 0);
    assert_eq!(code(&xbar_run), 0);
    let read = |f: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(f)).unwrap()).unwrap()
    };
    let (a, b) = (read("exact.json"), read("xbar.json"));
    assert_eq!(a["status"], "converged");
    assert_eq!(a["x"].as_array().unwrap().len(), 12);
    let (oa, ob) = (a["objective"].as_f64().unwrap(), b["objective"].as_f64().unwrap());
    assert!((oa - ob).abs() <= 1e-6 * (1.0 + oa.abs()), "{oa} vs {ob}");
}

#[test]
fn iteration_cap_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&xbar(&["gen", "qcqp", "--n", "8", "--m", "4", "--out", "q.json"], dir.path())), 0);
    let o = xbar(&["solve", "qcqp", "--problem", "q.json", "--max-iter", "2", "--out", "r.json"], dir.path());
    assert_eq!(code(&o), 3);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r["status"], "iteration_limit");
    assert_eq!(r["iterations"], 2);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&xbar(&["gen", "socp", "--n", "8", "--m", "4", "--out", "p.json"], dir.path())), 0);
    // Kind mismatch, bad parameters, unknown flags, malformed vectors.
    assert_eq!(code(&xbar(&["solve", "qcqp", "--problem", "p.json"], dir.path())), 2);
    assert_eq!(code(&xbar(&["solve", "socp", "--problem", "p.json", "--eps", "-1"], dir.path())), 2);
    assert_eq!(code(&xbar(&["solve", "socp", "--problem", "p.json", "--sigma", "-0.1"], dir.path())), 2);
    assert_eq!(code(&xbar(&["gen", "socp", "--n", "4", "--m", "4", "--out", "x.json"], dir.path())), 2);
    assert_eq!(code(&xbar(&["solve", "socp", "--bogus"], dir.path())), 2);
    assert_eq!(code(&xbar(&["project", "--vector", "1,x"], dir.path())), 2);

    std::fs::write(dir.path().join("garbage.json"), "{ not json").unwrap();
    assert_eq!(code(&xbar(&["solve", "socp", "--problem", "garbage.json"], dir.path())), 2);
    assert_eq!(code(&xbar(&["experiment", "--spec", "garbage.json", "--out-dir", "o"], dir.path())), 2);
    std::fs::write(dir.path().join("bad.json"), r#"{"problem_kind":"socp","trials":0}"#).unwrap();
    let o = xbar(&["experiment", "--spec", "bad.json", "--out-dir", "o"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
}

#[test]
fn missing_files_exit_with_four_and_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = xbar(&["solve", "socp", "--problem", "absent.json"], dir.path());
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.json"));
    assert_eq!(code(&xbar(&["experiment", "--spec", "absent.json", "--out-dir", "o"], dir.path())), 4);
    assert_eq!(code(&xbar(&["gen", "socp", "--n", "8", "--m", "4", "--out", "no/such/dir/p.json"], dir.path())), 4);
}

#[test]
fn project_prints_the_projection() {
    let dir = tempfile::tempdir().unwrap();
    let o = xbar(&["project", "--vector", "3,4,0"], dir.path());
    assert_eq!(code(&o), 0);
    let v: Vec<f64> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, vec![1.5, 2.0, 2.5]);
    let o = xbar(&["project", "--vector", "-1,-2,-3"], dir.path());
    let v: Vec<f64> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, vec![0.0, 0.0, 0.0]);
}

#[test]
fn experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("spec.json"),
        r#"{"problem_kind":"socp","sizes":[8],"densities":[0.3],"sigmas":[0,0.05],"trials":3,"master_seed":2}"#,
    )
    .unwrap();
    let o = xbar(&["experiment", "--spec", "spec.json", "--out-dir", "out", "--workers", "2", "--chart"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trials.csv", "aggregate.csv", "summary.txt", "chart.svg"] {
        assert!(dir.path().join("out").join(f).is_file(), "{f}");
    }
    let trials = std::fs::read_to_string(dir.path().join("out/trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 2 * 3);
}
