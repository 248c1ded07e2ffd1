use proptest::prelude::*;
use xbar_core::problems::{read_problem, write_problem};
use xbar_core::{generate_qcqp, generate_socp, Problem, ProblemF64};

fn assert_same(a: &ProblemF64, b: &ProblemF64) {
    // The format stores 17 significant digits, which round-trips f64 exactly.
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn socp_files_round_trip(n in 2usize..20, frac in 0.1f64..0.9, density in 0.05f64..1.0, seed in any::<u64>()) {
        let m = ((n as f64 * frac) as usize).clamp(1, n - 1);
        let p = Problem::Socp(generate_socp::<f64>(n, m, density, seed).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        write_problem(&p, &path).unwrap();
        assert_same(&read_problem(&path).unwrap(), &p);
    }

    #[test]
    fn qcqp_files_round_trip(n in 2usize..12, mc in 1usize..4, density in 0.05f64..1.0, seed in any::<u64>()) {
        let p = Problem::Qcqp(generate_qcqp::<f64>(n, mc, n / 2, density, seed).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.json");
        write_problem(&p, &path).unwrap();
        assert_same(&read_problem(&path).unwrap(), &p);
    }
}

#[test]
fn missing_file_reports_the_path() {
    let err = read_problem::<f64>("/nonexistent/dir/p.json").unwrap_err();
    assert!(err.to_string().contains("/nonexistent/dir/p.json"), "{err}");
}

#[test]
fn malformed_documents_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"kind":"socp","n":2,"m":1,"a":[[1.0]],"b":[1.0]}"#).unwrap();
    assert!(read_problem::<f64>(&path).is_err());
}
