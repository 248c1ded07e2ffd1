//! `xbar`: generate problems, solve them on the exact or crossbar backend, run variation
//! experiments and project onto the second-order cone.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver did not converge (`solve` only), 4 I/O.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use xbar_core::problems::{read_problem, write_problem};
use xbar_core::{
    generate_qcqp, generate_socp, project_soc, solve_qcqp, solve_socp, AdmmConfig, Backend, CrossbarBackend,
    DeviceParams, Error, ProblemF64, ProblemKind, SolveStatus, VariationModel,
};
use xbar_harness::{emit_report, run_experiment, ExperimentSpec, HarnessError};

#[derive(Parser)]
#[command(name = "xbar", version, about = "Crossbar-accelerated ADMM for SOCP and QCQP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Socp,
    Qcqp,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Socp => ProblemKind::Socp,
            Kind::Qcqp => ProblemKind::Qcqp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Crossbar,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and write the result as JSON.
    Solve {
        kind: Kind,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        backend: BackendArg,
        /// Defaults to 1 for SOCP and 10 for QCQP.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1e-3)]
        gmax: f64,
        #[arg(long, default_value_t = 1e-3)]
        gs: f64,
        /// Seed of the variation draw.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the per-iteration residual trace.
        #[arg(long)]
        trace: bool,
        /// Result file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random feasible problem.
    Gen {
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Number of quadratic constraints (QCQP).
        #[arg(long, default_value_t = 2)]
        mc: usize,
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a variation experiment and write trials.csv, aggregate.csv and summary.txt.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Use the full grid (sizes 16 to 1024, 200 trials).
        #[arg(long)]
        full: bool,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write chart.svg.
        #[arg(long)]
        chart: bool,
    },
    /// Project a vector onto the second-order cone.
    Project {
        /// Comma-separated components; the last one is the cone's scalar part.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Io { .. }) { 4 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Solver(e) => e.into(),
            HarnessError::Io { .. } => Failure { code: 4, message: e.to_string() },
            _ => Failure::input(e.to_string()),
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| HarnessError::io(p, e).into()),
        None => {
            // A closed pipe on stdout is not worth a panic.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn solve(
    kind: Kind,
    problem: &Path,
    backend: BackendArg,
    rho: Option<f64>,
    eps: f64,
    max_iter: Option<usize>,
    device: DeviceParams<f64>,
    sigma: f64,
    seed: u64,
    trace: bool,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let problem: ProblemF64 = read_problem(problem)?;
    let kind = ProblemKind::from(kind);
    if problem.kind() != kind {
        return Err(Failure::input(format!("problem file holds a {} problem, not {}", problem.kind().as_str(), kind.as_str())));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Failure::input(format!("sigma {sigma} must be finite and non-negative")));
    }
    let mut config = match kind {
        ProblemKind::Socp => AdmmConfig::socp().with_epsilon(eps),
        ProblemKind::Qcqp => AdmmConfig::qcqp(eps).with_rho(10.0),
    };
    if let Some(r) = rho {
        config = config.with_rho(r);
    }
    if let Some(k) = max_iter {
        config = config.with_max_iterations(k);
    }
    let backend = match backend {
        BackendArg::Exact => Backend::Exact,
        BackendArg::Crossbar => Backend::Crossbar(CrossbarBackend::new(device, VariationModel::new(sigma, seed))),
    };
    let result = match &problem {
        ProblemF64::Socp(p) => solve_socp(p, &config, &backend)?,
        ProblemF64::Qcqp(p) => solve_qcqp(p, &config, &backend)?,
    };
    let last = result.final_residuals();
    let mut doc = json!({
        "status": result.status.as_str(),
        "iterations": result.iterations,
        "objective": result.objective,
        "x": result.x,
        "final_residuals": last.map(|r| json!({ "step": r.step, "primal": r.primal })),
        "failure": result.failure,
    });
    if trace {
        doc["residual_trace"] =
            result.residual_trace.iter().map(|r| json!({ "step": r.step, "primal": r.primal })).collect();
    }
    let text = serde_json::to_string_pretty(&doc).expect("result document serializes");
    write_output(out, &text)?;
    Ok(if result.status == SolveStatus::Converged { 0 } else { 3 })
}

fn gen(kind: Kind, n: usize, m: usize, mc: usize, density: f64, seed: u64, out: &Path) -> Result<u8, Failure> {
    let problem: ProblemF64 = match kind {
        Kind::Socp => ProblemF64::Socp(generate_socp(n, m, density, seed)?),
        Kind::Qcqp => ProblemF64::Qcqp(generate_qcqp(n, mc, m, density, seed)?),
    };
    write_problem(&problem, out)?;
    Ok(0)
}

fn experiment(spec: &Path, out_dir: &Path, full: bool, workers: Option<usize>, chart: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(spec).map_err(|e| HarnessError::io(spec, e))?;
    let mut parsed: ExperimentSpec = serde_json::from_str(&text)
        .map_err(|source| HarnessError::Json { path: spec.display().to_string(), source })?;
    if full {
        parsed = parsed.into_full();
    }
    let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = run_experiment(&parsed, workers)?;
    let paths = emit_report(&report, out_dir, chart)?;
    print!("{}", xbar_harness::report::summary_text(&report));
    eprintln!("wrote {} and {}", paths.trials.display(), paths.aggregate.display());
    Ok(0)
}

fn project(vector: &str) -> Result<u8, Failure> {
    let v: Vec<f64> = vector
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Failure::input(format!("bad component {s:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    let p = project_soc(&v)?;
    println!("{}", serde_json::to_string(&p).expect("vector serializes"));
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve { kind, problem, backend, rho, eps, max_iter, sigma, gmax, gs, seed, trace, out } => {
            let device = DeviceParams { g_max: gmax, g_s: gs, on_off_ratio: None };
            solve(kind, &problem, backend, rho, eps, max_iter, device, sigma, seed, trace, out.as_deref())
        }
        Command::Gen { kind, n, m, mc, density, seed, out } => gen(kind, n, m, mc, density, seed, &out),
        Command::Experiment { spec, out_dir, full, workers, chart } => {
            experiment(&spec, &out_dir, full, workers, chart)
        }
        Command::Project { vector } => project(&vector),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
