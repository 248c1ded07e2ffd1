//! Report files: per-trial CSV, per-scenario CSV, a plain-text summary and an optional SVG chart.
//!
//! Floats are written in shortest round-trip form so the CSVs re-parse to the exact values.
//! Missing values are empty fields; undefined statistics are `NaN`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::experiment::{ExperimentReport, ScenarioSummary};
use crate::HarnessError;

pub const TRIALS_HEADER: &str = "kind,n,m,density,sigma,trial,seed,status,iterations,obj_ref,obj_xbar,rel_error,failed";
pub const AGGREGATE_HEADER: &str =
    "kind,n,density,sigma,trials,skipped,failure_rate,mean_rel_error,median_rel_error,mean_iterations";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trials_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(TRIALS_HEADER);
    out.push('\n');
    for t in &report.trials {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            t.kind.as_str(),
            t.n,
            t.m,
            t.density,
            t.sigma,
            t.trial,
            t.seed,
            t.status.as_str(),
            t.iterations,
            t.obj_ref,
            opt(t.obj_xbar),
            opt(t.rel_error),
            t.failed
        );
    }
    out
}

pub fn aggregate_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(AGGREGATE_HEADER);
    out.push('\n');
    for s in &report.scenarios {
        let st = &s.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.kind.as_str(),
            s.n,
            s.density,
            s.sigma,
            st.trials,
            st.skipped,
            st.failure_rate,
            st.mean_rel_error,
            st.median_rel_error,
            st.mean_iterations
        );
    }
    out
}

pub fn summary_text(report: &ExperimentReport) -> String {
    let spec = &report.spec;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} experiment: {} trials per scenario, eps {:e}, rho {}, failure threshold {}, master seed {}",
        spec.problem_kind.as_str(),
        spec.trials,
        spec.epsilon.value(),
        spec.rho(),
        spec.failure_threshold(),
        spec.master_seed
    );
    let _ = writeln!(
        out,
        "{:>6} {:>8} {:>6} {:>7} {:>8} {:>9} {:>12} {:>12} {:>10}",
        "n", "density", "sigma", "trials", "skipped", "failures", "mean err", "median err", "mean its"
    );
    for s in &report.scenarios {
        let st = &s.stats;
        let _ = writeln!(
            out,
            "{:>6} {:>8} {:>6} {:>7} {:>8} {:>8.1}% {:>12.3e} {:>12.3e} {:>10.1}",
            s.n,
            s.density,
            s.sigma,
            st.trials,
            st.skipped,
            100.0 * st.failure_rate,
            st.mean_rel_error,
            st.median_rel_error,
            st.mean_iterations
        );
    }
    out
}

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

/// Two panels against log₂ n: mean relative error (log scale) and failure rate, one polyline
/// per `(density, sigma)`.
pub fn chart_svg(report: &ExperimentReport) -> String {
    let mut series: Vec<((f64, f64), Vec<&ScenarioSummary>)> = Vec::new();
    for s in &report.scenarios {
        match series.iter_mut().find(|(k, _)| *k == (s.density, s.sigma)) {
            Some((_, v)) => v.push(s),
            None => series.push(((s.density, s.sigma), vec![s])),
        }
    }
    let log_n: Vec<f64> = report.scenarios.iter().map(|s| (s.n as f64).log2()).collect();
    let x_lo = log_n.iter().copied().fold(f64::INFINITY, f64::min);
    let x_hi = log_n.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(x_lo + 1.0);
    let errs: Vec<f64> = report
        .scenarios
        .iter()
        .map(|s| s.stats.mean_rel_error)
        .filter(|e| e.is_finite() && *e > 0.0)
        .map(f64::log10)
        .collect();
    let e_lo = errs.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let e_hi = errs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil().max(e_lo + 1.0);
    let (e_lo, e_hi) = if errs.is_empty() { (-6.0, 0.0) } else { (e_lo, e_hi) };

    let width = 2.0 * (PANEL_W + 2.0 * MARGIN);
    let height = PANEL_H + 2.0 * MARGIN + 20.0 * series.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let panels: [(&str, f64, Box<dyn Fn(&ScenarioSummary) -> Option<f64>>, (f64, f64)); 2] = [
        (
            "mean relative error (log10)",
            0.0,
            Box::new(|s: &ScenarioSummary| {
                let e = s.stats.mean_rel_error;
                (e.is_finite() && e > 0.0).then(|| e.log10())
            }),
            (e_lo, e_hi),
        ),
        (
            "failure rate",
            PANEL_W + 2.0 * MARGIN,
            Box::new(|s: &ScenarioSummary| s.stats.failure_rate.is_finite().then_some(s.stats.failure_rate)),
            (0.0, 1.0),
        ),
    ];
    for (title, dx, value, (y_lo, y_hi)) in &panels {
        let ox = dx + MARGIN;
        let oy = MARGIN;
        let px = |x: f64| ox + (x - x_lo) / (x_hi - x_lo) * PANEL_W;
        let py = |y: f64| oy + PANEL_H - (y - y_lo) / (y_hi - y_lo) * PANEL_H;
        let _ = writeln!(
            svg,
            r#"<rect x="{ox}" y="{oy}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="gray"/>"#
        );
        let _ = writeln!(svg, r#"<text x="{ox}" y="{}">{title}</text>"#, oy - 10.0);
        let _ = writeln!(svg, r#"<text x="{ox}" y="{}">{y_hi}</text>"#, oy + 12.0);
        let _ = writeln!(svg, r#"<text x="{ox}" y="{}">{y_lo}</text>"#, oy + PANEL_H - 4.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">log2 n</text>"#, ox + PANEL_W - 40.0, oy + PANEL_H + 16.0);
        for (i, (_, points)) in series.iter().enumerate() {
            let coords: Vec<String> = points
                .iter()
                .filter_map(|s| value(s).map(|v| format!("{:.2},{:.2}", px((s.n as f64).log2()), py(v))))
                .collect();
            if coords.is_empty() {
                continue;
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                COLORS[i % COLORS.len()],
                coords.join(" ")
            );
        }
    }
    for (i, ((density, sigma), _)) in series.iter().enumerate() {
        let y = PANEL_H + 2.0 * MARGIN + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN}" y="{y}" fill="{}">density {density}, sigma {sigma}</text>"#,
            COLORS[i % COLORS.len()]
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Files written by [`emit_report`].
#[derive(Clone, Debug)]
pub struct ReportPaths {
    pub trials: PathBuf,
    pub aggregate: PathBuf,
    pub summary: PathBuf,
    pub chart: Option<PathBuf>,
}

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Writes `trials.csv`, `aggregate.csv`, `summary.txt` and optionally `chart.svg` into `dir`,
/// creating it if needed.
pub fn emit_report(report: &ExperimentReport, dir: &Path, chart: bool) -> Result<ReportPaths, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let paths = ReportPaths {
        trials: dir.join("trials.csv"),
        aggregate: dir.join("aggregate.csv"),
        summary: dir.join("summary.txt"),
        chart: chart.then(|| dir.join("chart.svg")),
    };
    write(&paths.trials, &trials_csv(report))?;
    write(&paths.aggregate, &aggregate_csv(report))?;
    write(&paths.summary, &summary_text(report))?;
    if let Some(p) = &paths.chart {
        write(p, &chart_svg(report))?;
    }
    Ok(paths)
}
