// SPDX-License-Identifier: Apache-2.0

//! Execute a [`RunConfig`]: compute series, write CSVs and JSON reports.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use twophoton_core::dynamics::uniform_grid;
use twophoton_core::{check_appendix, AppendixReport, Disposition, Element, Engine, NegativityTrace, Simulation};

use crate::config::{EngineChoice, RunConfig, UsageError};
use crate::preset::Physics;

/// Number of grid points sampled by the appendix comparison.
pub const APPENDIX_SAMPLES: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Usage(#[from] UsageError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] twophoton_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// One computed negativity series.
#[derive(Debug)]
pub struct Series {
    pub label: Option<String>,
    pub physics: Physics,
    pub engine: EngineChoice,
    pub trace: NegativityTrace,
    /// Max entry difference between the analytic and numeric states, per point.
    pub disagreement: Option<Vec<f64>>,
    pub appendix: Vec<AppendixReport>,
    pub wall_time_s: f64,
}

impl Series {
    pub fn max_epsilon(&self) -> f64 {
        self.trace.max_epsilon()
    }

    pub fn max_disagreement(&self) -> Option<f64> {
        self.disagreement.as_ref().map(|d| d.iter().copied().fold(0.0, f64::max))
    }
}

/// Compute one physics point of `config`.
pub fn compute(config: &RunConfig, label: Option<String>, physics: Physics) -> Result<Series, RunError> {
    let start = Instant::now();
    let (params, prep) = config.model(&physics)?;
    let sim = Simulation::new(params, prep)?;
    let grid = uniform_grid(config.gt_max, config.gt_steps);
    let primary = if config.engine == EngineChoice::Analytic { Engine::Analytic } else { Engine::Numeric };
    let trace = sim.negativity_series(&grid, primary)?;
    let disagreement = if config.engine == EngineChoice::Both {
        let analytic = sim.reduced_matrices(&grid, Engine::Analytic)?;
        Some(trace.points.iter().zip(&analytic).map(|(p, a)| p.state.rho.max_abs_diff(a)).collect())
    } else {
        None
    };
    let appendix = if config.appendix_check {
        appendix_times(&grid).into_iter().map(|gt| check_appendix(&sim, gt)).collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    Ok(Series {
        label,
        physics,
        engine: config.engine,
        trace,
        disagreement,
        appendix,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Evenly spaced grid points, ends included.
pub fn appendix_times(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut idx: Vec<usize> = (0..APPENDIX_SAMPLES).map(|k| k * (n - 1) / (APPENDIX_SAMPLES - 1).max(1)).collect();
    idx.dedup();
    idx.into_iter().map(|i| grid[i]).collect()
}

/// CSV body for a series, LF line endings.
pub fn csv_string(series: &Series) -> String {
    let mut out = String::from("gt,epsilon,trace_error,min_eig");
    if series.disagreement.is_some() {
        out.push_str(",engine_disagreement");
    }
    out.push('\n');
    for (k, p) in series.trace.points.iter().enumerate() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            p.state.gt, p.negativity.epsilon, p.state.trace_error, p.state.min_eig
        ));
        if let Some(d) = &series.disagreement {
            out.push_str(&format!(",{:.16e}", d[k]));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct ElementSummary {
    element: &'static str,
    disposition: Disposition,
    max_deviation: Option<f64>,
    note: Option<&'static str>,
    /// `(gt, [re, im])` engine values at every sampled time.
    engine_values: Vec<(f64, [f64; 2])>,
}

fn appendix_summary(reports: &[AppendixReport]) -> Vec<ElementSummary> {
    Element::ALL
        .iter()
        .map(|&e| {
            let checks: Vec<_> = reports.iter().map(|r| (r.gt, r.get(e))).collect();
            let disposition = if checks.iter().any(|(_, c)| c.disposition == Disposition::Malformed) {
                Disposition::Malformed
            } else if checks.iter().any(|(_, c)| c.disposition == Disposition::Deviates) {
                Disposition::Deviates
            } else {
                Disposition::Match
            };
            let max_deviation = checks.iter().filter_map(|(_, c)| c.deviation).reduce(f64::max);
            ElementSummary {
                element: e.name(),
                disposition,
                max_deviation,
                note: e.defect(),
                engine_values: checks.iter().map(|(gt, c)| (*gt, c.engine)).collect(),
            }
        })
        .collect()
}

/// Machine-readable diagnostics for one series.
pub fn report_json(config: &RunConfig, series: &Series, csv_path: &Path) -> Value {
    let points = &series.trace.points;
    let max_trace_error = points.iter().map(|p| p.state.trace_error).fold(0.0, f64::max);
    let min_eig = points.iter().map(|p| p.state.min_eig).fold(f64::INFINITY, f64::min);
    let (t1, t2) = series.trace.tails;
    let retained = (1.0 - t1) * (1.0 - t2);

    let mut errata = Vec::new();
    let appendix = if config.appendix_check {
        let summary = appendix_summary(&series.appendix);
        for s in summary.iter().filter(|s| s.disposition != Disposition::Match || s.note.is_some()) {
            errata.push(json!({
                "source": "appendix",
                "element": s.element,
                "disposition": s.disposition,
                "max_deviation": s.max_deviation,
                "note": s.note,
                "engine_values": s.engine_values,
            }));
        }
        json!({ "tolerance": twophoton_core::appendix::MATCH_TOL, "elements": summary, "samples": series.appendix })
    } else {
        Value::Null
    };
    if let Some(d) = series.max_disagreement() {
        if d > 1e-9 {
            errata.push(json!({
                "source": "engine",
                "note": "analytic and numeric propagation disagree beyond 1e-9",
                "max_disagreement": d,
            }));
        }
    }
    if series.trace.truncation_warning {
        errata.push(json!({ "source": "cutoff", "note": "Fock cutoff clamped to cutoff-cap; tail exceeds cutoff-tail" }));
    }

    json!({
        "csv": csv_path.display().to_string(),
        "preset": config.preset.map(|p| p.name()),
        "sweep": config.sweep.as_ref().map(|s| json!({ "axis": s.axis.name(), "value": series.label })),
        "physics_angles_in_pi": series.physics,
        "engine": series.engine,
        "grid": { "gt_max": config.gt_max, "gt_steps": config.gt_steps },
        "cutoff_tail": config.cutoff_tail,
        "cutoff_cap": config.cutoff_cap,
        "cutoffs": [series.trace.cutoffs.0, series.trace.cutoffs.1],
        "tails": [t1, t2],
        "retained_mass": retained,
        "truncation_warning": series.trace.truncation_warning,
        "wall_time_s": series.wall_time_s,
        "summary": {
            "max_epsilon": series.max_epsilon(),
            "max_trace_error": max_trace_error,
            "min_eig": min_eig,
            "max_engine_disagreement": series.max_disagreement(),
        },
        "appendix": appendix,
        "errata": errata,
    })
}

/// `base` with `_{axis}_{label}` spliced before the extension.
pub fn labelled_path(base: &Path, axis: &str, label: &str) -> PathBuf {
    let clean: String =
        label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect();
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{axis}_{clean}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{axis}_{clean}"),
    };
    base.with_file_name(name)
}

fn write_file(path: &Path, body: &[u8]) -> Result<(), RunError> {
    let io = |source| RunError::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(body).map_err(io)?;
    f.flush().map_err(io)
}

/// Files written for one series.
#[derive(Debug)]
pub struct Written {
    pub csv: PathBuf,
    pub report: PathBuf,
    pub series: Series,
}

/// Run every point of `config` and write its outputs.
pub fn run(config: &RunConfig) -> Result<Vec<Written>, RunError> {
    let mut written = Vec::new();
    for (label, physics) in config.points() {
        let tag = config.sweep.as_ref().zip(label.as_ref()).map(|(s, l)| (s.axis.name(), l.as_str()));
        let place = |base: &Path| match tag {
            Some((axis, l)) => labelled_path(base, axis, l),
            None => base.to_path_buf(),
        };
        let csv = place(&config.output);
        let report = match &config.report {
            Some(r) => place(r),
            None => csv.with_extension("report.json"),
        };
        let series = compute(config, label, physics)?;
        write_file(&csv, csv_string(&series).as_bytes())?;
        let body = serde_json::to_string_pretty(&report_json(config, &series, &csv)).expect("report serializes");
        write_file(&report, format!("{body}\n").as_bytes())?;
        written.push(Written { csv, report, series });
    }
    Ok(written)
}
