//! The simulate mode: integrate the weakly coupled flow of the configured
//! components and export diagnostics, snapshots and a report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lohe_core::diagnostics::{coupling_residual, functionals, potential_separable, DiagnosticsRecord, Ensemble};
use lohe_core::dynamics::{integrate_with, IntegratorOptions, WeakFlow};
use lohe_core::models::tensor_vector;
use lohe_core::symbol::{validate_symbol, CharacteristicSymbol};
use lohe_core::tensor::DenseTensor;
use nalgebra::{DMatrix, DVector};

use crate::config::{prepare, AssertionConfig, ExperimentConfig, Reduce, View};
use crate::error::{io_err, CliError, CliResult};

const SKEW_TOLERANCE: f64 = 1e-10;
const UNIT_TOLERANCE: f64 = 1e-10;

pub struct AssertionOutcome {
    pub text: String,
    pub passed: bool,
}

pub struct RunReport {
    pub config_echo: String,
    pub seconds: f64,
    pub final_row: Vec<(&'static str, f64)>,
    pub assertions: Vec<AssertionOutcome>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "config:\n{}\n", self.config_echo);
        let _ = writeln!(s, "wall time: {:.3} s\n", self.seconds);
        let _ = writeln!(s, "final diagnostics:");
        for (k, v) in &self.final_row {
            let _ = writeln!(s, "  {k} = {v:e}");
        }
        let _ = writeln!(s, "\nassertions:");
        if self.assertions.is_empty() {
            let _ = writeln!(s, "  (none)");
        }
        for a in &self.assertions {
            let _ = writeln!(s, "  [{}] {}", if a.passed { "ok" } else { "FAIL" }, a.text);
        }
        let _ = writeln!(s, "\nfiles:");
        for f in &self.files {
            let _ = writeln!(s, "  {}", f.display());
        }
        let _ = writeln!(s, "\nresult: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn tensor_matrix(t: &DenseTensor) -> DMatrix<lohe_core::tensor::C64> {
    t.to_matrix().expect("matrix views hold rank-2 tensors")
}

/// Per-view functionals plus potential, residual and norm drift.
fn record(
    t: f64,
    symbols: &[CharacteristicSymbol],
    views: &[View],
    comps: &[Vec<DenseTensor>],
    initial_norms: &[Vec<f64>],
    kappa: f64,
) -> DiagnosticsRecord {
    let vectors: Vec<Vec<DVector<f64>>> = comps.iter().map(|e| e.iter().map(tensor_vector).collect()).collect();
    let matrices: Vec<Vec<DMatrix<_>>> = comps
        .iter()
        .zip(views)
        .map(|(e, v)| match v {
            View::Matrix => e.iter().map(tensor_matrix).collect(),
            _ => Vec::new(),
        })
        .collect();
    let ensembles: Vec<Ensemble<'_>> = views
        .iter()
        .enumerate()
        .map(|(l, v)| match v {
            View::Tensor => Ensemble::Tensors(&comps[l]),
            View::Vector => Ensemble::Vectors(&vectors[l]),
            View::Matrix => Ensemble::Unitary(&matrices[l]),
        })
        .collect();
    let mut r = functionals(t, &ensembles);
    r.potential = Some(potential_separable(comps, kappa));
    r.residual = Some(coupling_residual(symbols, comps).unwrap_or(f64::NAN));
    let drift = comps
        .iter()
        .zip(initial_norms)
        .flat_map(|(e, n0)| e.iter().zip(n0).map(|(t, n)| (t.norm() - n).abs()))
        .fold(0.0, f64::max);
    r.norm_drift = Some(drift);
    r
}

fn csv_line(values: impl IntoIterator<Item = String>) -> String {
    values.into_iter().collect::<Vec<_>>().join(",") + "\n"
}

/// One row per oscillator: the entries of every component in order, each as
/// a real,imag pair.
fn snapshot_csv(comps: &[Vec<DenseTensor>]) -> String {
    let n = comps[0].len();
    let mut header = Vec::new();
    for (l, ens) in comps.iter().enumerate() {
        for k in 0..ens[0].data().len() {
            header.push(format!("c{l}_{k}_re"));
            header.push(format!("c{l}_{k}_im"));
        }
    }
    let mut out = csv_line(header);
    for j in 0..n {
        out += &csv_line(
            comps
                .iter()
                .flat_map(|ens| ens[j].data().iter().flat_map(|z| [z.re.to_string(), z.im.to_string()])),
        );
    }
    out
}

fn evaluate(a: &AssertionConfig, column: &[f64]) -> AssertionOutcome {
    let (label, value) = match a.at {
        Reduce::Final => ("final", *column.last().expect("at least the initial row")),
        Reduce::Max => ("max", column.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        Reduce::Min => ("min", column.iter().copied().fold(f64::INFINITY, f64::min)),
    };
    let mut passed = !value.is_nan();
    let mut bounds = Vec::new();
    if let Some(m) = a.max {
        passed &= value <= m;
        bounds.push(format!("<= {m:e}"));
    }
    if let Some(m) = a.min {
        passed &= value >= m;
        bounds.push(format!(">= {m:e}"));
    }
    AssertionOutcome {
        text: format!("{label} {} = {value:e} {}", a.column, bounds.join(", ")),
        passed,
    }
}

pub fn simulate(cfg: &ExperimentConfig, out_dir: &Path) -> CliResult<RunReport> {
    cfg.validate_integrator()?;
    let prepared = prepare(cfg)?;
    let symbols = &prepared.symbols;
    for (l, c) in symbols.iter().enumerate() {
        let report = validate_symbol(c);
        if report.max_skew_residual() > SKEW_TOLERANCE {
            return Err(CliError::Config(format!(
                "component {l}: frequency tensors {:?} are not skew-Hermitian (residual {:e})",
                report.skew_violations(),
                report.max_skew_residual()
            )));
        }
    }
    let initial: Vec<Vec<DenseTensor>> = symbols.iter().map(|c| c.initial().to_vec()).collect();
    let initial_norms: Vec<Vec<f64>> = initial.iter().map(|e| e.iter().map(DenseTensor::norm).collect()).collect();
    let integ = &cfg.integrator;
    if integ.renormalize {
        let worst = initial_norms.iter().flatten().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
        if worst > UNIT_TOLERANCE {
            return Err(CliError::Config(format!(
                "renormalize needs unit-norm initial data, found a norm off by {worst:e}"
            )));
        }
    }

    let kappa = cfg.potential_kappa;
    let first = record(0.0, symbols, &prepared.views, &initial, &initial_norms, kappa);
    let names: Vec<&'static str> = first.columns().iter().map(|(k, _)| *k).collect();
    let mut assertion_columns = Vec::new();
    for a in &cfg.assertions {
        let idx = names
            .iter()
            .position(|k| *k == a.column)
            .ok_or_else(|| CliError::Config(format!("assertion column `{}` not among {:?}", a.column, names)))?;
        if a.max.is_none() && a.min.is_none() {
            return Err(CliError::Config(format!("assertion on `{}` has neither max nor min", a.column)));
        }
        assertion_columns.push(idx);
    }

    fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
    let mut files = Vec::new();
    let flow = WeakFlow::new(symbols)?;
    let opts = IntegratorOptions::new(integ.h, integ.t_end)
        .sample_every(integ.sample_every)
        .renormalize(integ.renormalize);

    let start = Instant::now();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut snapshots: Vec<(usize, String)> = Vec::new();
    let mut sample = 0usize;
    integrate_with(
        |_, y: &Vec<Vec<DenseTensor>>| flow.rhs(y),
        initial.clone(),
        &opts,
        |t, y| {
            let r = record(t, symbols, &prepared.views, y, &initial_norms, kappa);
            rows.push(r.columns().into_iter().map(|(_, v)| v).collect());
            if cfg.snapshot_every > 0 && sample % cfg.snapshot_every == 0 {
                snapshots.push((sample, snapshot_csv(y)));
            }
            sample += 1;
        },
    )?;
    let seconds = start.elapsed().as_secs_f64();

    let mut csv = csv_line(names.iter().map(|s| s.to_string()));
    for row in &rows {
        csv += &csv_line(row.iter().map(f64::to_string));
    }
    let path = out_dir.join("diagnostics.csv");
    fs::write(&path, csv).map_err(|e| io_err(&path, e))?;
    files.push(path);
    for (k, text) in snapshots {
        let path = out_dir.join(format!("state_{k:04}.csv"));
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        files.push(path);
    }

    let assertions = cfg
        .assertions
        .iter()
        .zip(&assertion_columns)
        .map(|(a, &idx)| evaluate(a, &rows.iter().map(|r| r[idx]).collect::<Vec<_>>()))
        .collect();
    let last = rows.last().expect("initial row recorded");
    let report_path = out_dir.join("report.txt");
    files.push(report_path.clone());
    let report = RunReport {
        config_echo: format!(
            "{} ({})\n{}",
            prepared.origin,
            symbols.iter().map(|c| format!("{:?}", c.size().dims())).collect::<Vec<_>>().join(" x "),
            serde_json::to_string_pretty(cfg).expect("config serializes")
        ),
        seconds,
        final_row: names.iter().copied().zip(last.iter().copied()).collect(),
        assertions,
        files,
    };
    fs::write(&report_path, report.render()).map_err(|e| io_err(&report_path, e))?;
    Ok(report)
}
