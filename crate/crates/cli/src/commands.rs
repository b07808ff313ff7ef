//! `tables`, `synth`, `simulate` and `calibrate-c`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::thread;

use serde::Serialize;

use lrpulse_core::{
    calibrate_strategy_c, delta_epsilon_per_period, propagate, propagate_with_analytic,
    solve_omega_t_for_a, solve_omega_t_for_b, Drive, PulseSchedule, StateVector, Strategy,
    TransferReport,
};

use crate::config::{periods_needed, Plan, RunConfig};
use crate::error::{CliError, CliResult};
use crate::formats::{
    write_atomic, write_report, write_schedule, EnvelopeStats, ScheduleHeader, TimeUnit,
    SCHEMA_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Table {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
}

impl Table {
    pub fn params(self) -> &'static [f64] {
        match self {
            Table::I => &[0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
            Table::II => &[0.4, 0.5, 0.6, 0.7],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSummary {
    pub schema_version: u32,
    pub table: &'static str,
    pub tol_over_pi: f64,
    pub rows: Vec<(f64, f64)>,
}

/// Calibrated `(param, ωT/π)` rows, one thread per row.
pub fn table_rows(which: Table, tol: f64) -> CliResult<Vec<(f64, f64)>> {
    let solve = match which {
        Table::I => solve_omega_t_for_a,
        Table::II => solve_omega_t_for_b,
    };
    let results: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = which
            .params()
            .iter()
            .map(|&p| scope.spawn(move || solve(p, tol).map(|r| (p, r.solution / PI))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("calibration thread panicked")).collect()
    });
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

pub fn tables(which: Table, out: &Path, tol: f64) -> CliResult<TableSummary> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Validation("tol must be positive".into()));
    }
    let rows = table_rows(which, tol)?;
    write_atomic(out, |w| {
        writeln!(w, "param,omega_t_over_pi")?;
        for (p, x) in &rows {
            writeln!(w, "{p},{x}")?;
        }
        Ok(())
    })?;
    let table = match which {
        Table::I => "I",
        Table::II => "II",
    };
    Ok(TableSummary { schema_version: SCHEMA_VERSION, table, tol_over_pi: tol, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthFile {
    pub path: PathBuf,
    pub neglect_imag: bool,
    pub envelope: EnvelopeStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthSummary {
    pub schema_version: u32,
    pub header: ScheduleHeader,
    pub omega_t_over_pi: f64,
    pub files: Vec<SynthFile>,
}

/// `<stem>_neglect_imag.<ext>` next to `path`.
pub fn neglect_imag_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_neglect_imag.{}", ext.to_string_lossy()),
        None => format!("{stem}_neglect_imag"),
    };
    path.with_file_name(name)
}

fn total_omega_t(schedule: &PulseSchedule) -> f64 {
    let (a, b) = schedule.domain();
    schedule.omega() * (b - a) / PI
}

/// Writes the schedule; for strategy B with `neglect_imag` the file holds
/// the full complex schedule and a sibling holds the real-only variant.
pub fn synth(plan: &Plan, out: &Path, samples_per_period: usize) -> CliResult<SynthSummary> {
    if samples_per_period < 2 {
        return Err(CliError::Validation("samples_per_period must be at least 2".into()));
    }
    let schedule = &plan.schedule;
    let samples = schedule.samples_for(samples_per_period);
    let mut files = Vec::new();
    let header;
    if let Strategy::Singular { b, period, delta_t_over_period, neglect_imag: true } = schedule.strategy() {
        let full = lrpulse_core::strategy_b(b, schedule.omega(), period, delta_t_over_period, false)?;
        header = ScheduleHeader::of(&full);
        let envelope = write_schedule(out, &full, samples)?;
        files.push(SynthFile { path: out.into(), neglect_imag: false, envelope });
        let sibling = neglect_imag_path(out);
        let envelope = write_schedule(&sibling, schedule, samples)?;
        files.push(SynthFile { path: sibling, neglect_imag: true, envelope });
    } else {
        header = ScheduleHeader::of(schedule);
        let envelope = write_schedule(out, schedule, samples)?;
        files.push(SynthFile { path: out.into(), neglect_imag: false, envelope });
    }
    Ok(SynthSummary {
        schema_version: SCHEMA_VERSION,
        header,
        omega_t_over_pi: total_omega_t(schedule),
        files,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticComparison {
    /// Largest componentwise gap between RK4 and the invariant expansion.
    pub deviation: f64,
    /// Window compared, in report time units; strategy B stops before the
    /// first modified interval.
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub schema_version: u32,
    pub schedule: ScheduleHeader,
    pub omega_t_over_pi: f64,
    pub time_unit: TimeUnit,
    pub final_populations: [f64; 3],
    pub final_p3: f64,
    pub max_p2: f64,
    pub norm_drift: f64,
    pub analytic: Option<AnalyticComparison>,
    /// First recorded time from which `P₃ ≥ 0.9999` holds to the end.
    pub p3_settled_from: Option<f64>,
    pub steps: usize,
    pub step_size: f64,
    pub config: RunConfig,
}

/// End of the window where the invariant expansion describes the
/// propagated schedule.
pub fn analytic_window_end(schedule: &PulseSchedule) -> f64 {
    let (start, end) = schedule.domain();
    match (schedule.singular_points().first(), schedule.delta_t()) {
        (Some(&tn), Some(dt)) => (tn - dt).clamp(start, end),
        _ => end,
    }
}

pub fn simulate(plan: &Plan, config: &RunConfig, out: &Path) -> CliResult<(TransferReport, SimulateSummary)> {
    let schedule = &plan.schedule;
    let unit = TimeUnit::of(schedule);
    let psi0 = StateVector::basis(1);
    let cfg = plan.propagation();
    let traj = schedule.trajectory()?;
    let (start, _) = schedule.domain();
    let window_end = analytic_window_end(schedule);
    let (report, analytic) = if matches!(schedule.strategy(), Strategy::Singular { .. }) {
        let report = propagate(schedule, &psi0, &cfg)?;
        let analytic = if window_end > start {
            let head = propagate_with_analytic(schedule, &traj, &psi0, &cfg.with_range(start, window_end))?;
            head.analytic_deviation
        } else {
            None
        };
        (report, analytic)
    } else {
        let report = propagate_with_analytic(schedule, &traj, &psi0, &cfg)?;
        let analytic = report.analytic_deviation;
        (report, analytic)
    };
    write_report(out, &report, unit)?;
    let summary = SimulateSummary {
        schema_version: SCHEMA_VERSION,
        schedule: ScheduleHeader::of(schedule),
        omega_t_over_pi: total_omega_t(schedule),
        time_unit: unit,
        final_populations: report.final_populations,
        final_p3: report.final_populations[2],
        max_p2: report.max_p2,
        norm_drift: report.norm_drift,
        analytic: analytic.map(|deviation| AnalyticComparison {
            deviation,
            window: (unit.scale(start), unit.scale(window_end)),
        }),
        p3_settled_from: report.settled_from(0.9999).map(|t| unit.scale(t)),
        steps: report.steps,
        step_size: report.step_size,
        config: config.clone(),
    };
    Ok((report, summary))
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrateCSummary {
    pub schema_version: u32,
    pub target_delta_epsilon: f64,
    pub target_delta_epsilon_over_pi: f64,
    pub omega0_over_omega: f64,
    pub residual: f64,
    pub iterations: usize,
    pub delta_epsilon_per_period: f64,
    pub periods_needed: Option<usize>,
}

/// `target_over_pi` is the per-period `Δε` in units of `π`.
pub fn calibrate_c(target_over_pi: f64, tol: f64) -> CliResult<CalibrateCSummary> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Validation("tol must be positive".into()));
    }
    let target = target_over_pi * PI;
    let r = calibrate_strategy_c(target, tol)?;
    let per = delta_epsilon_per_period(r.solution)?;
    Ok(CalibrateCSummary {
        schema_version: SCHEMA_VERSION,
        target_delta_epsilon: target,
        target_delta_epsilon_over_pi: target_over_pi,
        omega0_over_omega: r.solution,
        residual: r.residual,
        iterations: r.iterations,
        delta_epsilon_per_period: per,
        periods_needed: if per > 0.0 { Some(periods_needed(r.solution)?) } else { None },
    })
}

