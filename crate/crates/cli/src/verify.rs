//! Verification suites on a configured schedule or a schedule file.

use std::path::Path;

use serde::Serialize;

use lrpulse_core::{
    invariance_residual, invariant_at, invariant_eigenvectors, lr_phase_rate,
    measured_lr_phase_rates, propagate_with_analytic, AuxiliaryTrajectory, Drive, Eigenvectors,
    PulseSchedule, ResonantTrajectory, StateVector, C64,
};

use crate::commands::analytic_window_end;
use crate::config::Plan;
use crate::error::CliResult;
use crate::formats::{read_schedule, FileDrive, ScheduleHeader, SCHEMA_VERSION};

/// Residual tolerance in units of `ω` at step `RESIDUAL_STEP / ω`.
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const RESIDUAL_STEP: f64 = 1e-4;
/// Tolerance on `|slope − 2|` of the residual under step halving.
pub const ORDER_TOL: f64 = 0.1;
pub const EIGEN_TOL: f64 = 1e-10;
/// Gauge-fixed LR phase rates of `φ±`, in units of `ω`.
pub const PHASE_TOL: f64 = 1e-6;
pub const ANALYTIC_TOL: f64 = 1e-4;
pub const NORM_TOL: f64 = 1e-9;

/// Below this the residual is zero to round-off and the order is moot.
const TRIVIAL_RESIDUAL: f64 = 1e-13;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub points: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub source: String,
    pub schedule: ScheduleHeader,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn new(source: String, schedule: ScheduleHeader, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { schema_version: SCHEMA_VERSION, source, schedule, passed, checks }
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.to_string()).collect()
    }
}

/// Interior probe times off the modified intervals.
fn probe_times(s: &PulseSchedule) -> Vec<f64> {
    let (a, b) = s.domain();
    (1..40)
        .map(|k| a + (b - a) * (k as f64 + 0.37) / 41.0)
        .filter(|&t| !s.in_modified_interval(t))
        .collect()
}

fn max_residual<D: Drive + ?Sized>(drive: &D, traj: &ResonantTrajectory, times: &[f64], h: f64) -> CliResult<f64> {
    let mut worst = 0.0f64;
    for &t in times {
        worst = worst.max(invariance_residual(drive, traj, t, h)?);
    }
    Ok(worst)
}

fn residual_check<D: Drive + ?Sized>(drive: &D, traj: &ResonantTrajectory, times: &[f64], omega: f64) -> CliResult<Check> {
    let worst = max_residual(drive, traj, times, RESIDUAL_STEP / omega)? / omega;
    Ok(Check {
        name: "invariance_residual",
        passed: worst <= RESIDUAL_TOL,
        value: worst,
        threshold: RESIDUAL_TOL,
        points: times.len(),
        detail: "max ‖i dI/dt − [H, I]‖ / ω".into(),
    })
}

fn order_check(s: &PulseSchedule, traj: &ResonantTrajectory, times: &[f64]) -> CliResult<Check> {
    let h = 2e-3 / s.omega();
    let total = |h: f64| -> CliResult<f64> {
        let mut sum = 0.0;
        for &t in times {
            sum += invariance_residual(s, traj, t, h)?;
        }
        Ok(sum)
    };
    let (coarse, fine) = (total(h)?, total(h / 2.0)?);
    let (passed, slope, detail) = if coarse < TRIVIAL_RESIDUAL * times.len() as f64 {
        (true, 2.0, "residual vanishes identically".to_string())
    } else {
        let slope = (coarse / fine).log2();
        ((slope - 2.0).abs() <= ORDER_TOL, slope, "log₂ residual ratio under step halving".to_string())
    };
    Ok(Check { name: "invariance_order", passed, value: slope, threshold: ORDER_TOL, points: times.len(), detail })
}

fn eigen_check(traj: &ResonantTrajectory, times: &[f64]) -> CliResult<Check> {
    let mut worst = 0.0f64;
    for &t in times {
        let aux = traj.at(t)?;
        let inv = invariant_at(&aux)?;
        let cube = inv.matmul(&inv).matmul(&inv);
        worst = worst.max((cube - inv).frobenius_norm());
        worst = worst.max(inv.trace().norm());
        worst = worst.max((inv.matmul(&inv).trace() - 2.0).norm());
        let phis = invariant_eigenvectors(&aux)?.as_array();
        for (i, a) in phis.iter().enumerate() {
            worst = worst.max((inv.apply(a) - *a * Eigenvectors::EIGENVALUES[i]).norm());
            for (j, b) in phis.iter().enumerate() {
                let want = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((a.inner(b) - want).norm());
            }
        }
    }
    Ok(Check {
        name: "eigenstructure",
        passed: worst <= EIGEN_TOL,
        value: worst,
        threshold: EIGEN_TOL,
        points: times.len(),
        detail: "I³ = I, tr I = 0, tr I² = 2, eigenpairs (±1, 0), orthonormality".into(),
    })
}

/// `φ±` phase rates measured against `H`, in the gauge where the `φ₀`
/// rate equals `θ̇`. Points with `β ≈ 0` carry no information and are
/// skipped.
fn phase_check<D: Drive + ?Sized>(drive: &D, traj: &ResonantTrajectory, times: &[f64], omega: f64) -> CliResult<Check> {
    let mut worst = 0.0f64;
    let mut points = 0;
    for &t in times {
        let aux = traj.at(t)?;
        if aux.beta.abs() < 1e-3 {
            continue;
        }
        let m = measured_lr_phase_rates(drive, traj, t, RESIDUAL_STEP / omega)?;
        let offset = m[2] - lr_phase_rate(&aux)?;
        worst = worst.max((m[0] - offset).abs()).max((m[1] - offset).abs());
        points += 1;
    }
    let worst = worst / omega;
    Ok(Check {
        name: "lr_phase_nullity",
        passed: worst <= PHASE_TOL,
        value: worst,
        threshold: PHASE_TOL,
        points,
        detail: "max |rate(φ±) − gauge offset| / ω".into(),
    })
}

fn analytic_checks(plan: &Plan, traj: &ResonantTrajectory) -> CliResult<Vec<Check>> {
    let s = &plan.schedule;
    let (start, end) = s.domain();
    let window_end = analytic_window_end(s);
    if window_end <= start {
        return Ok(Vec::new());
    }
    // dense records: the deviation is only sampled at recorded steps
    let cfg = plan.propagation().with_stride(10);
    let cfg = if window_end < end { cfg.with_range(start, window_end) } else { cfg };
    let report = propagate_with_analytic(s, traj, &StateVector::basis(1), &cfg)?;
    let dev = report.analytic_deviation.unwrap_or(0.0);
    let points = report.times.len();
    Ok(vec![
        Check {
            name: "analytic_agreement",
            passed: dev <= ANALYTIC_TOL,
            value: dev,
            threshold: ANALYTIC_TOL,
            points,
            detail: format!("RK4 vs invariant expansion on [{start}, {window_end}]"),
        },
        Check {
            name: "norm_drift",
            passed: report.norm_drift <= NORM_TOL,
            value: report.norm_drift,
            threshold: NORM_TOL,
            points,
            detail: "max |‖ψ‖² − 1|".into(),
        },
    ])
}

/// Every suite on the schedule described by `plan`.
pub fn verify_plan(plan: &Plan) -> CliResult<VerifyReport> {
    let s = &plan.schedule;
    let traj = s.trajectory()?;
    let times = probe_times(s);
    let mut checks = vec![
        residual_check(s, &traj, &times, s.omega())?,
        order_check(s, &traj, &times)?,
        eigen_check(&traj, &times)?,
        phase_check(s, &traj, &times, s.omega())?,
    ];
    checks.extend(analytic_checks(plan, &traj)?);
    Ok(VerifyReport::new("config".into(), ScheduleHeader::of(s), checks))
}

/// Residual, eigenstructure and phase suites on the samples of a schedule
/// file, against the trajectory its header describes. Samples within one
/// difference step of the ends and inside modified intervals are skipped.
pub fn verify_file(path: &Path) -> CliResult<VerifyReport> {
    let file = read_schedule(path)?;
    let schedule = file.header.params.build(file.header.omega)?;
    let traj = schedule.trajectory()?;
    let omega = file.header.omega;
    let (start, end) = schedule.domain();
    let h = RESIDUAL_STEP / omega;
    let times: Vec<f64> = file
        .times
        .iter()
        .copied()
        .filter(|&t| t - h >= start && t + h <= end && !schedule.in_modified_interval(t))
        .collect();
    let drive = FileDrive::new(&file);
    let checks = vec![
        residual_check(&drive, &traj, &times, omega)?,
        eigen_check(&traj, &times)?,
        phase_check(&drive, &traj, &times, omega)?,
    ];
    Ok(VerifyReport::new(path.display().to_string(), file.header.clone(), checks))
}
