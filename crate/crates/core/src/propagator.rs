//! Fixed-step RK4 integration of `i∂_tψ = H(t)ψ`.
//!
//! The step is a fixed fraction of the fastest carrier period. The state is
//! never renormalised; the drift of `‖ψ‖²` is reported instead.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{ceil, log};

use crate::drive::{check_domain, hamiltonian_from_sample, Drive};
use crate::invariant::invariant_eigenvectors;
use crate::linalg::{Matrix3, StateVector, C64};
use crate::trajectory::AuxiliaryTrajectory;
use crate::{Error, Result};

/// Resolution floor for the carrier oscillation.
pub const MIN_STEPS_PER_PERIOD: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub steps_per_carrier_period: usize,
    /// Record every `record_stride`-th step (the final step is always kept).
    pub record_stride: usize,
    /// Defaults to the start of the drive's domain.
    pub start: Option<f64>,
    /// Defaults to the end of the drive's domain.
    pub end: Option<f64>,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self { steps_per_carrier_period: 2000, record_stride: 200, start: None, end: None }
    }
}

impl PropagationConfig {
    pub fn with_steps(mut self, steps_per_carrier_period: usize) -> Self {
        self.steps_per_carrier_period = steps_per_carrier_period;
        self
    }

    pub fn with_stride(mut self, record_stride: usize) -> Self {
        self.record_stride = record_stride;
        self
    }

    pub fn with_range(mut self, start: f64, end: f64) -> Self {
        self.start = Some(start);
        self.end = Some(end);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.steps_per_carrier_period < MIN_STEPS_PER_PERIOD {
            return Err(Error::InvalidArgument("at least 100 steps per carrier period are required"));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidArgument("record stride must be positive"));
        }
        Ok(())
    }

    fn range<D: Drive + ?Sized>(&self, drive: &D) -> Result<(f64, f64)> {
        let domain = drive.domain();
        let start = self.start.unwrap_or(domain.0);
        let end = self.end.unwrap_or(domain.1);
        check_domain(start, domain)?;
        check_domain(end, domain)?;
        if end < start {
            return Err(Error::InvalidArgument("propagation end precedes start"));
        }
        Ok((start, end))
    }
}

/// Sampled populations and diagnostics of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `[P₁, P₂, P₃]` at each recorded time.
    pub populations: Vec<[f64; 3]>,
    /// `‖ψ‖²` at each recorded time.
    pub norms: Vec<f64>,
    pub final_state: StateVector,
    pub final_populations: [f64; 3],
    /// `max |‖ψ‖² − 1|` over every step.
    pub norm_drift: f64,
    /// Largest `P₂` over every step.
    pub max_p2: f64,
    /// Filled in by [`propagate_with_analytic`].
    pub analytic_deviation: Option<f64>,
    pub steps: usize,
    pub step_size: f64,
}

impl TransferReport {
    /// First recorded time from which `P₃ ≥ threshold` holds at every later
    /// sample.
    pub fn settled_from(&self, threshold: f64) -> Option<f64> {
        let mut from = None;
        for (t, p) in self.times.iter().zip(&self.populations) {
            if p[2] >= threshold {
                from.get_or_insert(*t);
            } else {
                from = None;
            }
        }
        from
    }
}

fn check_normalized(psi: &StateVector) -> Result<()> {
    if !psi.is_finite() || (psi.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument("initial state must be normalized"));
    }
    Ok(())
}

fn hamiltonian<D: Drive + ?Sized>(drive: &D, t: f64) -> Result<Matrix3> {
    let s = drive.sample(t)?;
    let h = hamiltonian_from_sample(drive.carriers(), &s, t);
    if h.is_finite() {
        Ok(h)
    } else {
        Err(Error::NonFinite { t })
    }
}

/// `−iHψ`.
fn rhs(h: &Matrix3, psi: &StateVector) -> StateVector {
    h.apply(psi).scale(-C64::i())
}

/// Integrates from `cfg.start` to `cfg.end` starting in `psi0`.
pub fn propagate<D: Drive + ?Sized>(
    drive: &D,
    psi0: &StateVector,
    cfg: &PropagationConfig,
) -> Result<TransferReport> {
    cfg.validate()?;
    check_normalized(psi0)?;
    let (start, end) = cfg.range(drive)?;
    let period = 2.0 * PI / drive.carriers().fastest();
    let span = end - start;
    let steps = if span == 0.0 {
        0
    } else {
        (ceil(span / period * cfg.steps_per_carrier_period as f64) as usize).max(1)
    };
    let h = if steps == 0 { 0.0 } else { span / steps as f64 };

    let mut report = TransferReport {
        times: Vec::new(),
        states: Vec::new(),
        populations: Vec::new(),
        norms: Vec::new(),
        final_state: *psi0,
        final_populations: psi0.populations(),
        norm_drift: (psi0.norm_sqr() - 1.0).abs(),
        max_p2: psi0.populations()[1],
        analytic_deviation: None,
        steps,
        step_size: h,
    };
    let record = |r: &mut TransferReport, t: f64, psi: &StateVector| {
        r.times.push(t);
        r.states.push(*psi);
        r.populations.push(psi.populations());
        r.norms.push(psi.norm_sqr());
    };
    record(&mut report, start, psi0);

    let mut psi = *psi0;
    let mut h_left = if steps > 0 { Some(hamiltonian(drive, start)?) } else { None };
    for k in 0..steps {
        let t = start + k as f64 * h;
        let t_next = if k + 1 == steps { end } else { start + (k + 1) as f64 * h };
        let h0 = match h_left.take() {
            Some(m) => m,
            None => hamiltonian(drive, t)?,
        };
        let h_mid = hamiltonian(drive, t + 0.5 * h)?;
        let h1 = hamiltonian(drive, t_next)?;
        let k1 = rhs(&h0, &psi);
        let k2 = rhs(&h_mid, &(psi + k1 * (0.5 * h)));
        let k3 = rhs(&h_mid, &(psi + k2 * (0.5 * h)));
        let k4 = rhs(&h1, &(psi + k3 * h));
        psi = psi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !psi.is_finite() {
            return Err(Error::NonFinite { t: t_next });
        }
        h_left = Some(h1);
        let p = psi.populations();
        report.max_p2 = report.max_p2.max(p[1]);
        report.norm_drift = report.norm_drift.max((psi.norm_sqr() - 1.0).abs());
        if (k + 1) % cfg.record_stride == 0 || k + 1 == steps {
            record(&mut report, t_next, &psi);
        }
    }
    report.final_state = psi;
    report.final_populations = psi.populations();
    Ok(report)
}

/// LR expansion of the state that equals `psi0` at `t0`, evaluated at `t`:
/// `Σ_k ⟨φ_k(t₀)|ψ₀⟩ e^{i[Θ_k(t) − Θ_k(t₀)]} φ_k(t)`.
fn analytic_from<T: AuxiliaryTrajectory + ?Sized>(
    traj: &T,
    psi0: &StateVector,
    t0: f64,
    phases0: &[f64; 3],
    t: f64,
) -> Result<StateVector> {
    if t == t0 {
        return Ok(*psi0);
    }
    let initial = invariant_eigenvectors(&traj.at(t0)?)?.as_array();
    let now = invariant_eigenvectors(&traj.at(t)?)?.as_array();
    let phases = traj.lr_phases(t)?;
    let mut psi = StateVector::zero();
    for k in 0..3 {
        let coeff = initial[k].inner(psi0) * C64::from_polar(1.0, phases[k] - phases0[k]);
        psi = psi + now[k].scale(coeff);
    }
    Ok(psi)
}

fn check_same_domain(a: (f64, f64), b: (f64, f64)) -> Result<()> {
    let slack = 1e-12 * (a.1 - a.0).abs().max(1.0);
    if (a.0 - b.0).abs() > slack || (a.1 - b.1).abs() > slack {
        return Err(Error::InvalidArgument("schedule and trajectory domains differ"));
    }
    Ok(())
}

/// Propagates and fills [`TransferReport::analytic_deviation`] with the
/// largest componentwise gap between the RK4 state and the invariant-based
/// expansion over the recorded samples, after aligning global phases.
pub fn propagate_with_analytic<D, T>(
    drive: &D,
    traj: &T,
    psi0: &StateVector,
    cfg: &PropagationConfig,
) -> Result<TransferReport>
where
    D: Drive + ?Sized,
    T: AuxiliaryTrajectory + ?Sized,
{
    check_same_domain(drive.domain(), traj.domain())?;
    let mut report = propagate(drive, psi0, cfg)?;
    let t0 = report.times[0];
    let phases0 = traj.lr_phases(t0)?;
    let mut worst = 0.0f64;
    for (t, psi) in report.times.iter().zip(&report.states) {
        let exact = analytic_from(traj, psi0, t0, &phases0, *t)?;
        worst = worst.max(psi.phase_aligned_to(&exact).max_abs_diff(&exact));
    }
    report.analytic_deviation = Some(worst);
    Ok(report)
}

/// Maximum deviation between propagation and the invariant-based expansion.
pub fn compare_with_analytic<D, T>(
    drive: &D,
    traj: &T,
    psi0: &StateVector,
    cfg: &PropagationConfig,
) -> Result<f64>
where
    D: Drive + ?Sized,
    T: AuxiliaryTrajectory + ?Sized,
{
    let report = propagate_with_analytic(drive, traj, psi0, cfg)?;
    Ok(report.analytic_deviation.unwrap_or(0.0))
}

/// One resolution of a [`convergence_study`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub steps_per_carrier_period: usize,
    pub final_p3: f64,
    pub final_state: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Successive final-state differences between consecutive rows.
    pub fn differences(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[1].final_state.max_abs_diff(&w[0].final_state))
            .collect()
    }

    /// Empirical order from the last three rows; `None` when the differences
    /// vanish (nothing left to converge).
    pub fn observed_order(&self) -> Option<f64> {
        let n = self.rows.len();
        if n < 3 {
            return None;
        }
        let d = self.differences();
        let (d1, d2) = (d[d.len() - 2], d[d.len() - 1]);
        if d1 == 0.0 || d2 == 0.0 {
            return None;
        }
        let r1 = self.rows[n - 2].steps_per_carrier_period as f64
            / self.rows[n - 3].steps_per_carrier_period as f64;
        let r2 = self.rows[n - 1].steps_per_carrier_period as f64
            / self.rows[n - 2].steps_per_carrier_period as f64;
        // for a constant refinement ratio r: d1/d2 = r^p
        let r = libm::sqrt(r1 * r2);
        Some(log(d1 / d2) / log(r))
    }
}

/// Final `P₃` and state at each resolution in `steps_list` (ascending).
pub fn convergence_study<D: Drive + ?Sized>(
    drive: &D,
    psi0: &StateVector,
    steps_list: &[usize],
) -> Result<ConvergenceTable> {
    if steps_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("resolutions must be strictly ascending"));
    }
    let mut rows = Vec::with_capacity(steps_list.len());
    for &steps in steps_list {
        let cfg = PropagationConfig::default().with_steps(steps).with_stride(usize::MAX);
        let r = propagate(drive, psi0, &cfg)?;
        rows.push(ConvergenceRow {
            steps_per_carrier_period: steps,
            final_p3: r.final_populations[2],
            final_state: r.final_state,
        });
    }
    Ok(ConvergenceTable { rows })
}
