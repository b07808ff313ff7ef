//! Pulse schedules: general inverse engineering from an auxiliary trajectory
//! and the three concrete two-photon-resonant strategies.
//!
//! Every strategy uses `α = π/4`, so pump and Stokes envelopes coincide,
//! `ω_p = ω_s = ω` and `Δ_p = Δ_s = −2ω sin²β`. Envelopes follow from
//! `Ω(t) cos(ωt) = −(2iβ̇ + ω sin 2β) / (2√2)`; the strategies differ in how
//! the zeros of `cos(ωt)` are dealt with:
//!
//! * **A** (smooth): `β ∝ cos²(ωt)` so the quotient has a removable zero,
//!   evaluated in factored form.
//! * **B** (modified): flat `β̄`, with the envelope replaced by a linear
//!   interpolation on `(t_n − δt, t_n + δt)` around each carrier zero `t_n`.
//! * **C** (reverse): the real part of the envelope is prescribed as
//!   `Ω₀ cos³(ωt)` and `β` is solved for.

mod calibrate;
mod general;

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use libm::{ceil, cos, floor, round, sin, sqrt};

use crate::drive::{Carriers, Drive, DriveSample};
use crate::linalg::C64;
use crate::trajectory::{BetaProfile, ResonantTrajectory};
use crate::{Error, Result};

pub use calibrate::{
    calibrate_strategy_c, delta_epsilon_per_period, final_epsilon_flat, final_epsilon_smooth,
    max_delta_epsilon_per_period, solve_omega_t_for_a, solve_omega_t_for_b, CalibrationResult,
    MAX_REVERSE_RATIO,
};
pub use general::{synthesize_general, GeneralSchedule};

/// Design parameters of a strategy schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Strategy A: `β = (A/2)[1 − cos(2πt/T)] cos²(ωt)` on `[0, T]`.
    Smooth { a: f64, period: f64 },
    /// Strategy B: `β̄ = (B/2)[1 − cos(2πt/T)]` on `[0, T]` with singular-point
    /// modification over half-width `δt = delta_t_over_period · T`.
    Singular { b: f64, period: f64, delta_t_over_period: f64, neglect_imag: bool },
    /// Strategy C: `Re Ω = Ω₀ cos³(ωt)` over `n_periods` carrier periods from
    /// `t = π/(2ω)`.
    Reverse { omega0: f64, n_periods: usize },
}

impl Strategy {
    pub fn tag(&self) -> &'static str {
        match self {
            Strategy::Smooth { .. } => "a",
            Strategy::Singular { .. } => "b",
            Strategy::Reverse { .. } => "c",
        }
    }
}

/// A strategy schedule: complex envelope `Ω(t) = Ω_p = Ω_s` and common
/// detuning `Δ(t)` on a finite domain, with carrier `ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    omega: f64,
    start: f64,
    end: f64,
    strategy: Strategy,
    profile: BetaProfile,
    singular_points: Vec<f64>,
}

const MAX_AMPLITUDE: f64 = 1.0;

fn check_amplitude(x: f64) -> Result<()> {
    if !(0.0..=MAX_AMPLITUDE).contains(&x) {
        return Err(Error::InvalidArgument("strategy amplitude must lie in [0, 1]"));
    }
    Ok(())
}

fn check_positive(x: f64, msg: &'static str) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument(msg));
    }
    Ok(())
}

/// Strategy A on `[0, T]`.
pub fn strategy_a(a: f64, omega: f64, period: f64) -> Result<PulseSchedule> {
    check_amplitude(a)?;
    check_positive(omega, "carrier frequency must be positive")?;
    check_positive(period, "total time must be positive")?;
    Ok(PulseSchedule {
        omega,
        start: 0.0,
        end: period,
        strategy: Strategy::Smooth { a, period },
        profile: BetaProfile::Smooth { amplitude: a, period, omega },
        singular_points: Vec::new(),
    })
}

/// Strategy B on `[0, T]`; `delta_t_over_period` is `δt/T`.
pub fn strategy_b(
    b: f64,
    omega: f64,
    period: f64,
    delta_t_over_period: f64,
    neglect_imag: bool,
) -> Result<PulseSchedule> {
    check_amplitude(b)?;
    check_positive(omega, "carrier frequency must be positive")?;
    check_positive(period, "total time must be positive")?;
    check_positive(delta_t_over_period, "modification half-width must be positive")?;
    let delta_t = delta_t_over_period * period;
    if delta_t >= PI / (2.0 * omega) {
        return Err(Error::InvalidArgument(
            "modification intervals overlap adjacent singular points",
        ));
    }
    // t_n = (2n − 1)π/(2ω) ≤ T
    let count = floor(omega * period / PI + 0.5) as usize;
    let singular_points = (1..=count)
        .map(|n| (2 * n - 1) as f64 * PI / (2.0 * omega))
        .filter(|&t| t <= period)
        .collect();
    Ok(PulseSchedule {
        omega,
        start: 0.0,
        end: period,
        strategy: Strategy::Singular { b, period, delta_t_over_period, neglect_imag },
        profile: BetaProfile::Flat { amplitude: b, period },
        singular_points,
    })
}

/// Strategy C over `n_periods` carrier periods starting at `π/(2ω)`.
pub fn strategy_c(omega0: f64, omega: f64, n_periods: usize) -> Result<PulseSchedule> {
    check_positive(omega, "carrier frequency must be positive")?;
    let ratio = omega0 / omega;
    if !(0.0..MAX_REVERSE_RATIO).contains(&ratio) {
        return Err(Error::InvalidArgument("Ω₀/ω must lie in [0, 1/(2√2))"));
    }
    if n_periods == 0 {
        return Err(Error::InvalidArgument("at least one carrier period is required"));
    }
    let start = PI / (2.0 * omega);
    Ok(PulseSchedule {
        omega,
        start,
        end: start + n_periods as f64 * 2.0 * PI / omega,
        strategy: Strategy::Reverse { omega0, n_periods },
        profile: BetaProfile::Reverse { ratio, omega },
        singular_points: Vec::new(),
    })
}

/// `sin x / x` with a series below `|x| < 1e-4`.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        sin(x) / x
    }
}

impl PulseSchedule {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn beta_profile(&self) -> BetaProfile {
        self.profile
    }

    /// Carrier zeros `t_n` handled by the strategy-B modification.
    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    /// Modification half-width `δt`, strategy B only.
    pub fn delta_t(&self) -> Option<f64> {
        match self.strategy {
            Strategy::Singular { period, delta_t_over_period, .. } => {
                Some(delta_t_over_period * period)
            }
            _ => None,
        }
    }

    /// Whether `t` lies in one of the open modification intervals.
    pub fn in_modified_interval(&self, t: f64) -> bool {
        self.modification_index(t).is_some()
    }

    fn modification_index(&self, t: f64) -> Option<usize> {
        let dt = self.delta_t()?;
        if self.singular_points.is_empty() {
            return None;
        }
        let n = round(self.omega * t / PI + 0.5).max(1.0) as usize;
        let idx = n.min(self.singular_points.len()) - 1;
        ((t - self.singular_points[idx]).abs() < dt).then_some(idx)
    }

    /// Auxiliary trajectory the schedule was built from (unmodified for B).
    pub fn trajectory(&self) -> Result<ResonantTrajectory> {
        ResonantTrajectory::new(self.profile, FRAC_PI_4, self.omega, self.start, self.end)
    }

    /// The common envelope `Ω(t)`.
    pub fn envelope(&self, t: f64) -> C64 {
        match self.strategy {
            Strategy::Smooth { a, period } => self.smooth_envelope(a, period, t),
            Strategy::Singular { neglect_imag, .. } => {
                let v = match self.modification_index(t) {
                    Some(idx) => {
                        let tn = self.singular_points[idx];
                        let dt = self.delta_t().unwrap_or(0.0);
                        let left = self.unmodified_envelope(tn - dt);
                        let right = self.unmodified_envelope(tn + dt);
                        left + (right - left) * ((t - tn + dt) / (2.0 * dt))
                    }
                    None => self.unmodified_envelope(t),
                };
                if neglect_imag {
                    C64::new(v.re, 0.0)
                } else {
                    v
                }
            }
            Strategy::Reverse { omega0, .. } => {
                let cw = cos(self.omega * t);
                let real = omega0 * cw * cw * cw;
                let root = sqrt(1.0 - 8.0 * real * real * cw * cw / (self.omega * self.omega));
                C64::new(real, -4.0 * omega0 * cw * cw * sin(self.omega * t) / root)
            }
        }
    }

    /// `Ω(t) = −(2iβ̇ + ω sin 2β) / (2√2 cos ωt)` before any modification;
    /// diverges at the carrier zeros unless the numerator vanishes there.
    pub fn unmodified_envelope(&self, t: f64) -> C64 {
        let beta = self.profile.beta(t);
        let numerator = C64::new(self.omega * sin(2.0 * beta), 2.0 * self.profile.beta_dot(t));
        -numerator / (2.0 * SQRT_2 * cos(self.omega * t))
    }

    /// Factored strategy-A quotient: with `β = g cos²(ωt)`,
    /// `β̇/cos ωt = ġ cos ωt − 2gω sin ωt` and
    /// `sin 2β / cos ωt = sinc(2β) · 2g cos ωt`.
    fn smooth_envelope(&self, a: f64, period: f64, t: f64) -> C64 {
        let phase = 2.0 * PI * t / period;
        let g = 0.5 * a * (1.0 - cos(phase));
        let g_dot = PI * a / period * sin(phase);
        let (s, c) = (sin(self.omega * t), cos(self.omega * t));
        let beta = g * c * c;
        let beta_dot_over_cos = g_dot * c - 2.0 * g * self.omega * s;
        let sin2b_over_cos = sinc(2.0 * beta) * 2.0 * g * c;
        -C64::new(self.omega * sin2b_over_cos, 2.0 * beta_dot_over_cos) / (2.0 * SQRT_2)
    }

    /// `Δ(t) = −2ω sin²β`.
    pub fn detuning(&self, t: f64) -> f64 {
        -2.0 * self.omega * self.profile.sin2_beta(t)
    }

    /// `n` uniformly spaced sample times covering the domain, both ends
    /// included.
    pub fn sample_times(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let span = self.end - self.start;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.end
                } else {
                    self.start + span * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Sample count giving roughly `per_period` samples per carrier period.
    pub fn samples_for(&self, per_period: usize) -> usize {
        let periods = (self.end - self.start) * self.omega / (2.0 * PI);
        ceil(periods * per_period as f64) as usize + 1
    }
}

impl Drive for PulseSchedule {
    fn carriers(&self) -> Carriers {
        Carriers { omega_p: self.omega, omega_s: self.omega }
    }

    fn domain(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    fn sample(&self, t: f64) -> Result<DriveSample> {
        let envelope = self.envelope(t);
        let delta = self.detuning(t);
        let s = DriveSample { omega_p: envelope, omega_s: envelope, delta_p: delta, delta_s: delta };
        if s.is_finite() {
            Ok(s)
        } else {
            Err(Error::NonFinite { t })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_is_silent() {
        let s = strategy_a(0.0, 30.0, 1.0).unwrap();
        for t in s.sample_times(101) {
            assert_eq!(s.envelope(t), C64::new(0.0, 0.0));
            assert_eq!(s.detuning(t), 0.0);
        }
        let c = strategy_c(0.0, 1.0, 3).unwrap();
        for t in c.sample_times(101) {
            assert_eq!(c.envelope(t).norm(), 0.0);
            assert_eq!(c.detuning(t), 0.0);
        }
    }

    #[test]
    fn smooth_envelope_vanishes_at_ends() {
        let s = strategy_a(0.5, 29.7323 * PI, 1.0).unwrap();
        assert_eq!(s.envelope(0.0).norm(), 0.0);
        assert!(s.envelope(1.0).norm() < 1e-12);
    }

    #[test]
    fn strategy_b_counts_eleven_singular_points() {
        let s = strategy_b(0.5, 11.34 * PI, 1.0, 0.01, false).unwrap();
        assert_eq!(s.singular_points().len(), 11);
        let last = *s.singular_points().last().unwrap();
        assert!((last - 21.0 * PI / (2.0 * 11.34 * PI)).abs() < 1e-15);
    }

    #[test]
    fn strategy_b_rejects_overlapping_intervals() {
        // π/(2ω) = 1/(2·11.34) ≈ 0.044 in units of T
        assert!(strategy_b(0.5, 11.34 * PI, 1.0, 0.05, false).is_err());
        assert!(strategy_b(0.5, 11.34 * PI, 1.0, 0.0, false).is_err());
    }

    #[test]
    fn strategy_b_modification_is_piecewise() {
        let s = strategy_b(0.5, 11.34 * PI, 1.0, 0.01, false).unwrap();
        let dt = s.delta_t().unwrap();
        for &tn in s.singular_points() {
            let mid = s.envelope(tn);
            let want = (s.unmodified_envelope(tn - dt) + s.unmodified_envelope(tn + dt)) * 0.5;
            assert!((mid - want).norm() <= 1e-12 * want.norm().max(1.0));
            // just outside the interval the raw envelope is used verbatim
            for t in [tn - 1.5 * dt, tn + 1.5 * dt] {
                assert_eq!(s.envelope(t), s.unmodified_envelope(t));
            }
        }
    }

    #[test]
    fn neglect_imag_zeroes_imaginary_part() {
        let s = strategy_b(0.5, 11.34 * PI, 1.0, 0.005, true).unwrap();
        let full = strategy_b(0.5, 11.34 * PI, 1.0, 0.005, false).unwrap();
        for t in s.sample_times(997) {
            assert_eq!(s.envelope(t).im, 0.0);
            assert_eq!(s.envelope(t).re, full.envelope(t).re);
        }
    }

    #[test]
    fn strategy_c_range_checks() {
        assert!(strategy_c(0.36, 1.0, 6).is_err());
        assert!(strategy_c(-0.1, 1.0, 6).is_err());
        assert!(strategy_c(0.3, 1.0, 0).is_err());
        let s = strategy_c(0.3396, 2.0, 6).unwrap();
        let (a, b) = s.domain();
        assert!((a - PI / 4.0).abs() < 1e-15);
        assert!((b - a - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn strategy_c_vanishes_at_carrier_zeros() {
        let omega = 1.3;
        let s = strategy_c(0.3396 * omega, omega, 2).unwrap();
        for m in 0..4 {
            let t = (m as f64 + 0.5) * PI / omega;
            assert!(s.profile.beta(t).abs() < 1e-15);
            assert!(s.envelope(t).im.abs() < 1e-15);
        }
    }

    #[test]
    fn sinc_series_joins_direct_formula() {
        let x = 0.999_999e-4;
        assert!((sinc(x) - sin(x) / x).abs() < 4.0 * f64::EPSILON);
        assert_eq!(sinc(0.0), 1.0);
    }
}
