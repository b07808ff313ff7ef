//! Auxiliary-parameter trajectories.
//!
//! All three pulse-design strategies share one family: `α` constant,
//! `λ = 0`, `θ̇ = −ω` and `ε̇ = ω sin²β`, differing only in the profile of
//! `β(t)`. [`ResonantTrajectory`] implements that family; `ε(t)` is obtained
//! by quadrature from a table of cumulative values.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use libm::{asin, cos, sin, sqrt};

use crate::drive::check_domain;
use crate::invariant::{lr_phase_rates, AuxParams};
use crate::numerics::{integrate_with, Quadrature};
use crate::{Error, Result};

/// A time-dependent set of auxiliary parameters on a finite domain.
pub trait AuxiliaryTrajectory {
    fn domain(&self) -> (f64, f64);

    fn at(&self, t: f64) -> Result<AuxParams>;

    /// Lewis-Riesenfeld phases `Θ_k(t) = ∫ ⟨φ_k|i∂_t − H|φ_k⟩` of
    /// `(φ₊, φ₋, φ₀)`, zero at the domain start.
    ///
    /// The default integrates [`lr_phase_rates`] numerically.
    fn lr_phases(&self, t: f64) -> Result<[f64; 3]> {
        check_domain(t, self.domain())?;
        let (start, _) = self.domain();
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut failure = None;
            let q = Quadrature::new(1e-11).min_panels(16);
            let value = integrate_with(
                |s| match self.at(s).and_then(|a| lr_phase_rates(&a)) {
                    Ok(rates) => rates[k],
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                start,
                t,
                &q,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            *slot = value.value;
        }
        Ok(out)
    }
}

impl<T: AuxiliaryTrajectory + ?Sized> AuxiliaryTrajectory for &T {
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn at(&self, t: f64) -> Result<AuxParams> {
        (**self).at(t)
    }
    fn lr_phases(&self, t: f64) -> Result<[f64; 3]> {
        (**self).lr_phases(t)
    }
}

/// Running integral `∫_a^t f` of a smooth integrand, from values cached at
/// equally spaced knots plus a short quadrature from the nearest knot.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    start: f64,
    end: f64,
    step: f64,
    knots: Vec<f64>,
}

const KNOT_TOL: f64 = 1e-14;

fn knot_quadrature() -> Quadrature {
    Quadrature::new(KNOT_TOL).min_panels(4)
}

impl CumulativeIntegral {
    pub fn build<F: Fn(f64) -> f64>(f: F, start: f64, end: f64, max_step: f64) -> Result<Self> {
        if !(end >= start) || !(max_step > 0.0) {
            return Err(Error::InvalidArgument("cumulative integral needs start <= end and a positive step"));
        }
        let n = libm::ceil((end - start) / max_step).max(1.0) as usize;
        let step = (end - start) / n as f64;
        let mut knots = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        knots.push(0.0);
        for k in 0..n {
            let a = start + k as f64 * step;
            acc += integrate_with(&f, a, a + step, &knot_quadrature())?.value;
            knots.push(acc);
        }
        Ok(Self { start, end, step, knots })
    }

    pub fn total(&self) -> f64 {
        *self.knots.last().unwrap_or(&0.0)
    }

    /// `∫_start^t f`; `f` must be the integrand the table was built from.
    pub fn eval<F: Fn(f64) -> f64>(&self, f: F, t: f64) -> Result<f64> {
        check_domain(t, (self.start, self.end))?;
        if self.step == 0.0 {
            return Ok(0.0);
        }
        let last = self.knots.len() - 1;
        let k = libm::round((t - self.start) / self.step).clamp(0.0, last as f64) as usize;
        let anchor = self.start + k as f64 * self.step;
        let tail = integrate_with(&f, anchor, t, &knot_quadrature())?.value;
        Ok(self.knots[k] + tail)
    }
}

/// Shape of `β(t)` for the three strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaProfile {
    /// `β = (A/2)[1 − cos(2πt/T)] cos²(ωt)`.
    Smooth { amplitude: f64, period: f64, omega: f64 },
    /// `β̄ = (B/2)[1 − cos(2πt/T)]`.
    Flat { amplitude: f64, period: f64 },
    /// `β = −½ arcsin[2√2 (Ω₀/ω) cos⁴(ωt)]`.
    Reverse { ratio: f64, omega: f64 },
}

impl BetaProfile {
    pub fn beta(&self, t: f64) -> f64 {
        match *self {
            BetaProfile::Smooth { amplitude, period, omega } => {
                let cw = cos(omega * t);
                0.5 * amplitude * (1.0 - cos(2.0 * PI * t / period)) * cw * cw
            }
            BetaProfile::Flat { amplitude, period } => {
                0.5 * amplitude * (1.0 - cos(2.0 * PI * t / period))
            }
            BetaProfile::Reverse { ratio, omega } => -0.5 * asin(reverse_arg(ratio, omega, t)),
        }
    }

    pub fn beta_dot(&self, t: f64) -> f64 {
        match *self {
            BetaProfile::Smooth { amplitude, period, omega } => {
                let phase = 2.0 * PI * t / period;
                let cw = cos(omega * t);
                PI * amplitude / period * sin(phase) * cw * cw
                    - 0.5 * amplitude * omega * (1.0 - cos(phase)) * sin(2.0 * omega * t)
            }
            BetaProfile::Flat { amplitude, period } => {
                PI * amplitude / period * sin(2.0 * PI * t / period)
            }
            BetaProfile::Reverse { ratio, omega } => {
                let y = reverse_arg(ratio, omega, t);
                let cw = cos(omega * t);
                4.0 * SQRT_2 * ratio * omega * cw * cw * cw * sin(omega * t) / sqrt(1.0 - y * y)
            }
        }
    }

    /// `sin²β`, in a cancellation-free form for the reverse profile.
    pub fn sin2_beta(&self, t: f64) -> f64 {
        match *self {
            BetaProfile::Reverse { ratio, omega } => {
                let y = reverse_arg(ratio, omega, t);
                y * y / (2.0 * (1.0 + sqrt((1.0 - y * y).max(0.0))))
            }
            _ => {
                let s = sin(self.beta(t));
                s * s
            }
        }
    }
}

fn reverse_arg(ratio: f64, omega: f64, t: f64) -> f64 {
    let c2 = cos(omega * t) * cos(omega * t);
    2.0 * SQRT_2 * ratio * c2 * c2
}

/// Trajectory with `α` fixed, `λ = 0`, `θ = −ω(t − t₀)` and
/// `ε(t) = ω ∫_{t₀}^t sin²β`.
#[derive(Debug, Clone)]
pub struct ResonantTrajectory {
    profile: BetaProfile,
    alpha: f64,
    omega: f64,
    start: f64,
    end: f64,
    epsilon: CumulativeIntegral,
}

/// Knots per carrier period in the cumulative `ε` table.
const KNOTS_PER_PERIOD: f64 = 32.0;

impl ResonantTrajectory {
    pub fn new(profile: BetaProfile, alpha: f64, omega: f64, start: f64, end: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument("carrier frequency must be positive"));
        }
        if !(start.is_finite() && end.is_finite() && end >= start) {
            return Err(Error::InvalidArgument("trajectory domain must be finite with start <= end"));
        }
        let rate = |t: f64| omega * profile.sin2_beta(t);
        let epsilon = CumulativeIntegral::build(rate, start, end, 2.0 * PI / omega / KNOTS_PER_PERIOD)?;
        Ok(Self { profile, alpha, omega, start, end, epsilon })
    }

    pub fn profile(&self) -> BetaProfile {
        self.profile
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn epsilon(&self, t: f64) -> Result<f64> {
        let profile = self.profile;
        let omega = self.omega;
        self.epsilon.eval(|s| omega * profile.sin2_beta(s), t)
    }

    /// `ε` at the end of the domain.
    pub fn final_epsilon(&self) -> f64 {
        self.epsilon.total()
    }
}

impl AuxiliaryTrajectory for ResonantTrajectory {
    fn domain(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    fn at(&self, t: f64) -> Result<AuxParams> {
        let epsilon = self.epsilon(t)?;
        Ok(AuxParams {
            alpha: self.alpha,
            beta: self.profile.beta(t),
            epsilon,
            lambda: 0.0,
            theta: -self.omega * (t - self.start),
            alpha_dot: 0.0,
            beta_dot: self.profile.beta_dot(t),
            epsilon_dot: self.omega * self.profile.sin2_beta(t),
            lambda_dot: 0.0,
            theta_dot: -self.omega,
        })
    }

    /// Closed form for this family: `Θ = (ωτ − ε, ωτ − ε, −ε)`, `τ = t − t₀`.
    fn lr_phases(&self, t: f64) -> Result<[f64; 3]> {
        let eps = self.epsilon(t)?;
        let wt = self.omega * (t - self.start);
        Ok([wt - eps, wt - eps, -eps])
    }
}
