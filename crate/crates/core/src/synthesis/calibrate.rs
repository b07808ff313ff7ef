//! Calibration: the `ωT` that makes `ε(T) = π` for strategies A and B, and
//! the `Ω₀/ω` that gives a target per-period `Δε` for strategy C.
//!
//! All integrals are written in the dimensionless time `u = ωt`, so the
//! results depend on the strategy parameter alone.

use core::f64::consts::PI;

use libm::{ceil, cos, sin};

use crate::numerics::{bracket_by_doubling, find_root, integrate_with, Bracket, Quadrature};
use crate::trajectory::BetaProfile;
use crate::{Error, Result};

/// Supremum of the allowed `Ω₀/ω`, `1/(2√2)`.
pub const MAX_REVERSE_RATIO: f64 = 0.353_553_390_593_273_8;

const QUAD_TOL: f64 = 1e-9;
const PANELS_PER_PERIOD: f64 = 64.0;
const MAX_DOUBLINGS: usize = 40;

/// Solved calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    /// The input: `A`, `B` or the target `Δε`.
    pub parameter: f64,
    /// `ωT` for A/B, `Ω₀/ω` for C.
    pub solution: f64,
    /// Defining equation evaluated at the solution.
    pub residual: f64,
    pub iterations: usize,
}

fn panels_for(span: f64) -> usize {
    (ceil(span / (2.0 * PI)) * PANELS_PER_PERIOD) as usize
}

fn sin2(x: f64) -> f64 {
    let s = sin(x);
    s * s
}

/// `ε(T) = ∫₀^{ωT} sin²β du` with `β = (A/2)[1 − cos(2πu/ωT)] cos²u`.
pub fn final_epsilon_smooth(a: f64, omega_t: f64) -> Result<f64> {
    let f = |u: f64| {
        let c = cos(u);
        sin2(0.5 * a * (1.0 - cos(2.0 * PI * u / omega_t)) * c * c)
    };
    let q = Quadrature::new(QUAD_TOL).min_panels(panels_for(omega_t));
    Ok(integrate_with(f, 0.0, omega_t, &q)?.value)
}

/// `ε(T)` for the flat profile `β̄ = (B/2)[1 − cos(2πu/ωT)]`.
pub fn final_epsilon_flat(b: f64, omega_t: f64) -> Result<f64> {
    let f = |u: f64| sin2(0.5 * b * (1.0 - cos(2.0 * PI * u / omega_t)));
    let q = Quadrature::new(QUAD_TOL).min_panels(panels_for(omega_t));
    Ok(integrate_with(f, 0.0, omega_t, &q)?.value)
}

fn check_design_amplitude(x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 0.8) {
        return Err(Error::InvalidArgument("calibration amplitude must lie in (0, 0.8]"));
    }
    Ok(())
}

/// Solves `ε(T) = π` for `ωT` by doubling from `ωT = π` and bisecting;
/// `tol` is the bracket width in units of `π`.
fn solve_omega_t<F: Fn(f64) -> Result<f64>>(parameter: f64, eps: F, tol: f64) -> Result<CalibrationResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("calibration tolerance must be positive"));
    }
    let mut failure = None;
    let mut g = |x: f64| match eps(x) {
        Ok(v) => v - PI,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let bracket = bracket_by_doubling(&mut g, PI, MAX_DOUBLINGS);
    let root = bracket.and_then(|b| find_root(&mut g, b, tol * PI));
    if let Some(e) = failure {
        return Err(e);
    }
    let root = root?;
    Ok(CalibrationResult {
        parameter,
        solution: root.x,
        residual: root.residual,
        iterations: root.iterations,
    })
}

/// `ωT` with `ε(T) = π` for strategy A.
pub fn solve_omega_t_for_a(a: f64, tol: f64) -> Result<CalibrationResult> {
    check_design_amplitude(a)?;
    solve_omega_t(a, |x| final_epsilon_smooth(a, x), tol)
}

/// `ωT` with `ε(T) = π` for strategy B.
pub fn solve_omega_t_for_b(b: f64, tol: f64) -> Result<CalibrationResult> {
    check_design_amplitude(b)?;
    solve_omega_t(b, |x| final_epsilon_flat(b, x), tol)
}

fn reverse_period_integral(ratio: f64) -> Result<f64> {
    let profile = BetaProfile::Reverse { ratio, omega: 1.0 };
    let q = Quadrature::new(1e-13).min_panels(256);
    Ok(integrate_with(|u| profile.sin2_beta(u), 0.5 * PI, 2.5 * PI, &q)?.value)
}

/// `Δε = ∫_{π/2}^{5π/2} sin²β du` for strategy C at `Ω₀/ω`.
pub fn delta_epsilon_per_period(omega0_over_omega: f64) -> Result<f64> {
    if !(0.0..MAX_REVERSE_RATIO).contains(&omega0_over_omega) {
        return Err(Error::InvalidArgument("Ω₀/ω must lie in [0, 1/(2√2))"));
    }
    reverse_period_integral(omega0_over_omega)
}

/// `Δε` at the supremum `Ω₀/ω → 1/(2√2)`, where the integrand stays finite.
pub fn max_delta_epsilon_per_period() -> Result<f64> {
    reverse_period_integral(MAX_REVERSE_RATIO)
}

/// `Ω₀/ω` with `Δε(Ω₀/ω) = target`, bisected on `[0, 1/(2√2)]` down to a
/// bracket of width `tol`.
pub fn calibrate_strategy_c(target: f64, tol: f64) -> Result<CalibrationResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("calibration tolerance must be positive"));
    }
    if target == 0.0 {
        return Ok(CalibrationResult { parameter: 0.0, solution: 0.0, residual: 0.0, iterations: 0 });
    }
    if !(target > 0.0 && target < max_delta_epsilon_per_period()?) {
        return Err(Error::Calibration("target Δε outside the reachable range"));
    }
    let mut failure = None;
    let f = |k: f64| match reverse_period_integral(k) {
        Ok(v) => v - target,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let root = find_root(f, Bracket::new(0.0, MAX_REVERSE_RATIO)?, tol);
    if let Some(e) = failure {
        return Err(e);
    }
    let root = root?;
    Ok(CalibrationResult {
        parameter: target,
        solution: root.x,
        residual: root.residual,
        iterations: root.iterations,
    })
}
