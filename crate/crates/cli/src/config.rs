//! Run configuration: a JSON file and command-line flags, flags winning.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use lrpulse_core::{
    calibrate_strategy_c, delta_epsilon_per_period, solve_omega_t_for_a, solve_omega_t_for_b,
    strategy_a, strategy_b, strategy_c, PulseSchedule,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyTag {
    A,
    B,
    C,
}

/// Every field optional so a file and the flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub strategy: Option<StrategyTag>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub delta_t_over_t: Option<f64>,
    pub neglect_imag: Option<bool>,
    pub omega0_over_omega: Option<f64>,
    /// Per-period `Δε` in units of `π`.
    pub target_delta_epsilon_over_pi: Option<f64>,
    pub n_periods: Option<usize>,
    /// Skips calibration for A/B when given.
    pub omega_t_over_pi: Option<f64>,
    /// Total time `T` for A/B.
    pub period: Option<f64>,
    /// Carrier `ω` for C.
    pub omega: Option<f64>,
    pub steps_per_period: Option<usize>,
    pub record_stride: Option<usize>,
    pub calibration_tol: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Format { path: path.into(), message: e.to_string() })
    }

    /// `self` with every field set in `top` replaced.
    pub fn overlay(mut self, top: &RunConfig) -> Self {
        overlay!(
            self, top, strategy, a, b, delta_t_over_t, neglect_imag, omega0_over_omega,
            target_delta_epsilon_over_pi, n_periods, omega_t_over_pi, period, omega,
            steps_per_period, record_stride, calibration_tol
        );
        self
    }

    fn reject(&self, tag: StrategyTag, present: &[(&str, bool)]) -> CliResult<()> {
        for (name, set) in present {
            if *set {
                return Err(CliError::Validation(format!(
                    "parameter {name} does not apply to strategy {tag:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn calibration_tol(&self) -> CliResult<f64> {
        positive("calibration_tol", self.calibration_tol.unwrap_or(1e-6))
    }

    /// Checks the parameter set and builds the schedule, calibrating as
    /// needed.
    pub fn resolve(&self) -> CliResult<Plan> {
        let tag = self
            .strategy
            .ok_or_else(|| CliError::Validation("no strategy given (a, b or c)".into()))?;
        let tol = self.calibration_tol()?;
        let steps = self.steps_per_period.unwrap_or(2000);
        let stride = self.record_stride.unwrap_or(200);
        if steps < 100 {
            return Err(CliError::Validation("steps_per_period must be at least 100".into()));
        }
        if stride == 0 {
            return Err(CliError::Validation("record_stride must be positive".into()));
        }
        let c_only = [
            ("omega0_over_omega", self.omega0_over_omega.is_some()),
            ("target_delta_epsilon_over_pi", self.target_delta_epsilon_over_pi.is_some()),
            ("n_periods", self.n_periods.is_some()),
            ("omega", self.omega.is_some()),
        ];
        let b_only = [
            ("delta_t_over_t", self.delta_t_over_t.is_some()),
            ("neglect_imag", self.neglect_imag.is_some()),
        ];
        let ab = [
            ("omega_t_over_pi", self.omega_t_over_pi.is_some()),
            ("period", self.period.is_some()),
        ];
        let schedule = match tag {
            StrategyTag::A => {
                self.reject(tag, &c_only)?;
                self.reject(tag, &b_only)?;
                self.reject(tag, &[("b", self.b.is_some())])?;
                let a = self.a.ok_or_else(|| CliError::Validation("strategy a needs a".into()))?;
                let period = positive("period", self.period.unwrap_or(1.0))?;
                let wt = match self.omega_t_over_pi {
                    Some(x) => positive("omega_t_over_pi", x)? * PI,
                    None => solve_omega_t_for_a(a, tol)?.solution,
                };
                strategy_a(a, wt / period, period)?
            }
            StrategyTag::B => {
                self.reject(tag, &c_only)?;
                self.reject(tag, &[("a", self.a.is_some())])?;
                let b = self.b.ok_or_else(|| CliError::Validation("strategy b needs b".into()))?;
                let period = positive("period", self.period.unwrap_or(1.0))?;
                let wt = match self.omega_t_over_pi {
                    Some(x) => positive("omega_t_over_pi", x)? * PI,
                    None => solve_omega_t_for_b(b, tol)?.solution,
                };
                let dt = self.delta_t_over_t.unwrap_or(0.01);
                strategy_b(b, wt / period, period, dt, self.neglect_imag.unwrap_or(false))?
            }
            StrategyTag::C => {
                self.reject(tag, &b_only)?;
                self.reject(tag, &ab)?;
                self.reject(tag, &[("a", self.a.is_some()), ("b", self.b.is_some())])?;
                let omega = positive("omega", self.omega.unwrap_or(1.0))?;
                let ratio = match (self.omega0_over_omega, self.target_delta_epsilon_over_pi) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Validation(
                            "give either omega0_over_omega or target_delta_epsilon_over_pi".into(),
                        ))
                    }
                    (Some(r), None) => r,
                    (None, Some(x)) => calibrate_strategy_c(x * PI, tol)?.solution,
                    (None, None) => {
                        return Err(CliError::Validation(
                            "strategy c needs omega0_over_omega or target_delta_epsilon_over_pi".into(),
                        ))
                    }
                };
                let n = match self.n_periods {
                    Some(n) => n,
                    None => periods_needed(ratio)?,
                };
                strategy_c(ratio * omega, omega, n)?
            }
        };
        Ok(Plan { tag, schedule, steps_per_period: steps, record_stride: stride })
    }
}

/// Smallest period count with `n Δε ≥ π`.
pub fn periods_needed(ratio: f64) -> CliResult<usize> {
    let per = delta_epsilon_per_period(ratio)?;
    if per <= 0.0 {
        return Err(CliError::Validation(
            "n_periods is required when Ω₀ = 0 (no phase accumulates)".into(),
        ));
    }
    // slack absorbs calibration error when n Δε lands on π
    Ok((PI / per - 1e-4).ceil().max(1.0) as usize)
}

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("{name} must be positive, got {x}")))
    }
}

/// A resolved run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub tag: StrategyTag,
    pub schedule: PulseSchedule,
    pub steps_per_period: usize,
    pub record_stride: usize,
}

impl Plan {
    pub fn propagation(&self) -> lrpulse_core::PropagationConfig {
        lrpulse_core::PropagationConfig::default()
            .with_steps(self.steps_per_period)
            .with_stride(self.record_stride)
    }
}

/// Parses a decimal or a fraction such as `1/6`.
pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            n / d
        }
        None => s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}
