use core::f64::consts::PI;

use libm::{ceil, cos, floor, sin};

use crate::drive::{Carriers, Drive, DriveSample};
use crate::invariant::{inverse_engineered, AuxParams};
use crate::linalg::C64;
use crate::trajectory::AuxiliaryTrajectory;
use crate::{Error, Result};

/// Schedule inverse engineered from an arbitrary auxiliary trajectory.
///
/// The relations fix the products `Ω_p cos(ω_p t)` and `Ω_s cos(ω_s t)`;
/// the envelopes are their quotients by the carrier cosines. Near a carrier
/// zero the quotient is replaced by its l'Hôpital limit.
#[derive(Debug, Clone)]
pub struct GeneralSchedule<T> {
    traj: T,
    carriers: Carriers,
}

/// Below this `|cos|` the quotient switches to the derivative ratio.
const COS_FLOOR: f64 = 1e-6;
/// Constraint residual tolerated at the screening samples.
const CONSTRAINT_TOL: f64 = 1e-8;
/// Relative size of a numerator treated as vanishing at a carrier zero.
const ZERO_NUMERATOR_TOL: f64 = 1e-8;
const SCREEN_SAMPLES: usize = 256;

/// Builds the schedule for `traj`, refusing trajectories whose coupling
/// numerators do not vanish where a carrier cosine does.
pub fn synthesize_general<T: AuxiliaryTrajectory>(
    traj: T,
    omega_p: f64,
    omega_s: f64,
) -> Result<GeneralSchedule<T>> {
    let carriers = Carriers::new(omega_p, omega_s)?;
    let (start, end) = traj.domain();
    for k in 0..=SCREEN_SAMPLES {
        let t = start + (end - start) * k as f64 / SCREEN_SAMPLES as f64;
        let aux = traj.at(t)?;
        if !aux.is_finite() {
            return Err(Error::NonFinite { t });
        }
        if aux.constraint_residual() > CONSTRAINT_TOL * (1.0 + aux.lambda_dot.abs()) {
            return Err(Error::InvalidArgument(
                "auxiliary trajectory violates the constraint on α̇",
            ));
        }
    }
    let schedule = GeneralSchedule { traj, carriers };
    for (omega, pick) in [(omega_p, 0usize), (omega_s, 1usize)] {
        // zeros (m + ½)π/ω inside the domain
        let first = ceil(omega * start / PI - 0.5) as i64;
        let last = floor(omega * end / PI - 0.5) as i64;
        for m in first..=last {
            let t = (m as f64 + 0.5) * PI / omega;
            let aux = schedule.traj.at(t)?;
            let n = numerators(&aux)[pick];
            if n.norm() > ZERO_NUMERATOR_TOL * omega {
                return Err(Error::Singularity { what: "nonzero coupling at a carrier zero", t });
            }
        }
    }
    Ok(schedule)
}

fn numerators(aux: &AuxParams) -> [C64; 2] {
    let (pump, stokes, _, _) = inverse_engineered(aux);
    [pump, stokes]
}

impl<T: AuxiliaryTrajectory> GeneralSchedule<T> {
    pub fn trajectory(&self) -> &T {
        &self.traj
    }

    fn quotient(&self, t: f64, omega: f64, pick: usize, direct: C64) -> Result<C64> {
        let c = cos(omega * t);
        if c.abs() > COS_FLOOR {
            return Ok(direct / c);
        }
        let h = 1e-4 / omega;
        let (start, end) = self.traj.domain();
        let (lo, hi) = ((t - h).max(start), (t + h).min(end));
        let n_hi = numerators(&self.traj.at(hi)?)[pick];
        let n_lo = numerators(&self.traj.at(lo)?)[pick];
        let slope = (n_hi - n_lo) / (hi - lo);
        Ok(slope / (-omega * sin(omega * t)))
    }
}

impl<T: AuxiliaryTrajectory> Drive for GeneralSchedule<T> {
    fn carriers(&self) -> Carriers {
        self.carriers
    }

    fn domain(&self) -> (f64, f64) {
        self.traj.domain()
    }

    fn sample(&self, t: f64) -> Result<DriveSample> {
        let aux = self.traj.at(t)?;
        let (pump, stokes, diag_p, diag_s) = inverse_engineered(&aux);
        let Carriers { omega_p, omega_s } = self.carriers;
        let s = DriveSample {
            omega_p: self.quotient(t, omega_p, 0, pump)?,
            omega_s: self.quotient(t, omega_s, 1, stokes)?,
            delta_p: diag_p - omega_p,
            delta_s: diag_s - omega_s,
        };
        if s.is_finite() {
            Ok(s)
        } else {
            Err(Error::NonFinite { t })
        }
    }
}
