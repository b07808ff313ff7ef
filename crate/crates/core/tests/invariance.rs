use std::f64::consts::PI;

use lrpulse_core::invariant::measured_lr_phase_rates;
use lrpulse_core::{
    analytic_evolution, calibrate_strategy_c, invariance_residual, lr_phase_rate,
    reduced_lr_expansion, strategy_a, strategy_b, strategy_c, AuxiliaryTrajectory, Carriers, Drive,
    DriveSample, PulseSchedule, Result, StateVector,
};

fn reverse_schedule() -> PulseSchedule {
    let k = calibrate_strategy_c(PI / 6.0, 1e-12).unwrap().solution;
    strategy_c(k * 3.0, 3.0, 6).unwrap()
}

fn schedules() -> Vec<PulseSchedule> {
    vec![
        strategy_a(0.5, 29.7323 * PI, 1.0).unwrap(),
        strategy_b(0.5, 11.3369 * PI, 1.0, 0.01, false).unwrap(),
        reverse_schedule(),
    ]
}

/// Interior probe times avoiding strategy-B modification intervals.
fn probe_times(s: &PulseSchedule) -> Vec<f64> {
    let (a, b) = s.domain();
    (1..40)
        .map(|k| a + (b - a) * (k as f64 + 0.37) / 41.0)
        .filter(|&t| !s.in_modified_interval(t))
        .collect()
}

#[test]
fn residual_shrinks_quadratically() {
    for s in schedules() {
        let traj = s.trajectory().unwrap();
        let h = 2e-3 / s.omega();
        let total = |h: f64| -> f64 {
            probe_times(&s).iter().map(|&t| invariance_residual(&s, &traj, t, h).unwrap()).sum()
        };
        let slope = (total(h) / total(h / 2.0)).log2();
        assert!((slope - 2.0).abs() < 0.1, "{:?}: slope {slope}", s.strategy());
        assert!(total(h / 8.0) < 1e-5 * s.omega() * probe_times(&s).len() as f64);
    }
}

struct Scaled<'a>(&'a PulseSchedule, f64);

impl Drive for Scaled<'_> {
    fn carriers(&self) -> Carriers {
        self.0.carriers()
    }
    fn domain(&self) -> (f64, f64) {
        self.0.domain()
    }
    fn sample(&self, t: f64) -> Result<DriveSample> {
        let mut d = self.0.sample(t)?;
        d.omega_p *= self.1;
        d.omega_s *= self.1;
        Ok(d)
    }
}

#[test]
fn corrupted_amplitude_breaks_invariance() {
    let s = strategy_a(0.5, 29.7323 * PI, 1.0).unwrap();
    let traj = s.trajectory().unwrap();
    let bad = Scaled(&s, 1.1);
    let h = 1e-4 / s.omega();
    let worst = probe_times(&s)
        .iter()
        .map(|&t| invariance_residual(&bad, &traj, t, h).unwrap())
        .fold(0.0, f64::max);
    assert!(worst > 1e-2 * s.omega(), "{worst}");
}

#[test]
fn modification_intervals_break_invariance() {
    let s = strategy_b(0.5, 11.3369 * PI, 1.0, 0.01, false).unwrap();
    let traj = s.trajectory().unwrap();
    let h = 1e-6;
    for &tn in s.singular_points() {
        let t = tn + 0.3 * s.delta_t().unwrap();
        let r = invariance_residual(&s, &traj, t, h).unwrap();
        assert!(r > 1e-2, "t={t}: {r}");
    }
}

#[test]
fn measured_phase_rates_match_closed_form() {
    for s in schedules() {
        let traj = s.trajectory().unwrap();
        let omega = s.omega();
        let p = s.beta_profile();
        for t in probe_times(&s) {
            let m = measured_lr_phase_rates(&s, &traj, t, 1e-4 / omega).unwrap();
            let sin2 = p.sin2_beta(t);
            let want = [omega * (1.0 - sin2), omega * (1.0 - sin2), -omega * sin2];
            for k in 0..3 {
                assert!((m[k] - want[k]).abs() < 1e-6 * omega, "k={k} t={t}: {m:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn phase_rate_is_phi0_relative_to_phi_plus() {
    for s in schedules() {
        let traj = s.trajectory().unwrap();
        let omega = s.omega();
        for t in probe_times(&s) {
            let aux = traj.at(t).unwrap();
            if aux.beta.abs() < 1e-3 {
                continue;
            }
            let m = measured_lr_phase_rates(&s, &traj, t, 1e-4 / omega).unwrap();
            let theta_dot = lr_phase_rate(&aux).unwrap();
            assert!((m[2] - m[0] - theta_dot).abs() < 1e-6 * omega);
            assert!((m[1] - m[0]).abs() < 1e-6 * omega);
        }
    }
}

#[test]
fn reduced_expansion_agrees_up_to_global_phase() {
    let s = strategy_a(0.6, 21.0533 * PI, 1.0).unwrap();
    let traj = s.trajectory().unwrap();
    let psi0 = StateVector::basis(1);
    for k in 0..=50 {
        let t = k as f64 / 50.0;
        let exact = analytic_evolution(&traj, &psi0, t).unwrap();
        let reduced = reduced_lr_expansion(&traj, &psi0, t).unwrap();
        assert!((exact.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(reduced.phase_aligned_to(&exact).max_abs_diff(&exact) < 1e-12, "t={t}");
    }
    let end = analytic_evolution(&traj, &psi0, 1.0).unwrap();
    assert!((end.populations()[2] - 1.0).abs() < 1e-6);
}

#[test]
fn analytic_evolution_is_identity_at_start() {
    let s = reverse_schedule();
    let traj = s.trajectory().unwrap();
    let psi0 = StateVector::new(
        lrpulse_core::C64::new(0.6, 0.0),
        lrpulse_core::C64::new(0.0, 0.8),
        lrpulse_core::C64::new(0.0, 0.0),
    );
    let (t0, _) = traj.domain();
    assert_eq!(analytic_evolution(&traj, &psi0, t0).unwrap(), psi0);
    assert!(analytic_evolution(&traj, &(psi0 * 2.0), t0 + 0.1).is_err());
}
