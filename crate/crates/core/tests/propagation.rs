use std::f64::consts::PI;

use proptest::prelude::*;

use lrpulse_core::{
    calibrate_strategy_c, compare_with_analytic, convergence_study, propagate,
    propagate_with_analytic, strategy_a, strategy_b, strategy_c, Carriers, Drive, DriveSample,
    PropagationConfig, Result, StateVector, C64,
};

struct Bare {
    omega: f64,
    end: f64,
}

impl Drive for Bare {
    fn carriers(&self) -> Carriers {
        Carriers::equal(self.omega).unwrap()
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, self.end)
    }
    fn sample(&self, _t: f64) -> Result<DriveSample> {
        Ok(DriveSample::ZERO)
    }
}

#[test]
fn bare_hamiltonian_keeps_populations() {
    let d = Bare { omega: 5.0, end: 4.0 };
    let r = propagate(&d, &StateVector::basis(1), &PropagationConfig::default()).unwrap();
    assert!(r.populations.iter().all(|p| (p[0] - 1.0).abs() < 1e-9 && p[1] == 0.0 && p[2] == 0.0));
    let exact = C64::from_polar(1.0, 5.0 * 4.0);
    assert!((r.final_state[0] - exact).norm() < 1e-9);
}

#[test]
fn bare_hamiltonian_converges_trivially() {
    let d = Bare { omega: 1.0, end: 3.0 };
    let t = convergence_study(&d, &StateVector::basis(2), &[100, 200, 400]).unwrap();
    assert!(t.rows.iter().all(|r| r.final_p3 == 0.0));
    assert!(t.differences().iter().all(|&d| d == 0.0));
    assert_eq!(t.observed_order(), None);
}

#[test]
fn zero_amplitude_schedule_keeps_ground_state() {
    let s = strategy_a(0.0, 10.0 * PI, 1.0).unwrap();
    let r = propagate(&s, &StateVector::basis(1), &PropagationConfig::default()).unwrap();
    assert!(r.populations.iter().all(|p| (p[0] - 1.0).abs() < 1e-9));
}

#[test]
fn smooth_strategy_transfers_and_matches_expansion() {
    let s = strategy_a(0.5, 29.7323 * PI, 1.0).unwrap();
    let traj = s.trajectory().unwrap();
    let r = propagate_with_analytic(&s, &traj, &StateVector::basis(1), &PropagationConfig::default())
        .unwrap();
    assert!(r.final_populations[2] > 0.999, "{:?}", r.final_populations);
    assert!(r.norm_drift <= 1e-9, "{}", r.norm_drift);
    assert!(r.analytic_deviation.unwrap() < 1e-4, "{:?}", r.analytic_deviation);
    for (p, n) in r.populations.iter().zip(&r.norms) {
        assert!((p.iter().sum::<f64>() - n).abs() < 1e-12);
        assert!((n - 1.0).abs() <= r.norm_drift + 1e-15);
    }
    // small |2⟩ bump, rising |3⟩
    assert!(r.max_p2 > 0.05 && r.max_p2 < 0.2, "{}", r.max_p2);
}

#[test]
fn empty_range_has_no_deviation() {
    let s = strategy_a(0.5, 29.7323 * PI, 1.0).unwrap();
    let traj = s.trajectory().unwrap();
    let cfg = PropagationConfig::default().with_range(0.0, 0.0);
    assert_eq!(compare_with_analytic(&s, &traj, &StateVector::basis(1), &cfg).unwrap(), 0.0);
}

#[test]
fn mismatched_domains_are_rejected() {
    let s = strategy_a(0.5, 29.7323 * PI, 1.0).unwrap();
    let other = strategy_a(0.5, 29.7323 * PI, 2.0).unwrap().trajectory().unwrap();
    let err = compare_with_analytic(&s, &other, &StateVector::basis(1), &PropagationConfig::default());
    assert!(err.is_err());
}

#[test]
fn modified_schedule_departs_from_expansion() {
    let psi0 = StateVector::basis(1);
    let cfg = PropagationConfig::default();
    let a = strategy_a(0.5, 29.7323 * PI, 1.0).unwrap();
    let b = strategy_b(0.5, 11.3369 * PI, 1.0, 0.01, false).unwrap();
    let da = compare_with_analytic(&a, &a.trajectory().unwrap(), &psi0, &cfg).unwrap();
    let db = compare_with_analytic(&b, &b.trajectory().unwrap(), &psi0, &cfg).unwrap();
    assert!(db > 100.0 * da && db > 0.1, "{da} vs {db}");
}

#[test]
fn smooth_strategy_is_fourth_order() {
    let s = strategy_a(0.5, 29.7323 * PI, 1.0).unwrap();
    let t = convergence_study(&s, &StateVector::basis(1), &[250, 500, 1000, 2000]).unwrap();
    let order = t.observed_order().unwrap();
    assert!((order - 4.0).abs() < 0.5, "order {order}, diffs {:?}", t.differences());
}

#[test]
fn reverse_strategy_hump_and_completion() {
    let omega = 1.0;
    let k = calibrate_strategy_c(PI / 6.0, 1e-12).unwrap().solution;
    let s = strategy_c(k * omega, omega, 6).unwrap();
    let unit = PI / (2.0 * omega);
    let cfg = PropagationConfig::default().with_range(unit, 24.0 * unit);
    let hump = propagate(&s, &StateVector::basis(1), &cfg).unwrap();
    assert!((hump.final_populations[2] - 0.806).abs() < 0.01, "{:?}", hump.final_populations);
    let full = propagate(&s, &StateVector::basis(1), &PropagationConfig::default()).unwrap();
    assert!(full.final_populations[2] > 0.9999);
    let five = strategy_c(k * omega, omega, 5).unwrap();
    let short = propagate(&five, &StateVector::basis(1), &PropagationConfig::default()).unwrap();
    assert!(short.final_populations[2] < 0.99);
}

#[test]
fn floor_resolution_drift_budget() {
    let s = strategy_a(0.6, 21.0533 * PI, 1.0).unwrap();
    let cfg = PropagationConfig::default().with_steps(100);
    let r = propagate(&s, &StateVector::basis(1), &cfg).unwrap();
    assert!(r.norm_drift <= 1e-6, "{}", r.norm_drift);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn populations_sum_to_norm(re in prop::array::uniform3(-1.0f64..1.0), im in prop::array::uniform3(-1.0f64..1.0)) {
        let raw = StateVector::new(C64::new(re[0], im[0]), C64::new(re[1], im[1]), C64::new(re[2], im[2]));
        prop_assume!(raw.norm() > 0.1);
        let psi0 = raw * (1.0 / raw.norm());
        let s = strategy_a(0.7, 15.8274 * PI, 1.0).unwrap();
        let r = propagate(&s, &psi0, &PropagationConfig::default().with_steps(400)).unwrap();
        for (p, n) in r.populations.iter().zip(&r.norms) {
            prop_assert!((p.iter().sum::<f64>() - n).abs() < 1e-12);
            prop_assert!((n - 1.0).abs() <= r.norm_drift + 1e-15);
        }
        prop_assert!(r.norm_drift < 1e-6);
    }
}
