//! Pulse synthesis for a driven three-level Λ system without the
//! rotating-wave approximation.
//!
//! Pulses are reverse engineered from a Lewis-Riesenfeld invariant: an
//! auxiliary trajectory `(α, β, ε, λ, θ)` fixes the invariant `I(t)`, the
//! Hamiltonian that keeps `I(t)` dynamically invariant is read off in closed
//! form, and the resulting schedule is checked against direct fixed-step RK4
//! integration of the Schrödinger equation.
//!
//! Module map:
//!
//! * [`drive`] – drive fields and the full Hamiltonian.
//! * [`linalg`] – 3-component states and 3×3 complex matrices.
//! * [`numerics`] – bisection, composite Simpson quadrature, central differences.
//! * [`invariant`] – Hamiltonian/invariant construction, eigenvectors, LR phases.
//! * [`trajectory`] – auxiliary-parameter trajectories, including the three
//!   strategy families.
//! * [`synthesis`] – pulse schedules (general inverse engineering and
//!   strategies A, B, C) plus their calibration solvers.
//! * [`propagator`] – RK4 propagation and transfer reports.
//!
//! The crate is `no_std` and only needs `alloc`.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod drive;
mod error;
pub mod invariant;
pub mod linalg;
pub mod numerics;
pub mod propagator;
pub mod synthesis;
pub mod trajectory;

pub use error::{Error, Result};
pub use drive::{hamiltonian_at, Carriers, Drive, DriveSample};
pub use invariant::{
    analytic_evolution, final_state_prediction, hamiltonian_from_aux, invariance_residual,
    invariant_at, invariant_eigenvectors, lr_phase_rate, lr_phase_rates, measured_lr_phase_rates,
    reduced_lr_expansion, AuxParams, Eigenvectors,
};
pub use linalg::{Matrix3, StateVector, C64};
pub use propagator::{
    compare_with_analytic, convergence_study, propagate, propagate_with_analytic,
    ConvergenceTable, PropagationConfig, TransferReport,
};
pub use synthesis::{
    calibrate_strategy_c, delta_epsilon_per_period, solve_omega_t_for_a, solve_omega_t_for_b,
    strategy_a, strategy_b, strategy_c, synthesize_general, CalibrationResult, GeneralSchedule,
    PulseSchedule, Strategy,
};
pub use trajectory::{AuxiliaryTrajectory, BetaProfile, ResonantTrajectory};
