//! The Lewis-Riesenfeld invariant of the three-level system, its
//! eigenvectors and phases, and the Hamiltonian it dictates.
//!
//! Everything is parametrised by four angles `α, β, ε, λ` plus the phase
//! `θ` of the zero-eigenvalue eigenvector; [`AuxParams`] carries them with
//! their first time derivatives. The angles must obey the constraint
//! `α̇ = λ̇ cos β cos ε`.

use libm::{cos, sin};

use crate::drive::{check_domain, hamiltonian_at, Drive};
use crate::linalg::{Matrix3, StateVector, C64};
use crate::trajectory::AuxiliaryTrajectory;
use crate::{Error, Result};



/// Auxiliary angles (radians) and their first derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AuxParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub theta: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
    pub epsilon_dot: f64,
    pub lambda_dot: f64,
    pub theta_dot: f64,
}

impl AuxParams {
    /// `|α̇ − λ̇ cos β cos ε|`.
    pub fn constraint_residual(&self) -> f64 {
        (self.alpha_dot - self.lambda_dot * cos(self.beta) * cos(self.epsilon)).abs()
    }

    pub fn is_finite(&self) -> bool {
        [
            self.alpha,
            self.beta,
            self.epsilon,
            self.lambda,
            self.theta,
            self.alpha_dot,
            self.beta_dot,
            self.epsilon_dot,
            self.lambda_dot,
            self.theta_dot,
        ]
        .iter()
        .all(|x| x.is_finite())
    }

    fn check(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument("auxiliary parameters must be finite"))
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// The invariant `I(t)`; eigenvalues `+1, −1, 0`.
pub fn invariant_at(aux: &AuxParams) -> Result<Matrix3> {
    aux.check()?;
    let (sa, ca) = (sin(aux.alpha), cos(aux.alpha));
    let (sb, cb) = (sin(aux.beta), cos(aux.beta));
    let (se, ce) = (sin(aux.epsilon), cos(aux.epsilon));
    let (s2a, c2a) = (sin(2.0 * aux.alpha), cos(2.0 * aux.alpha));
    let (s2l, c2l) = (sin(2.0 * aux.lambda), cos(2.0 * aux.lambda));
    let e_pos = c(ce, se);
    let e_neg = c(ce, -se);

    let i11 = c2l * (ca * ca * cb * cb - sa * sa) + ce * cb * s2a * s2l;
    let i12 = (r(ca * c2l * cb) + e_neg * (sa * s2l)) * sb;
    let i13 = r(0.25 * c2l * (3.0 + cos(2.0 * aux.beta)) * s2a) - c(ce * c2a, se) * (cb * s2l);
    let i22 = c2l * sb * sb;
    let i23 = (r(sa * c2l * cb) - e_pos * (ca * s2l)) * sb;
    let i33 = c2l * (sa * sa * cb * cb - ca * ca) - ce * cb * s2a * s2l;

    Ok(Matrix3([
        [r(i11), i12, i13],
        [i12.conj(), r(i22), i23],
        [i13.conj(), i23.conj(), r(i33)],
    ]))
}

/// Eigenvectors of the invariant for eigenvalues `+1`, `−1` and `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvectors {
    pub plus: StateVector,
    pub minus: StateVector,
    pub zero: StateVector,
}

impl Eigenvectors {
    pub const EIGENVALUES: [f64; 3] = [1.0, -1.0, 0.0];

    pub fn as_array(&self) -> [StateVector; 3] {
        [self.plus, self.minus, self.zero]
    }
}

pub fn invariant_eigenvectors(aux: &AuxParams) -> Result<Eigenvectors> {
    aux.check()?;
    Ok(eigenvectors(aux))
}

/// `φ±` carry `e^{−iε}`: with `e^{+iε}` they fail to diagonalise the
/// invariant whenever `sin 2λ ≠ 0`.
fn eigenvectors(aux: &AuxParams) -> Eigenvectors {
    let (sa, ca) = (sin(aux.alpha), cos(aux.alpha));
    let (sb, cb) = (sin(aux.beta), cos(aux.beta));
    let (sl, cl) = (sin(aux.lambda), cos(aux.lambda));
    let e = C64::from_polar(1.0, -aux.epsilon);
    Eigenvectors {
        plus: StateVector::new(
            r(ca * cb * cl) + e * (sa * sl),
            r(sb * cl),
            r(sa * cb * cl) - e * (ca * sl),
        ),
        minus: StateVector::new(
            r(ca * cb * sl) - e * (sa * cl),
            r(sb * sl),
            r(sa * cb * sl) + e * (ca * cl),
        ),
        zero: StateVector::new(r(ca * sb), r(-cb), r(sa * sb)),
    }
}

/// Time derivatives of the eigenvectors along the trajectory, by the chain
/// rule through `α, β, ε, λ`.
fn eigenvector_rates(aux: &AuxParams) -> Eigenvectors {
    let (sa, ca) = (sin(aux.alpha), cos(aux.alpha));
    let (sb, cb) = (sin(aux.beta), cos(aux.beta));
    let (sl, cl) = (sin(aux.lambda), cos(aux.lambda));
    let e = C64::from_polar(1.0, -aux.epsilon);
    // d/dt e^{−iε} = −iε̇ e^{−iε}
    let ie = -C64::i() * e;
    let (ad, bd, ed, ld) = (aux.alpha_dot, aux.beta_dot, aux.epsilon_dot, aux.lambda_dot);

    let plus = StateVector::new(
        (r(-sa * cb * cl) + e * (ca * sl)) * ad
            + r(-ca * sb * cl * bd)
            + ie * (sa * sl * ed)
            + (r(-ca * cb * sl) + e * (sa * cl)) * ld,
        r(cb * cl * bd - sb * sl * ld),
        (r(ca * cb * cl) + e * (sa * sl)) * ad + r(-sa * sb * cl * bd) - ie * (ca * sl * ed)
            + (r(-sa * cb * sl) - e * (ca * cl)) * ld,
    );
    let minus = StateVector::new(
        (r(-sa * cb * sl) - e * (ca * cl)) * ad + r(-ca * sb * sl * bd) - ie * (sa * cl * ed)
            + (r(ca * cb * cl) + e * (sa * sl)) * ld,
        r(cb * sl * bd + sb * cl * ld),
        (r(ca * cb * sl) - e * (sa * cl)) * ad + r(-sa * sb * sl * bd) + ie * (ca * cl * ed)
            + (r(sa * cb * cl) - e * (ca * sl)) * ld,
    );
    let zero = StateVector::new(
        r(-sa * sb * ad + ca * cb * bd),
        r(sb * bd),
        r(ca * sb * ad + sa * cb * bd),
    );
    Eigenvectors { plus, minus, zero }
}

/// The Hamiltonian that keeps the invariant of `aux` dynamically invariant,
/// assembled directly from the inverse-engineering relations. Couplings are
/// the products `Ω cos(ω t)`, so no carrier frequency is needed.
pub fn hamiltonian_from_aux(aux: &AuxParams) -> Matrix3 {
    let (pump, stokes, diag_p, diag_s) = inverse_engineered(aux);
    let zero = r(0.0);
    Matrix3([
        [r(-diag_p), pump, zero],
        [pump.conj(), zero, stokes.conj()],
        [zero, stokes, r(-diag_s)],
    ])
}

/// `(Ω_p cos ω_p t, Ω_s cos ω_s t, ω_p + Δ_p, ω_s + Δ_s)` from the auxiliary
/// parameters.
pub(crate) fn inverse_engineered(aux: &AuxParams) -> (C64, C64, f64, f64) {
    let (sa, ca) = (sin(aux.alpha), cos(aux.alpha));
    let (sb, cb) = (sin(aux.beta), cos(aux.beta));
    let se = sin(aux.epsilon);
    let s2a = sin(2.0 * aux.alpha);
    let s2b = sin(2.0 * aux.beta);
    let e_neg = C64::from_polar(1.0, -aux.epsilon);
    let (bd, ed, ld, thd) = (aux.beta_dot, aux.epsilon_dot, aux.lambda_dot, aux.theta_dot);

    let common = c(thd * s2b, -2.0 * bd) * 0.5;
    let pump = C64::i() * e_neg * (ld * sa * sb) + common * ca;
    let stokes = -C64::i() * e_neg * (ld * ca * sb) + common * sa;
    let diag_p = -ed * sa * sa + thd * (ca * ca * sb * sb - cb * cb) - ld * se * s2a * cb;
    let diag_s = -ed * ca * ca + thd * (sa * sa * sb * sb - cb * cb) + ld * se * s2a * cb;
    (pump, stokes, diag_p, diag_s)
}

/// `θ̇ = −(ε̇ + 2λ̇ sin ε cos β cot 2α) / sin² β`, the rate of the parameter
/// `θ` entering the inverse-engineered couplings.
pub fn lr_phase_rate(aux: &AuxParams) -> Result<f64> {
    aux.check()?;
    let sb = sin(aux.beta);
    let s2a = sin(2.0 * aux.alpha);
    let lambda_term = if aux.lambda_dot == 0.0 {
        0.0
    } else {
        if s2a.abs() < 1e-12 {
            return Err(Error::Singularity { what: "cot 2α in the phase rate", t: aux.alpha });
        }
        2.0 * aux.lambda_dot * sin(aux.epsilon) * cos(aux.beta) * cos(2.0 * aux.alpha) / s2a
    };
    let numerator = aux.epsilon_dot + lambda_term;
    if sb.abs() < 1e-12 {
        if numerator == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Singularity { what: "1/sin²β in the phase rate", t: aux.beta });
    }
    Ok(-numerator / (sb * sb))
}

/// Exact Lewis-Riesenfeld phase rates `⟨φ_k|i∂_t − H|φ_k⟩` for
/// `(φ₊, φ₋, φ₀)`, with `H` the inverse-engineered Hamiltonian of `aux`.
pub fn lr_phase_rates(aux: &AuxParams) -> Result<[f64; 3]> {
    aux.check()?;
    let phis = eigenvectors(aux).as_array();
    let rates = eigenvector_rates(aux).as_array();
    let h = hamiltonian_from_aux(aux);
    let mut out = [0.0; 3];
    for k in 0..3 {
        let v = C64::i() * phis[k].inner(&rates[k]) - h.expectation(&phis[k]);
        out[k] = v.re;
    }
    Ok(out)
}

/// Finite-difference estimate of `⟨φ_k|i∂_t − H|φ_k⟩` where `H` comes from
/// `drive` and `φ_k` from `traj`.
pub fn measured_lr_phase_rates<D, T>(drive: &D, traj: &T, t: f64, h: f64) -> Result<[f64; 3]>
where
    D: Drive + ?Sized,
    T: AuxiliaryTrajectory + ?Sized,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive"));
    }
    let ham = hamiltonian_at(drive, t)?;
    let now = eigenvectors(&traj.at(t)?).as_array();
    let fwd = eigenvectors(&traj.at(t + h)?).as_array();
    let bwd = eigenvectors(&traj.at(t - h)?).as_array();
    let mut out = [0.0; 3];
    for k in 0..3 {
        let deriv = (fwd[k] - bwd[k]) * (0.5 / h);
        let v = C64::i() * now[k].inner(&deriv) - ham.expectation(&now[k]);
        out[k] = v.re;
    }
    Ok(out)
}

/// Frobenius norm of `i·İ(t) − [H(t), I(t)]`, with `İ` from the central
/// difference at step `h`.
pub fn invariance_residual<D, T>(drive: &D, traj: &T, t: f64, h: f64) -> Result<f64>
where
    D: Drive + ?Sized,
    T: AuxiliaryTrajectory + ?Sized,
{
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive"));
    }
    check_domain(t - h, traj.domain())?;
    check_domain(t + h, traj.domain())?;
    let ham = hamiltonian_at(drive, t)?;
    let inv = invariant_at(&traj.at(t)?)?;
    let fwd = invariant_at(&traj.at(t + h)?)?;
    let bwd = invariant_at(&traj.at(t - h)?)?;
    let dot = (fwd - bwd) * (0.5 / h);
    Ok((dot.scale(C64::i()) - ham.commutator(&inv)).frobenius_norm())
}

const NORMALIZATION_TOL: f64 = 1e-10;

fn check_normalized(psi: &StateVector) -> Result<()> {
    if !psi.is_finite() || (psi.norm_sqr() - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidArgument("initial state must be normalized"));
    }
    Ok(())
}

/// Lewis-Riesenfeld prediction `ψ(t) = Σ_k C_k e^{iΘ_k(t)} φ_k(t)` with
/// `C_k = ⟨φ_k(t₀)|ψ₀⟩` and `Θ_k` the trajectory's LR phases.
pub fn analytic_evolution<T>(traj: &T, psi0: &StateVector, t: f64) -> Result<StateVector>
where
    T: AuxiliaryTrajectory + ?Sized,
{
    check_normalized(psi0)?;
    let (start, _) = traj.domain();
    check_domain(t, traj.domain())?;
    if t == start {
        return Ok(*psi0);
    }
    let initial = eigenvectors(&traj.at(start)?).as_array();
    let now = eigenvectors(&traj.at(t)?).as_array();
    let phases = traj.lr_phases(t)?;
    let mut psi = StateVector::zero();
    for k in 0..3 {
        let coeff = initial[k].inner(psi0) * C64::from_polar(1.0, phases[k]);
        psi = psi + now[k].scale(coeff);
    }
    Ok(psi)
}

/// `C₊φ₊(t) + C₋φ₋(t) + e^{iθ(t)} C₀φ₀(t)`: the expansion in the gauge
/// where `φ±` carry no phase and `φ₀` carries `θ`.
///
/// Equals [`analytic_evolution`] up to a global phase whenever
/// `Θ₊ = Θ₋ = Θ₀ − θ`, which holds on the strategy family.
pub fn reduced_lr_expansion<T>(traj: &T, psi0: &StateVector, t: f64) -> Result<StateVector>
where
    T: AuxiliaryTrajectory + ?Sized,
{
    check_normalized(psi0)?;
    let (start, _) = traj.domain();
    check_domain(t, traj.domain())?;
    let initial = eigenvectors(&traj.at(start)?).as_array();
    let aux = traj.at(t)?;
    let now = eigenvectors(&aux);
    let c_plus = initial[0].inner(psi0);
    let c_minus = initial[1].inner(psi0);
    let c_zero = initial[2].inner(psi0) * C64::from_polar(1.0, aux.theta);
    Ok(now.plus.scale(c_plus) + now.minus.scale(c_minus) + now.zero.scale(c_zero))
}

/// Final state for `β(0) = β(T) = 0`, `λ = 0`, `ψ₀ = |1⟩`:
/// `(cos²α + e^{iε} sin²α, 0, (1 − e^{iε}) sin α cos α)`.
pub fn final_state_prediction(alpha: f64, epsilon_t: f64) -> StateVector {
    let (sa, ca) = (sin(alpha), cos(alpha));
    let e = C64::from_polar(1.0, epsilon_t);
    StateVector::new(r(ca * ca) + e * (sa * sa), r(0.0), (r(1.0) - e) * (sa * ca))
}
