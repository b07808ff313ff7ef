//! Driving fields and the full (non-RWA) Hamiltonian they produce.

use crate::linalg::{Matrix3, C64};
use crate::{Error, Result};

/// Carrier angular frequencies of the pump and Stokes fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carriers {
    pub omega_p: f64,
    pub omega_s: f64,
}

impl Carriers {
    pub fn new(omega_p: f64, omega_s: f64) -> Result<Self> {
        if !(omega_p > 0.0 && omega_s > 0.0 && omega_p.is_finite() && omega_s.is_finite()) {
            return Err(Error::InvalidArgument("carrier frequencies must be positive"));
        }
        Ok(Self { omega_p, omega_s })
    }

    /// Both fields at the same frequency `omega`.
    pub fn equal(omega: f64) -> Result<Self> {
        Self::new(omega, omega)
    }

    pub fn fastest(&self) -> f64 {
        self.omega_p.max(self.omega_s)
    }
}

/// Envelopes and detunings at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    pub omega_p: C64,
    pub omega_s: C64,
    pub delta_p: f64,
    pub delta_s: f64,
}

impl DriveSample {
    pub const ZERO: Self = Self {
        omega_p: C64::new(0.0, 0.0),
        omega_s: C64::new(0.0, 0.0),
        delta_p: 0.0,
        delta_s: 0.0,
    };

    pub fn is_finite(&self) -> bool {
        self.omega_p.re.is_finite()
            && self.omega_p.im.is_finite()
            && self.omega_s.re.is_finite()
            && self.omega_s.im.is_finite()
            && self.delta_p.is_finite()
            && self.delta_s.is_finite()
    }
}

/// A pump/Stokes drive on a finite time domain.
pub trait Drive {
    fn carriers(&self) -> Carriers;

    fn domain(&self) -> (f64, f64);

    /// Envelopes and detunings at `t`. Callers check the domain.
    fn sample(&self, t: f64) -> Result<DriveSample>;
}

impl<D: Drive + ?Sized> Drive for &D {
    fn carriers(&self) -> Carriers {
        (**self).carriers()
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn sample(&self, t: f64) -> Result<DriveSample> {
        (**self).sample(t)
    }
}

/// Relative slack on domain checks, absorbing round-off in step accumulation.
pub(crate) const DOMAIN_SLACK: f64 = 1e-12;

pub(crate) fn check_domain(t: f64, (start, end): (f64, f64)) -> Result<()> {
    let slack = DOMAIN_SLACK * (end - start).abs().max(1.0);
    if t.is_nan() || t < start - slack || t > end + slack {
        return Err(Error::OutOfDomain { t, start, end });
    }
    Ok(())
}

/// The 3×3 Hamiltonian (ħ = 1) in the basis `{|1⟩, |2⟩, |3⟩}`:
///
/// ```text
/// ⎡ −ω_p−Δ_p        Ω_p cos ω_p t    0              ⎤
/// ⎢ Ω_p* cos ω_p t  0                Ω_s* cos ω_s t ⎥
/// ⎣ 0               Ω_s cos ω_s t    −ω_s−Δ_s       ⎦
/// ```
pub fn hamiltonian_at<D: Drive + ?Sized>(drive: &D, t: f64) -> Result<Matrix3> {
    check_domain(t, drive.domain())?;
    let s = drive.sample(t)?;
    Ok(hamiltonian_from_sample(drive.carriers(), &s, t))
}

pub(crate) fn hamiltonian_from_sample(c: Carriers, s: &DriveSample, t: f64) -> Matrix3 {
    let cp = libm::cos(c.omega_p * t);
    let cs = libm::cos(c.omega_s * t);
    let pump = s.omega_p * cp;
    let stokes = s.omega_s * cs;
    let zero = C64::new(0.0, 0.0);
    Matrix3([
        [C64::new(-c.omega_p - s.delta_p, 0.0), pump, zero],
        [pump.conj(), zero, stokes.conj()],
        [zero, stokes, C64::new(-c.omega_s - s.delta_s, 0.0)],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant {
        carriers: Carriers,
        sample: DriveSample,
    }

    impl Drive for Constant {
        fn carriers(&self) -> Carriers {
            self.carriers
        }
        fn domain(&self) -> (f64, f64) {
            (0.0, 10.0)
        }
        fn sample(&self, _t: f64) -> Result<DriveSample> {
            Ok(self.sample)
        }
    }

    #[test]
    fn zero_envelopes_give_bare_diagonal() {
        let d = Constant { carriers: Carriers::equal(3.0).unwrap(), sample: DriveSample::ZERO };
        let h = hamiltonian_at(&d, 1.7).unwrap();
        assert_eq!(h, Matrix3::from_diagonal([-3.0, 0.0, -3.0]));
    }

    #[test]
    fn nonzero_envelopes_are_hermitian() {
        let d = Constant {
            carriers: Carriers::new(2.0, 3.5).unwrap(),
            sample: DriveSample {
                omega_p: C64::new(0.3, -1.2),
                omega_s: C64::new(-0.7, 0.4),
                delta_p: 0.25,
                delta_s: -0.5,
            },
        };
        for t in [0.0, 0.3, 2.2, 9.9] {
            let h = hamiltonian_at(&d, t).unwrap();
            assert!(h.hermiticity_defect() <= 1e-12 * h.frobenius_norm());
            assert_eq!(h.0[0][2], C64::new(0.0, 0.0));
            assert_eq!(h.0[0][1], d.sample.omega_p * libm::cos(2.0 * t));
            assert_eq!(h.0[1][2], d.sample.omega_s.conj() * libm::cos(3.5 * t));
        }
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let d = Constant { carriers: Carriers::equal(1.0).unwrap(), sample: DriveSample::ZERO };
        assert!(matches!(hamiltonian_at(&d, 10.5), Err(Error::OutOfDomain { .. })));
        assert!(matches!(hamiltonian_at(&d, -0.1), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn carriers_must_be_positive() {
        assert!(Carriers::new(0.0, 1.0).is_err());
        assert!(Carriers::new(1.0, f64::NAN).is_err());
    }
}
