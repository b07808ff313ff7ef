//! Fixed-size complex linear algebra for the three-level problem.

use core::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Amplitudes on the basis `{|1⟩, |2⟩, |3⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub [C64; 3]);

impl StateVector {
    pub const fn new(c1: C64, c2: C64, c3: C64) -> Self {
        Self([c1, c2, c3])
    }

    /// Basis state `|k⟩` for `k` in `1..=3`.
    pub fn basis(k: usize) -> Self {
        assert!((1..=3).contains(&k), "basis index must be 1, 2 or 3");
        let mut v = [ZERO; 3];
        v[k - 1] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn zero() -> Self {
        Self([ZERO; 3])
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..3)
            .map(|k| (self.0[k] - other.0[k]).norm())
            .fold(0.0, f64::max)
    }

    /// Returns `self` multiplied by the unit phase that makes its component at
    /// the largest-magnitude index of `reference` share that component's phase.
    pub fn phase_aligned_to(&self, reference: &Self) -> Self {
        let k = (0..3)
            .max_by(|&a, &b| reference.0[a].norm().total_cmp(&reference.0[b].norm()))
            .unwrap_or(0);
        let ours = self.0[k];
        if ours.norm() == 0.0 || reference.0[k].norm() == 0.0 {
            return *self;
        }
        let rot = reference.0[k] / ours;
        self.scale(rot / rot.norm())
    }
}

impl Index<usize> for StateVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for StateVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for StateVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Mul<f64> for StateVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Dense 3×3 complex matrix, row-major. Hamiltonians and invariants are the
/// Hermitian instances; commutators of them are anti-Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3(pub [[C64; 3]; 3]);

impl Matrix3 {
    pub fn zero() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for k in 0..3 {
            m.0[k][k] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(d: [f64; 3]) -> Self {
        let mut m = Self::zero();
        for (k, x) in d.into_iter().enumerate() {
            m.0[k][k] = C64::new(x, 0.0);
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2];
        }
        StateVector(out)
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs) - rhs.matmul(self)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.0.iter().flatten().map(|x| x.norm_sqr()).sum())
    }

    /// `‖M − M†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).frobenius_norm()
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &StateVector) -> C64 {
        v.inner(&self.apply(v))
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for Matrix3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for Matrix3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul<f64> for Matrix3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }
}
