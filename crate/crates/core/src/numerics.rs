//! Scalar kernels: bracketed bisection, composite Simpson quadrature with
//! panel doubling, and the central-difference stencil.

use core::ops::{Mul, Sub};

use crate::{Error, Result};

/// An interval `[lo, hi]` expected to contain a sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidArgument("bracket requires finite lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Outcome of [`find_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `f(x)` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

const MAX_BISECTIONS: usize = 200;

/// Bisection on `bracket` until its width drops to `tol` or `f` hits zero.
pub fn find_root<F>(mut f: F, bracket: Bracket, tol: f64) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("root tolerance must be positive"));
    }
    let Bracket { mut lo, mut hi } = bracket;
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo.is_finite() && f_hi.is_finite()) {
        return Err(Error::NonFinite { t: if f_lo.is_finite() { hi } else { lo } });
    }
    if f_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidArgument("bracket endpoints have the same sign"));
    }
    for it in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if !f_mid.is_finite() {
            return Err(Error::NonFinite { t: mid });
        }
        if f_mid == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, iterations: it });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            let x = 0.5 * (lo + hi);
            return Ok(Root { x, residual: f(x), iterations: it });
        }
    }
    Err(Error::NonConvergence { what: "bisection", iterations: MAX_BISECTIONS })
}

/// Walks the ladder `start·2^k` until `f` changes sign between neighbours.
///
/// Meant for increasing `f`: doubles upward while `f < 0`, or halves
/// downward when `f(start)` is already non-negative.
pub fn bracket_by_doubling<F>(mut f: F, start: f64, max_steps: usize) -> Result<Bracket>
where
    F: FnMut(f64) -> f64,
{
    if !(start > 0.0) {
        return Err(Error::InvalidArgument("doubling search needs a positive start"));
    }
    let mut x = start;
    if f(x) < 0.0 {
        for _ in 0..max_steps {
            let next = 2.0 * x;
            if f(next) >= 0.0 {
                return Bracket::new(x, next);
            }
            x = next;
        }
    } else {
        for _ in 0..max_steps {
            let prev = 0.5 * x;
            if f(prev) < 0.0 {
                return Bracket::new(prev, x);
            }
            x = prev;
        }
    }
    Err(Error::Calibration("no sign change found along the doubling ladder"))
}

/// Settings for [`integrate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Stop once two successive Simpson estimates differ by less than this.
    pub abs_tol: f64,
    /// Panel count of the first estimate (rounded up to even).
    pub min_panels: usize,
    /// Give up beyond this many panels.
    pub max_panels: usize,
}

pub const MAX_PANELS: usize = 1 << 20;

impl Quadrature {
    pub fn new(abs_tol: f64) -> Self {
        Self { abs_tol, min_panels: 64, max_panels: MAX_PANELS }
    }

    pub fn min_panels(mut self, n: usize) -> Self {
        self.min_panels = n;
        self
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Difference between the last two estimates.
    pub change: f64,
    pub panels: usize,
}

/// Composite Simpson over `[a, b]`, doubling the panel count until
/// successive estimates agree to `abs_tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_with(f, a, b, &Quadrature::new(abs_tol)).map(|i| i.value)
}

pub fn integrate_with<F>(mut f: F, a: f64, b: f64, q: &Quadrature) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    if !(q.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("quadrature tolerance must be positive"));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("quadrature limits must be finite"));
    }
    if a == b {
        return Ok(Integral { value: 0.0, change: 0.0, panels: 0 });
    }
    let mut n = q.min_panels.max(2);
    n += n % 2;
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { t: x })
        }
    };

    let ends = eval(a)? + eval(b)?;
    let mut h = (b - a) / n as f64;
    let (mut odd, mut even) = (0.0, 0.0);
    for k in 1..n {
        let y = eval(a + k as f64 * h)?;
        if k % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    let mut estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);

    while 2 * n <= q.max_panels.max(2) {
        let mut mids = 0.0;
        for k in 0..n {
            mids += eval(a + (k as f64 + 0.5) * h)?;
        }
        n *= 2;
        h *= 0.5;
        even += odd;
        odd = mids;
        let refined = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        let change = (refined - estimate).abs();
        estimate = refined;
        if change < q.abs_tol {
            return Ok(Integral { value: refined, change, panels: n });
        }
    }
    Err(Error::NonConvergence { what: "composite Simpson quadrature", iterations: n })
}

/// Second-order central difference `(f(t+h) − f(t−h)) / 2h`.
pub fn central_diff<T, F>(mut f: F, t: f64, h: f64) -> T
where
    T: Sub<Output = T> + Mul<f64, Output = T>,
    F: FnMut(f64) -> T,
{
    let fwd = f(t + h);
    let bwd = f(t - h);
    (fwd - bwd) * (0.5 / h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn linear_root() {
        let r = find_root(|x| x - 1.0, Bracket::new(0.0, 2.0).unwrap(), 1e-12).unwrap();
        assert_eq!(r.x, 1.0);
    }

    #[test]
    fn cosine_root_is_half_pi() {
        let r = find_root(libm::cos, Bracket::new(1.0, 2.0).unwrap(), 1e-13).unwrap();
        assert!((r.x - PI / 2.0).abs() < 1e-13);
        assert!(r.residual.abs() < 1e-12);
    }

    #[test]
    fn same_sign_bracket_is_rejected() {
        let err = find_root(|x| x * x + 1.0, Bracket::new(-1.0, 1.0).unwrap(), 1e-9);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        assert!(Bracket::new(2.0, 1.0).is_err());
    }

    #[test]
    fn bisection_budget_exhaustion() {
        // width 2e300 cannot shrink to 1e-300 in 200 halvings
        let err = find_root(|x| x - 0.3, Bracket::new(-1e300, 1e300).unwrap(), 1e-300);
        assert!(matches!(err, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn doubling_finds_first_crossing() {
        let b = bracket_by_doubling(|x| x - 10.0, 1.0, 20).unwrap();
        assert_eq!((b.lo, b.hi), (8.0, 16.0));
        let b = bracket_by_doubling(|x| x - 0.3, 1.0, 20).unwrap();
        assert_eq!((b.lo, b.hi), (0.25, 0.5));
        assert!(bracket_by_doubling(|_| -1.0, 1.0, 10).is_err());
    }

    #[test]
    fn sine_integral() {
        let v = integrate(libm::sin, 0.0, PI, 1e-9).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_integrand() {
        assert_eq!(integrate(|_| 0.0, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        assert_eq!(integrate(|x| x, 3.0, 3.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let fwd = integrate(libm::exp, 0.0, 1.0, 1e-12).unwrap();
        let rev = integrate(libm::exp, 1.0, 0.0, 1e-12).unwrap();
        assert!((fwd + rev).abs() < 1e-12);
    }

    #[test]
    fn panel_cap_reports_non_convergence() {
        let q = Quadrature { abs_tol: 1e-300, min_panels: 2, max_panels: 64 };
        let err = integrate_with(libm::exp, 0.0, 1.0, &q);
        assert!(matches!(err, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-6);
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn simpson_error_shrinks_sixteenfold() {
        let exact = libm::exp(1.0) - 1.0;
        let err = |n: usize| {
            let q = Quadrature { abs_tol: f64::INFINITY, min_panels: n / 2, max_panels: n };
            (integrate_with(libm::exp, 0.0, 1.0, &q).unwrap().value - exact).abs()
        };
        let ratio = err(16) / err(32);
        assert!((ratio - 16.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn central_diff_cases() {
        assert_eq!(central_diff(|_| 5.0, 1.0, 1e-3), 0.0);
        assert_eq!(central_diff(|t| t * t, 3.0, 0.5), 6.0);
    }

    #[test]
    fn central_diff_slope_is_two() {
        let exact = libm::cos(0.7);
        let err = |h: f64| (central_diff(libm::sin, 0.7, h) - exact).abs();
        let slope = libm::log2(err(1e-2) / err(5e-3));
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    proptest! {
        #[test]
        fn root_residual_bound(root in -0.9f64..0.9, scale in 0.1f64..10.0, cubic in 0.0f64..3.0) {
            let f = |x: f64| scale * ((x - root) + cubic * (x - root).powi(3));
            let tol = 1e-10;
            let r = find_root(f, Bracket::new(-1.0, 1.0).unwrap(), tol).unwrap();
            let bound = 10.0 * tol * (f(-1.0).abs() + f(1.0).abs());
            prop_assert!(r.residual.abs() <= bound);
            prop_assert!((r.x - root).abs() <= tol);
        }
    }
}
