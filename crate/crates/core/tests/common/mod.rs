//! Brute-force oracles shared by the integration tests. Deliberately
//! independent of the library's quadrature and root finder.
#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

/// Trapezoid rule on `n` uniform intervals.
pub fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// Plain bisection for an increasing `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    assert!(f(lo) < 0.0 && f(hi) > 0.0, "oracle bracket does not straddle the root");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn smooth_epsilon(a: f64, x: f64, n: usize) -> f64 {
    trapezoid(
        |u| {
            let beta = 0.5 * a * (1.0 - (2.0 * PI * u / x).cos()) * u.cos().powi(2);
            beta.sin().powi(2)
        },
        0.0,
        x,
        n,
    )
}

pub fn flat_epsilon(b: f64, x: f64, n: usize) -> f64 {
    trapezoid(|u| (0.5 * b * (1.0 - (2.0 * PI * u / x).cos())).sin().powi(2), 0.0, x, n)
}

/// `Δε` per carrier period for strategy C using the arcsine form of `β`.
pub fn reverse_delta_epsilon(k: f64, n: usize) -> f64 {
    trapezoid(
        |u| {
            let beta = -0.5 * (2.0 * SQRT_2 * k * u.cos().powi(4)).asin();
            beta.sin().powi(2)
        },
        0.5 * PI,
        2.5 * PI,
        n,
    )
}

/// `ωT/π` solving `ε = π` for the smooth profile, scanning a coarse grid for
/// the first sign change before bisecting.
pub fn oracle_omega_t_a(a: f64) -> f64 {
    let g = |x: f64| smooth_epsilon(a, x, grid_for(x)) - PI;
    first_root(g) / PI
}

pub fn oracle_omega_t_b(b: f64) -> f64 {
    let g = |x: f64| flat_epsilon(b, x, grid_for(x)) - PI;
    first_root(g) / PI
}

pub fn oracle_reverse_ratio(target: f64) -> f64 {
    bisect(|k| reverse_delta_epsilon(k, 100_000) - target, 0.0, 0.35355, 1e-9)
}

fn grid_for(x: f64) -> usize {
    ((x / (2.0 * PI)).ceil() as usize * 2000).max(20_000)
}

fn first_root(g: impl Fn(f64) -> f64) -> f64 {
    let mut x = PI;
    while g(x + PI) < 0.0 {
        x += PI;
        assert!(x < 1000.0 * PI, "oracle found no root");
    }
    bisect(g, x, x + PI, 1e-8)
}
