//! Sums `sum_{m in Z^d, m != 0} phi(|m|^2)` for slowly decaying `phi`.
//!
//! The summand is split with the window `w(r) = erfc((r - R)/sigma)/2`.
//! The inner part `phi w` is summed exactly over lattice shells. The outer
//! part `phi (1 - w)` is smooth on the scale `sigma`, so by Poisson summation
//! its lattice sum equals its integral up to `O(exp(-(pi sigma)^2))`, and the
//! integral is done radially.

use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::erf::erfc;

use crate::numeric::{integrate, KahanSum, Quadrature};

/// Window centre.
pub const WINDOW_RADIUS: f64 = 24.0;
/// Window width.
pub const WINDOW_WIDTH: f64 = 2.0;
/// Shells beyond `R + 7 sigma` carry weight below `1e-22` and are dropped.
const SHELL_RADIUS: f64 = WINDOW_RADIUS + 7.0 * WINDOW_WIDTH;
/// The radial integral starts at `R/2`, where `1 - w < 1e-17`.
const INTEGRAL_START: f64 = 0.5 * WINDOW_RADIUS;
/// Beyond `R + 10 sigma` the window is exactly zero in double precision.
const TAIL_START: f64 = WINDOW_RADIUS + 10.0 * WINDOW_WIDTH;

fn window(r: f64) -> f64 {
    0.5 * erfc((r - WINDOW_RADIUS) / WINDOW_WIDTH)
}

fn one_minus_window(r: f64) -> f64 {
    0.5 * erfc((WINDOW_RADIUS - r) / WINDOW_WIDTH)
}

/// Number of `m in Z^dim` with `|m|^2 = n`, for `n <= max_norm`.
pub(crate) fn shell_counts(dim: u32, max_norm: usize) -> Vec<u64> {
    let mut line = vec![0u64; max_norm + 1];
    line[0] = 1;
    let mut k = 1usize;
    while k * k <= max_norm {
        line[k * k] = 2;
        k += 1;
    }
    let mut acc = vec![0u64; max_norm + 1];
    acc[0] = 1;
    for _ in 0..dim {
        let mut next = vec![0u64; max_norm + 1];
        for (a, &ca) in acc.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in line.iter().enumerate().take(max_norm + 1 - a) {
                if cb != 0 {
                    next[a + b] += ca * cb;
                }
            }
        }
        acc = next;
    }
    acc
}

fn cached_shells(dim: u32) -> &'static [u64] {
    static CACHE: [OnceLock<Vec<u64>>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let max_norm = (SHELL_RADIUS * SHELL_RADIUS).ceil() as usize;
    CACHE[(dim - 1) as usize].get_or_init(|| shell_counts(dim, max_norm))
}

/// Surface area of the unit sphere in `R^dim`.
pub(crate) fn sphere_area(dim: u32) -> f64 {
    // 2 pi^{d/2} / Gamma(d/2) with Gamma at integer or half-integer points.
    let half = dim as f64 / 2.0;
    let mut gamma = if dim.is_multiple_of(2) {
        1.0
    } else {
        PI.sqrt()
    };
    let mut x = if dim.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < half {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half) / gamma
}

/// Value of a windowed lattice sum and its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct SmoothSum {
    pub value: f64,
    pub error: f64,
}

/// `sum_{m != 0} phi(|m|^2)` over `Z^dim`, `dim` in 1..=4.
///
/// `phi` must be finite at every nonzero lattice point and its radial
/// integral `int r^{dim-1} phi(r^2) dr` must converge at infinity.
pub fn lattice_sum<F: Fn(f64) -> f64>(dim: u32, phi: F) -> SmoothSum {
    assert!((1..=4).contains(&dim), "lattice_sum supports dim 1..=4");
    let shells = cached_shells(dim);
    let mut inner = KahanSum::default();
    for (n, &count) in shells.iter().enumerate().skip(1).rev() {
        if count == 0 {
            continue;
        }
        let r = (n as f64).sqrt();
        inner.add(count as f64 * phi(n as f64) * window(r));
    }
    let area = sphere_area(dim);
    let radial = |r: f64| r.powi(dim as i32 - 1) * phi(r * r);
    let body: Quadrature = integrate(
        |r| radial(r) * one_minus_window(r),
        INTEGRAL_START,
        TAIL_START,
        1e-17,
        1e-14,
    );
    // r = T/u maps (T, inf) onto (0, 1).
    let tail: Quadrature = integrate(
        |u| {
            let r = TAIL_START / u;
            radial(r) * TAIL_START / (u * u)
        },
        0.0,
        1.0,
        1e-17,
        1e-14,
    );
    let outer = area * (body.value + tail.value);
    let value = inner.value() + outer;
    let poisson = (-(PI * WINDOW_WIDTH).powi(2)).exp() * outer.abs();
    let error = area * (body.error + tail.error) + poisson + 4.0 * f64::EPSILON * value.abs();
    SmoothSum { value, error }
}
