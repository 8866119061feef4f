//! Constants of the lattice analysis.
//!
//! * `I_{j,d} = (2d)^{-j}/(j-1)! int_0^inf a^{j-1} [e^{-a/d} I_0(a/d)]^d da`,
//!   the infinite-lattice limit of the Brillouin sums.
//! * `S_{j,d}(L) = (1/N) sum_{k != 0} E(k)^{-j}` on the `L^d` torus.
//! * `c_{j,d} = (2 pi)^{-2j} sum_{m != 0} (m^2)^{-j}`.
//! * `A`, the constant term of `S_{1,2} - ln N / 4 pi`.
//! * `G_d(x) = (1/4 pi^2) (sum_{m != 0} x / (m^2 (m^2 - x)) - 1/x)` for
//!   `d = 2, 3`, and its negative root `x_0` of `G_d(x) = a`.

mod bessel;
mod smooth_sum;

pub use bessel::{scaled_bessel_i0, SERIES_CROSSOVER};
pub use smooth_sum::{lattice_sum, SmoothSum, WINDOW_RADIUS, WINDOW_WIDTH};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ring_levels, Level};
use crate::numeric::{integrate, linear_fit, KahanSum};

/// A computed constant and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Upper quadrature limit for `I_{j,d}` in units of `d`; beyond it the
/// integrand is replaced by its asymptotic series.
const I_CUTOFF_PER_DIM: f64 = 60.0;
/// Terms kept in the asymptotic tail of `I_{j,d}`.
const I_TAIL_TERMS: usize = 14;

/// `I_{j,d}` by quadrature of the scaled Bessel form plus an analytic tail.
pub fn integral_i(j: u32, d: u32) -> Result<Estimate> {
    if j == 0 || d <= 2 * j {
        return Err(Error::DivergentIntegral { j, d });
    }
    let df = d as f64;
    let integrand = |a: f64| a.powi(j as i32 - 1) * scaled_bessel_i0(a / df).powi(d as i32);
    let cutoff = I_CUTOFF_PER_DIM * df;

    // Geometric panels resolve the algebraic decay evenly.
    let mut body = KahanSum::default();
    let mut body_err = 0.0;
    let mut lo = 0.0;
    let mut hi: f64 = 1.0;
    while lo < cutoff {
        let top = hi.min(cutoff);
        let q = integrate(integrand, lo, top, 1e-18, 1e-14);
        body.add(q.value);
        body_err += q.error;
        lo = top;
        hi = top * 4.0;
    }

    // [e^{-u} I_0(u)]^d = (2 pi u)^{-d/2} (sum_k a_k u^{-k})^d with u = a/d,
    // integrated termwise over (cutoff, inf).
    let a = bessel::asymptotic_coefficients(I_TAIL_TERMS);
    let mut b = vec![0.0; I_TAIL_TERMS];
    b[0] = 1.0;
    for _ in 0..d {
        let mut next = vec![0.0; I_TAIL_TERMS];
        for (p, &bp) in b.iter().enumerate() {
            for (q, &aq) in a.iter().enumerate().take(I_TAIL_TERMS - p) {
                next[p + q] += bp * aq;
            }
        }
        b = next;
    }
    let prefactor = (2.0 * PI / df).powf(-0.5 * df);
    let mut tail = KahanSum::default();
    let mut last = 0.0;
    for (k, &bk) in b.iter().enumerate() {
        let power = j as f64 - 1.0 - 0.5 * df - k as f64;
        last = prefactor * bk * df.powi(k as i32) * cutoff.powf(power + 1.0) / -(power + 1.0);
        tail.add(last);
    }

    let factorial: f64 = (1..j).map(|v| v as f64).product();
    let scale = (2.0 * df).powi(-(j as i32)) / factorial;
    let value = scale * (body.value() + tail.value());
    let error = scale * (body_err + last.abs()) + 4.0 * f64::EPSILON * value;
    Ok(Estimate { value, error })
}

/// `S_{j,d}` on the torus of side `L`: the exact finite Brillouin sum.
pub fn finite_sum_s(j: u32, d: u32, side: usize) -> Result<f64> {
    if side < 2 {
        return Err(Error::SideTooSmall(side));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let ring = ring_levels(side, 1e-12);
    let mut acc = KahanSum::default();
    accumulate(&ring, d, 0.0, 1, j as i32, &mut acc);
    Ok(acc.value() / (side as f64).powi(d as i32))
}

fn accumulate(ring: &[Level], dims_left: u32, energy: f64, mult: u64, j: i32, acc: &mut KahanSum) {
    if dims_left == 0 {
        if energy > 0.0 {
            acc.add(mult as f64 / energy.powi(j));
        }
        return;
    }
    for level in ring {
        accumulate(
            ring,
            dims_left - 1,
            energy + level.energy,
            mult * level.multiplicity,
            j,
            acc,
        );
    }
}

/// Finite-`L` estimate of `I_{j,d}`; requires `d > 2j` and `L >= 4`.
pub fn integral_i_bruteforce(j: u32, d: u32, side: usize) -> Result<f64> {
    if j == 0 || d <= 2 * j {
        return Err(Error::DivergentIntegral { j, d });
    }
    if side < 4 {
        return Err(Error::InvalidParameter(format!(
            "brute-force estimate needs L >= 4, got {side}"
        )));
    }
    finite_sum_s(j, d, side)
}

/// `c_{j,d}`; requires `2j > d` and `d <= 4`.
pub fn lattice_sum_c(j: u32, d: u32) -> Result<Estimate> {
    if 2 * j <= d {
        return Err(Error::DivergentLatticeSum { j, d });
    }
    if d == 0 || d > 4 {
        return Err(Error::InvalidParameter(format!(
            "lattice sums implemented for 1 <= d <= 4, got {d}"
        )));
    }
    let s = lattice_sum(d, |n| n.powi(-(j as i32)));
    let scale = (2.0 * PI).powi(-2 * j as i32);
    Ok(Estimate {
        value: scale * s.value,
        error: scale * s.error,
    })
}

/// Lattice sides used for the `A` fit.
pub const D2_INTERCEPT_SIDES: [usize; 4] = [64, 128, 256, 512];

/// Least-squares fit of `S_{1,2}(N) - ln N / 4 pi = A + B / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterceptFit {
    pub intercept: f64,
    pub slope: f64,
    pub sides: Vec<usize>,
    /// `S_{1,2} - ln N / 4 pi` at each side.
    pub shifted_sums: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn d2_intercept_fit() -> Result<InterceptFit> {
    let sides = D2_INTERCEPT_SIDES.to_vec();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &side in &sides {
        let n = (side * side) as f64;
        x.push(1.0 / n);
        y.push(finite_sum_s(1, 2, side)? - n.ln() / (4.0 * PI));
    }
    let (intercept, slope) = linear_fit(&x, &y);
    let residuals = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| yi - intercept - slope * xi)
        .collect();
    Ok(InterceptFit {
        intercept,
        slope,
        sides,
        shifted_sums: y,
        residuals,
    })
}

/// `A`, with the error taken as the distance between the fit and the largest lattice.
pub fn d2_intercept() -> Result<Estimate> {
    let fit = d2_intercept_fit()?;
    let last = *fit.shifted_sums.last().expect("non-empty");
    let spread = fit.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    Ok(Estimate {
        value: fit.intercept,
        error: (fit.intercept - last).abs().max(spread).max(f64::EPSILON),
    })
}

fn check_g_dim(dim: u32) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "G is defined for dim 2 or 3, got {dim}"
        )))
    }
}

/// `G_dim(x)` with its error estimate, for `x < 0`.
pub fn g_function_estimate(x: f64, dim: u32) -> Result<Estimate> {
    check_g_dim(dim)?;
    if !(x < 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "G is evaluated only for finite x < 0, got {x}"
        )));
    }
    let s = lattice_sum(dim, |n| x / (n * (n - x)));
    let scale = 1.0 / (4.0 * PI * PI);
    Ok(Estimate {
        value: scale * (s.value - 1.0 / x),
        error: scale * s.error,
    })
}

/// `G_dim(x)` for `x < 0`, `dim` in {2, 3}.
pub fn g_function(x: f64, dim: u32) -> Result<f64> {
    Ok(g_function_estimate(x, dim)?.value)
}

/// Residual tolerance on `G(x_0) = a`.
pub const X0_TOLERANCE: f64 = 1e-10;
/// Bracket expansion stops at these magnitudes.
const X0_MAX_MAGNITUDE: f64 = 1e12;
const X0_MIN_MAGNITUDE: f64 = 1e-12;

/// The negative root of `G_dim(x) = a`.
pub fn solve_x0(a: f64, dim: u32) -> Result<f64> {
    check_g_dim(dim)?;
    if !a.is_finite() {
        return Err(Error::NoRoot { dim, target: a });
    }
    let g = |x: f64| g_function(x, dim);
    // G increases from -inf at x -> -inf to +inf at x -> 0-.
    let mut hi = -1.0;
    while g(hi)? <= a {
        hi *= 0.5;
        if -hi < X0_MIN_MAGNITUDE {
            return Err(Error::NoRoot { dim, target: a });
        }
    }
    let mut lo = -1.0;
    while g(lo)? >= a {
        lo *= 2.0;
        if -lo > X0_MAX_MAGNITUDE {
            return Err(Error::NoRoot { dim, target: a });
        }
    }
    for _ in 0..400 {
        // Both ends are negative, so the geometric midpoint is well defined.
        let mid = -((lo * hi).sqrt());
        let mid = if mid <= lo || mid >= hi {
            0.5 * (lo + hi)
        } else {
            mid
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == a {
            return Ok(mid);
        }
        if gm < a {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    let (glo, ghi) = (g(lo)?, g(hi)?);
    let x0 = if (glo - a).abs() <= (ghi - a).abs() {
        lo
    } else {
        hi
    };
    let residual = (g(x0)? - a).abs();
    if residual > X0_TOLERANCE {
        return Err(Error::NoRoot { dim, target: a });
    }
    Ok(x0)
}

/// Kind of entry in a [`ConstantTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantKind {
    I,
    C,
    S,
    AIntercept,
    X0,
}

impl ConstantKind {
    pub fn label(self) -> &'static str {
        match self {
            ConstantKind::I => "I",
            ConstantKind::C => "c",
            ConstantKind::S => "S",
            ConstantKind::AIntercept => "A",
            ConstantKind::X0 => "x0",
        }
    }
}

/// One constant with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub kind: ConstantKind,
    pub j: Option<u32>,
    pub d: Option<u32>,
    pub n: Option<u64>,
    pub a: Option<f64>,
    pub value: f64,
    pub error_estimate: f64,
    pub method: String,
    pub truncation: String,
}

/// Collection of computed constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantTable {
    pub entries: Vec<ConstantEntry>,
}

/// `(j, d)` pairs with convergent `I_{j,d}` listed in the standard table.
pub const STANDARD_I: [(u32, u32); 14] = [
    (1, 3),
    (1, 4),
    (1, 5),
    (1, 6),
    (1, 7),
    (1, 8),
    (1, 9),
    (1, 10),
    (2, 5),
    (2, 6),
    (2, 7),
    (2, 8),
    (2, 9),
    (2, 10),
];

/// `(j, d, L)` finite sums included in the standard table.
pub const STANDARD_S: [(u32, u32, usize); 6] = [
    (1, 2, 32),
    (1, 3, 10),
    (1, 4, 6),
    (1, 5, 4),
    (2, 4, 6),
    (2, 5, 4),
];

impl ConstantTable {
    /// `I` integrals, `c_{2,d}` for `d = 1, 2, 3`, selected finite sums,
    /// `A`, and `x_0` at `a = 0` for `d = 2, 3`.
    pub fn standard() -> Result<Self> {
        let mut entries = Vec::new();
        for (j, d) in STANDARD_I {
            let e = integral_i(j, d)?;
            entries.push(ConstantEntry {
                kind: ConstantKind::I,
                j: Some(j),
                d: Some(d),
                n: None,
                a: None,
                value: e.value,
                error_estimate: e.error,
                method: "gauss-kronrod on scaled bessel form".into(),
                truncation: format!(
                    "quadrature to alpha = {}, asymptotic tail with {} terms",
                    I_CUTOFF_PER_DIM * d as f64,
                    I_TAIL_TERMS
                ),
            });
        }
        for d in 1..=3 {
            let e = lattice_sum_c(2, d)?;
            entries.push(ConstantEntry {
                kind: ConstantKind::C,
                j: Some(2),
                d: Some(d),
                n: None,
                a: None,
                value: e.value,
                error_estimate: e.error,
                method: "erfc-windowed shell sum plus radial integral".into(),
                truncation: window_description(),
            });
        }
        for (j, d, side) in STANDARD_S {
            let value = finite_sum_s(j, d, side)?;
            let n = (side as u64).pow(d);
            entries.push(ConstantEntry {
                kind: ConstantKind::S,
                j: Some(j),
                d: Some(d),
                n: Some(n),
                a: None,
                value,
                error_estimate: (n as f64) * f64::EPSILON * value,
                method: "exact momentum-grid sum".into(),
                truncation: "none".into(),
            });
        }
        let fit = d2_intercept()?;
        entries.push(ConstantEntry {
            kind: ConstantKind::AIntercept,
            j: Some(1),
            d: Some(2),
            n: None,
            a: None,
            value: fit.value,
            error_estimate: fit.error,
            method: "least squares in 1/N".into(),
            truncation: format!("L in {D2_INTERCEPT_SIDES:?}"),
        });
        for d in [2, 3] {
            let x0 = solve_x0(0.0, d)?;
            let slope = (g_function(x0 * (1.0 - 1e-6), d)? - g_function(x0 * (1.0 + 1e-6), d)?)
                / (2e-6 * x0.abs());
            let g_err = g_function_estimate(x0, d)?.error;
            entries.push(ConstantEntry {
                kind: ConstantKind::X0,
                j: None,
                d: Some(d),
                n: None,
                a: Some(0.0),
                value: x0,
                error_estimate: (X0_TOLERANCE + g_err) / slope.abs(),
                method: "geometric bisection on G".into(),
                truncation: window_description(),
            });
        }
        Ok(ConstantTable { entries })
    }

    pub fn get(
        &self,
        kind: ConstantKind,
        j: Option<u32>,
        d: Option<u32>,
    ) -> Option<&ConstantEntry> {
        self.entries
            .iter()
            .find(|e| e.kind == kind && e.j == j && e.d == d)
    }
}

fn window_description() -> String {
    format!("erfc window R = {WINDOW_RADIUS}, sigma = {WINDOW_WIDTH}")
}
