//! Rank-one eigenproblem for `H = -gamma L - |w><w|`.
//!
//! Eigenvalues of `H` that couple to the marked vertex are the roots of the
//! secular equation `F(E) = 1`, where
//!
//! ```text
//! F(E) = (1/N) sum_levels mult / (gamma * level - E)
//! ```
//!
//! `F` is strictly increasing between consecutive poles `gamma * level`, so each
//! open interval between poles holds exactly one root and one more root lies
//! below zero. Every `g`-fold level additionally contributes `g - 1`
//! eigenvectors orthogonal to `|w>`, which are counted but never built.
//!
//! Energies near a pole are represented as `pole + delta` with the pole
//! differences `gamma * (level_i - level_o)` computed directly, so that roots
//! hugging a pole keep full relative accuracy in `delta`.
//!
//! Tolerances (our choice, none are prescribed by the analysis): bisection
//! runs until the bracket on `delta` is narrower than `1e-13 * |delta|`,
//! followed by at most six safeguarded Newton steps; initial brackets start
//! `1e-12` of the pole gap inside each pole and move toward it by factors of
//! `1e3` while the sign condition fails.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LevelSpectrum;
use crate::numeric::KahanSum;

/// Relative bracket width at which bisection hands over to Newton.
pub const BISECTION_REL_WIDTH: f64 = 1e-13;
/// Relative offset of the first bracket end from a pole.
pub const POLE_OFFSET: f64 = 1e-12;
/// Bound on `|F(E_a) - 1|` relative to `1 + (1/N) sum mult/|gamma level - E_a|`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// One relevant eigenvalue of `H` with its spectral weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecularRoot {
    /// Eigenvalue `E_a`.
    pub energy: f64,
    /// `F'(E_a)`.
    pub secular_derivative: f64,
    /// `R_a = |<w|psi_a>|^2 = 1 / F'(E_a)`.
    pub w_overlap_sq: f64,
    /// `|<s|psi_a>|^2 = 1 / (N E_a^2 F'(E_a))`.
    pub s_overlap_sq: f64,
    /// `F(E_a) - 1` at the returned root.
    pub residual: f64,
    /// `(1/N) sum mult / |gamma level - E_a|`, the scale of `residual`.
    pub residual_scale: f64,
}

/// All eigenvalues of `H` with nonzero overlap on `|w>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecularSpectrum {
    pub gamma: f64,
    pub roots: Vec<SecularRoot>,
    pub num_vertices: usize,
    /// Number of eigenvectors of `H` orthogonal to `|w>`.
    pub irrelevant_count: u64,
}

impl SecularSpectrum {
    /// `sum_a 1 / (E_a F'(E_a))`, equal to `-1` for a complete root set.
    pub fn sum_rule(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| 1.0 / (r.energy * r.secular_derivative))
            .collect::<KahanSum>()
            .value()
    }

    pub fn total_w_weight(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.w_overlap_sq)
            .collect::<KahanSum>()
            .value()
    }

    pub fn total_s_weight(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.s_overlap_sq)
            .collect::<KahanSum>()
            .value()
    }

    pub fn ground(&self) -> &SecularRoot {
        &self.roots[0]
    }
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    f: f64,
    fp: f64,
    scale: f64,
}

/// Secular function of one level spectrum at one coupling.
#[derive(Debug, Clone)]
pub(crate) struct Secular<'a> {
    ls: &'a LevelSpectrum,
    gamma: f64,
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> Secular<'a> {
    pub(crate) fn new(ls: &'a LevelSpectrum, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        let n = ls.num_vertices() as f64;
        Ok(Secular {
            ls,
            gamma,
            energies: ls.levels().iter().map(|l| l.energy).collect(),
            weights: ls
                .levels()
                .iter()
                .map(|l| l.multiplicity as f64 / n)
                .collect(),
        })
    }

    fn pole(&self, i: usize) -> f64 {
        self.gamma * self.energies[i]
    }

    /// `gamma * level_i - E` for `E = pole(origin) + delta`.
    fn diff(&self, i: usize, origin: usize, delta: f64) -> f64 {
        self.gamma * (self.energies[i] - self.energies[origin]) - delta
    }

    /// Evaluates `F` and `F'` with terms accumulated in decreasing distance
    /// from `E`, i.e. smallest magnitude first.
    fn eval(&self, origin: usize, delta: f64) -> Eval {
        let n = self.energies.len();
        // First index whose pole lies above E.
        let (mut a, mut b) = (0usize, n);
        while a < b {
            let m = (a + b) / 2;
            if self.diff(m, origin, delta) > 0.0 {
                b = m;
            } else {
                a = m + 1;
            }
        }
        let split = a;
        let mut f = KahanSum::default();
        let mut fp = KahanSum::default();
        let mut scale = KahanSum::default();
        let mut push = |i: usize| {
            let d = self.diff(i, origin, delta);
            let t = self.weights[i] / d;
            f.add(t);
            fp.add(t / d);
            scale.add(t.abs());
        };
        let (mut lo, mut hi) = (0usize, n);
        while lo < split && hi > split {
            if self.diff(lo, origin, delta).abs() >= self.diff(hi - 1, origin, delta).abs() {
                push(lo);
                lo += 1;
            } else {
                push(hi - 1);
                hi -= 1;
            }
        }
        while lo < split {
            push(lo);
            lo += 1;
        }
        while hi > split {
            push(hi - 1);
            hi -= 1;
        }
        Eval {
            f: f.value(),
            fp: fp.value(),
            scale: scale.value(),
        }
    }

    /// Nearest pole to `energy` and the offset from it, rejecting pole hits.
    fn locate(&self, energy: f64) -> Result<(usize, f64)> {
        let mut best = 0;
        for i in 1..self.energies.len() {
            if (energy - self.pole(i)).abs() < (energy - self.pole(best)).abs() {
                best = i;
            }
        }
        let pole = self.pole(best);
        let delta = energy - pole;
        let guard = 4.0 * f64::EPSILON * energy.abs().max(pole.abs()).max(f64::MIN_POSITIVE);
        if delta.abs() <= guard {
            return Err(Error::PoleHit { energy, pole });
        }
        Ok((best, delta))
    }

    pub(crate) fn value(&self, energy: f64) -> Result<f64> {
        let (o, d) = self.locate(energy)?;
        Ok(self.eval(o, d).f)
    }

    pub(crate) fn derivative(&self, energy: f64) -> Result<f64> {
        let (o, d) = self.locate(energy)?;
        Ok(self.eval(o, d).fp)
    }

    /// Root in bracket `index`: 0 is `(-inf, 0)`, `i >= 1` is `(pole(i-1), pole(i))`.
    pub(crate) fn root(&self, index: usize) -> Result<SecularRoot> {
        let h = |origin: usize, delta: f64| self.eval(origin, delta).f - 1.0;
        let fail = |lo: f64, hi: f64| Error::BracketFailure { index, lo, hi };

        let (origin, mut lo, mut hi) = if index == 0 {
            let span = self.pole(1);
            let mut hi = -POLE_OFFSET * span;
            while h(0, hi) <= 0.0 {
                hi *= 1e-3;
                if hi.abs() < f64::MIN_POSITIVE {
                    return Err(fail(f64::NEG_INFINITY, 0.0));
                }
            }
            let mut lo = -(self.pole(self.energies.len() - 1) + 1.0);
            let mut tries = 0;
            while h(0, lo) >= 0.0 {
                lo *= 2.0;
                tries += 1;
                if tries > 2000 || !lo.is_finite() {
                    return Err(fail(lo, hi));
                }
            }
            (0, lo, hi)
        } else {
            let left = index - 1;
            let right = index;
            let gap = self.gamma * (self.energies[right] - self.energies[left]);
            let mid = 0.5 * gap;
            let h_mid = h(left, mid);
            if h_mid == 0.0 {
                return Ok(self.finish(left, mid));
            }
            if h_mid > 0.0 {
                let mut lo = POLE_OFFSET * gap;
                while h(left, lo) >= 0.0 {
                    lo *= 1e-3;
                    if lo < f64::MIN_POSITIVE {
                        return Err(fail(self.pole(left), self.pole(right)));
                    }
                }
                (left, lo, mid)
            } else {
                let mut hi = -POLE_OFFSET * gap;
                while h(right, hi) <= 0.0 {
                    hi *= 1e-3;
                    if hi.abs() < f64::MIN_POSITIVE {
                        return Err(fail(self.pole(left), self.pole(right)));
                    }
                }
                (right, -mid, hi)
            }
        };

        if !(h(origin, lo) < 0.0 && h(origin, hi) > 0.0) {
            return Err(fail(lo, hi));
        }

        // Bisection; geometric midpoints while the endpoints differ in scale.
        for _ in 0..4000 {
            let (alo, ahi) = (lo.abs(), hi.abs());
            if hi - lo <= BISECTION_REL_WIDTH * alo.min(ahi) {
                break;
            }
            let ratio = alo.max(ahi) / alo.min(ahi);
            let mid = if ratio > 2.0 {
                lo.signum() * (alo * ahi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if h(origin, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        // Safeguarded Newton polish inside the final bracket.
        let mut x = 0.5 * (lo + hi);
        for _ in 0..6 {
            let e = self.eval(origin, x);
            let r = e.f - 1.0;
            if r == 0.0 {
                break;
            }
            if r < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let next = x - r / e.fp;
            if next <= lo || next >= hi {
                break;
            }
            let done = (next - x).abs() <= 2.0 * f64::EPSILON * x.abs();
            x = next;
            if done {
                break;
            }
        }
        Ok(self.finish(origin, x))
    }

    fn finish(&self, origin: usize, delta: f64) -> SecularRoot {
        let e = self.eval(origin, delta);
        let energy = self.pole(origin) + delta;
        let n = self.ls.num_vertices() as f64;
        SecularRoot {
            energy,
            secular_derivative: e.fp,
            w_overlap_sq: 1.0 / e.fp,
            s_overlap_sq: 1.0 / (n * energy * energy * e.fp),
            residual: e.f - 1.0,
            residual_scale: e.scale,
        }
    }

    fn irrelevant_count(&self) -> u64 {
        self.ls.levels().iter().map(|l| l.multiplicity - 1).sum()
    }
}

/// `F(E)` for the spectrum `ls` at coupling `gamma`.
pub fn secular_value(ls: &LevelSpectrum, gamma: f64, energy: f64) -> Result<f64> {
    Secular::new(ls, gamma)?.value(energy)
}

/// `F'(E) = (1/N) sum mult / (gamma level - E)^2`.
pub fn secular_derivative(ls: &LevelSpectrum, gamma: f64, energy: f64) -> Result<f64> {
    Secular::new(ls, gamma)?.derivative(energy)
}

/// The lowest `count` relevant roots (ground state first).
pub fn solve_lowest(ls: &LevelSpectrum, gamma: f64, count: usize) -> Result<Vec<SecularRoot>> {
    let sec = Secular::new(ls, gamma)?;
    (0..count.min(ls.num_levels()))
        .map(|i| sec.root(i))
        .collect()
}

/// Every relevant eigenvalue of `H`, one per bracket.
pub fn solve_spectrum(ls: &LevelSpectrum, gamma: f64) -> Result<SecularSpectrum> {
    let sec = Secular::new(ls, gamma)?;
    let roots = (0..ls.num_levels())
        .map(|i| sec.root(i))
        .collect::<Result<Vec<_>>>()?;
    Ok(SecularSpectrum {
        gamma,
        roots,
        num_vertices: ls.num_vertices(),
        irrelevant_count: sec.irrelevant_count(),
    })
}

/// Ground energy, lowest positive relevant energy and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundAndGap {
    pub ground: f64,
    pub excited: f64,
    pub gap: f64,
}

pub fn ground_and_gap(ls: &LevelSpectrum, gamma: f64) -> Result<GroundAndGap> {
    let roots = solve_lowest(ls, gamma, 2)?;
    let (ground, excited) = (roots[0].energy, roots[1].energy);
    Ok(GroundAndGap {
        ground,
        excited,
        gap: excited - ground,
    })
}
