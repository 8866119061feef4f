//! Success amplitude `<w| e^{-iHt} |s>` from the secular spectrum.
//!
//! The spectral form is `-(1/sqrt N) sum_a e^{-i E_a t} / (E_a F'(E_a))`;
//! exponentials are evaluated directly per root and time.

mod dense;

pub use dense::{dense_oracle, DenseOracle, DEFAULT_ORACLE_CAP};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::golden_section_min;
use crate::secular::SecularSpectrum;

/// Number of uniform grid points scanned before golden-section refinement.
pub const OPTIMAL_TIME_GRID: usize = 2048;
/// Relative bracket width at which the optimal-time search stops.
pub const OPTIMAL_TIME_REL_TOL: f64 = 1e-6;

/// Default measurement window `4 sqrt(N)`.
pub fn default_t_max(num_vertices: usize) -> f64 {
    4.0 * (num_vertices as f64).sqrt()
}

/// Precomputed spectral coefficients `c_a = -1 / (sqrt N E_a F'(E_a))`.
#[derive(Debug, Clone)]
pub struct AmplitudeSeries {
    energies: Vec<f64>,
    coefficients: Vec<f64>,
}

impl AmplitudeSeries {
    pub fn new(spec: &SecularSpectrum) -> Self {
        let sqrt_n = (spec.num_vertices as f64).sqrt();
        AmplitudeSeries {
            energies: spec.roots.iter().map(|r| r.energy).collect(),
            coefficients: spec
                .roots
                .iter()
                .map(|r| -1.0 / (sqrt_n * r.energy * r.secular_derivative))
                .collect(),
        }
    }

    /// Amplitude at any real `t`; negative times give the time-reversed value.
    pub fn at(&self, t: f64) -> Complex64 {
        let mut re = crate::numeric::KahanSum::default();
        let mut im = crate::numeric::KahanSum::default();
        for (e, c) in self.energies.iter().zip(&self.coefficients) {
            let (s, co) = (e * t).sin_cos();
            re.add(c * co);
            im.add(-c * s);
        }
        Complex64::new(re.value(), im.value())
    }

    pub fn probability(&self, t: f64) -> f64 {
        self.at(t).norm_sqr()
    }
}

/// `<w| e^{-iHt} |s>` for `t >= 0`.
pub fn amplitude(spec: &SecularSpectrum, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be >= 0, got {t}"
        )));
    }
    Ok(AmplitudeSeries::new(spec).at(t))
}

/// Success amplitude sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub gamma: f64,
    pub times: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub probabilities: Vec<f64>,
}

/// Samples `num_points` uniform times on `[0, t_max]`, both ends included.
pub fn trace(spec: &SecularSpectrum, t_max: f64, num_points: usize) -> Result<EvolutionTrace> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if num_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 time points, got {num_points}"
        )));
    }
    let series = AmplitudeSeries::new(spec);
    let step = t_max / (num_points - 1) as f64;
    let times: Vec<f64> = (0..num_points)
        .map(|i| {
            if i == num_points - 1 {
                t_max
            } else {
                i as f64 * step
            }
        })
        .collect();
    let amplitudes: Vec<Complex64> = times.iter().map(|&t| series.at(t)).collect();
    let probabilities = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    Ok(EvolutionTrace {
        gamma: spec.gamma,
        times,
        amplitudes,
        probabilities,
    })
}

/// Best measurement time within `[0, t_max]` and its success probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalTime {
    pub t_star: f64,
    pub p_star: f64,
}

/// Scans a 2048-point grid and refines the best grid bracket by golden section.
pub fn find_optimal_time(spec: &SecularSpectrum, t_max: f64) -> Result<OptimalTime> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    let series = AmplitudeSeries::new(spec);
    let step = t_max / (OPTIMAL_TIME_GRID - 1) as f64;
    let mut best = (0usize, series.probability(0.0));
    for i in 1..OPTIMAL_TIME_GRID {
        let p = series.probability(i as f64 * step);
        if p > best.1 {
            best = (i, p);
        }
    }
    let (i, p_grid) = best;
    let lo = i.saturating_sub(1) as f64 * step;
    let hi = ((i + 1).min(OPTIMAL_TIME_GRID - 1) as f64 * step).min(t_max);
    let (t, neg_p) = golden_section_min(|t| -series.probability(t), lo, hi, OPTIMAL_TIME_REL_TOL);
    // Never return less than the best grid point.
    if -neg_p >= p_grid {
        Ok(OptimalTime {
            t_star: t,
            p_star: -neg_p,
        })
    } else {
        Ok(OptimalTime {
            t_star: i as f64 * step,
            p_star: p_grid,
        })
    }
}
