//! Experiments built on the secular solver: coupling scans, location of the
//! critical coupling, bound checks and finite-size scaling.

mod bounds;
mod scaling;

pub use bounds::{
    default_failure_grid, reference_coupling, verify_failure_bounds, verify_transition_bounds,
    BoundReport, BoundSuite, Regime, FAILURE_GRID_POINTS, FAILURE_GRID_SPAN, FINITE_N_SLACK,
    SMALL_TERMS_SLACK,
};
pub use scaling::{
    critical_predictions, measure_at, subcritical_scaling, window_half_width, CeilingCheck,
    CriticalPrediction, ScalingRecord, SubcriticalReport, WindowWidth,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{level_spectrum, GraphFamily, LevelSpectrum};
use crate::numeric::golden_section_min;
use crate::secular::{ground_and_gap, solve_lowest};

/// Gap and overlaps of the two lowest relevant eigenstates at one coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub gamma: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub overlap_s_psi0: f64,
    pub overlap_s_psi1: f64,
    pub overlap_w_psi0: f64,
    pub overlap_w_psi1: f64,
}

pub(crate) fn scan_point(ls: &LevelSpectrum, gamma: f64) -> Result<ScanRecord> {
    let roots = solve_lowest(ls, gamma, 2)?;
    let (r0, r1) = (roots[0], roots[1]);
    Ok(ScanRecord {
        gamma,
        e0: r0.energy,
        e1: r1.energy,
        gap: r1.energy - r0.energy,
        overlap_s_psi0: r0.s_overlap_sq,
        overlap_s_psi1: r1.s_overlap_sq,
        overlap_w_psi0: r0.w_overlap_sq,
        overlap_w_psi1: r1.w_overlap_sq,
    })
}

fn linear_grid(lo: f64, hi: f64, num_points: usize) -> Vec<f64> {
    let step = (hi - lo) / (num_points - 1) as f64;
    (0..num_points)
        .map(|i| {
            if i == num_points - 1 {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect()
}

/// One [`ScanRecord`] per point of a uniform grid on `[gamma_lo, gamma_hi]`.
pub fn scan_gamma(
    g: &GraphFamily,
    gamma_lo: f64,
    gamma_hi: f64,
    num_points: usize,
) -> Result<Vec<ScanRecord>> {
    if !(gamma_lo > 0.0 && gamma_hi > gamma_lo && gamma_hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < gamma_lo < gamma_hi, got [{gamma_lo}, {gamma_hi}]"
        )));
    }
    if num_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 scan points, got {num_points}"
        )));
    }
    let ls = level_spectrum(g)?;
    linear_grid(gamma_lo, gamma_hi, num_points)
        .into_iter()
        .map(|gamma| scan_point(&ls, gamma))
        .collect()
}

/// Centre of the critical-coupling search: `S_1 = (1/N) sum_{l>0} mult / l`.
///
/// This equals `(N-1)/N^2` for the complete graph and tends to `I_{1,d}`
/// (or `ln N / 4 pi + A` in two dimensions) on lattices.
pub fn critical_scan_center(g: &GraphFamily) -> Result<f64> {
    Ok(level_spectrum(g)?.inverse_moment(1))
}

/// Points of the logarithmic coarse scan in [`find_critical_gamma`].
pub const CRITICAL_SCAN_POINTS: usize = 81;
/// Relative bracket width at which the refinement stops.
pub const CRITICAL_REL_TOL: f64 = 1e-6;

/// Gap-minimising coupling, by a logarithmic scan over `[c/4, 4c]` around
/// [`critical_scan_center`] and golden-section refinement.
pub fn find_critical_gamma(g: &GraphFamily) -> Result<f64> {
    let ls = level_spectrum(g)?;
    let center = ls.inverse_moment(1);
    let (lo, hi) = (0.25 * center, 4.0 * center);
    let ratio = (hi / lo).powf(1.0 / (CRITICAL_SCAN_POINTS - 1) as f64);
    let grid: Vec<f64> = (0..CRITICAL_SCAN_POINTS)
        .map(|i| lo * ratio.powi(i as i32))
        .collect();
    let mut best = (0usize, f64::INFINITY);
    for (i, &gamma) in grid.iter().enumerate() {
        let gap = ground_and_gap(&ls, gamma)?.gap;
        if gap < best.1 {
            best = (i, gap);
        }
    }
    let i = best.0;
    let a = grid[i.saturating_sub(1)];
    let b = grid[(i + 1).min(CRITICAL_SCAN_POINTS - 1)];
    let mut failure = None;
    let (gamma, _) = golden_section_min(
        |gamma| match ground_and_gap(&ls, gamma) {
            Ok(r) => r.gap,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        a,
        b,
        CRITICAL_REL_TOL,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(gamma),
    }
}

/// `|gamma - gamma_c| >= max(0.1 gamma_c, 5 gamma_c / sqrt N)`.
pub fn critical_margin(gamma_c: f64, num_vertices: usize) -> f64 {
    (0.1 * gamma_c).max(5.0 * gamma_c / (num_vertices as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_rejects_bad_ranges() {
        let g = GraphFamily::complete(16).unwrap();
        assert!(scan_gamma(&g, 0.0, 1.0, 5).is_err());
        assert!(scan_gamma(&g, 0.5, 0.4, 5).is_err());
        assert!(scan_gamma(&g, 0.1, 0.4, 1).is_err());
    }

    #[test]
    fn scan_endpoints_are_exact() {
        let g = GraphFamily::hypercube(5).unwrap();
        let rows = scan_gamma(&g, 0.1, 0.3, 7).unwrap();
        assert_eq!(rows.len(), 7);
        assert_eq!(rows[0].gamma, 0.1);
        assert_eq!(rows[6].gamma, 0.3);
    }

    #[test]
    fn complete_graph_critical_point() {
        let n = 256usize;
        let g = GraphFamily::complete(n).unwrap();
        let gc = find_critical_gamma(&g).unwrap();
        assert!((gc * n as f64 - 1.0).abs() < 0.02, "{gc}");
    }

    #[test]
    fn margin_formula() {
        assert_eq!(critical_margin(1.0, 100), 0.5);
        assert_eq!(critical_margin(1.0, 10_000), 0.1);
    }
}
