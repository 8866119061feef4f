//! Agreement between the secular solver and full diagonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::critical_scan_center;
use crate::error::Result;
use crate::evolution::{default_t_max, AmplitudeSeries, DenseOracle};
use crate::graph::{level_spectrum, GraphFamily};
use crate::numeric::KahanSum;
use crate::secular::solve_spectrum;

/// Dense eigenvalues closer than this to a root are attributed to it.
pub const MATCH_WINDOW: f64 = 1e-8;
/// Dense eigenvectors with more `w` weight than this must match a root.
pub const RELEVANT_WEIGHT: f64 = 1e-10;

/// Largest deviations between the two routes at one `(gamma, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub family: String,
    pub gamma: f64,
    pub t: f64,
    pub amplitude_delta: f64,
    pub eigenvalue_delta: f64,
    pub w_weight_delta: f64,
    pub s_weight_delta: f64,
    /// Dense eigenvalues with non-negligible `w` weight and no nearby root.
    pub unmatched: usize,
}

impl OracleComparison {
    pub fn max_delta(&self) -> f64 {
        self.amplitude_delta
            .max(self.eigenvalue_delta)
            .max(self.w_weight_delta)
            .max(self.s_weight_delta)
    }
}

pub fn compare_with_oracle(
    g: &GraphFamily,
    gamma: f64,
    t: f64,
    cap: usize,
) -> Result<OracleComparison> {
    let dense = DenseOracle::new(g, gamma, 0, cap)?;
    let spec = solve_spectrum(&level_spectrum(g)?, gamma)?;
    let fast = AmplitudeSeries::new(&spec).at(t);
    let amplitude_delta = (fast - dense.amplitude(t)).norm();

    let w = dense.w_weights();
    let s = dense.s_weights();
    let ev = &dense.eigenvalues;
    let mut eigenvalue_delta = 0.0f64;
    let mut w_weight_delta = 0.0f64;
    let mut s_weight_delta = 0.0f64;
    for root in &spec.roots {
        let e = root.energy;
        // Eigenvalues are sorted; find the window around `e`.
        let start = ev.partition_point(|&x| x < e - MATCH_WINDOW);
        let end = ev.partition_point(|&x| x <= e + MATCH_WINDOW);
        let nearest = ev[start.saturating_sub(1)..(end + 1).min(ev.len())]
            .iter()
            .map(|x| (x - e).abs())
            .fold(f64::INFINITY, f64::min);
        eigenvalue_delta = eigenvalue_delta.max(nearest);
        let w_sum = w[start..end].iter().copied().collect::<KahanSum>().value();
        let s_sum = s[start..end].iter().copied().collect::<KahanSum>().value();
        w_weight_delta = w_weight_delta.max((w_sum - root.w_overlap_sq).abs());
        s_weight_delta = s_weight_delta.max((s_sum - root.s_overlap_sq).abs());
    }
    let unmatched = ev
        .iter()
        .zip(&w)
        .filter(|(&x, &wx)| {
            wx > RELEVANT_WEIGHT
                && !spec
                    .roots
                    .iter()
                    .any(|r| (r.energy - x).abs() <= MATCH_WINDOW)
        })
        .count();
    Ok(OracleComparison {
        family: g.label(),
        gamma,
        t,
        amplitude_delta,
        eigenvalue_delta,
        w_weight_delta,
        s_weight_delta,
        unmatched,
    })
}

/// Seeded random comparisons over several families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub oracle_cap: usize,
    pub tolerance: f64,
    pub comparisons: Vec<OracleComparison>,
    pub max_delta: f64,
    pub pass: bool,
}

/// Families the default validation run covers.
pub fn default_validation_families() -> Vec<GraphFamily> {
    vec![
        GraphFamily::Complete { num_vertices: 256 },
        GraphFamily::Hypercube { num_bits: 8 },
        GraphFamily::Lattice { dim: 2, side: 16 },
        GraphFamily::Lattice { dim: 3, side: 8 },
        GraphFamily::Lattice { dim: 4, side: 6 },
        GraphFamily::Lattice { dim: 5, side: 4 },
    ]
}

/// For each family, `draws` pairs with `gamma` log-uniform in `[c/4, 4c]`
/// around the critical scan centre and `t` uniform in `[0, 4 sqrt N]`.
/// Families above the oracle cap are skipped.
pub fn validate(
    families: &[GraphFamily],
    draws: usize,
    seed: u64,
    oracle_cap: usize,
    tolerance: f64,
) -> Result<ValidationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comparisons = Vec::new();
    for g in families {
        g.validate()?;
        let n = g.num_vertices();
        if n > oracle_cap {
            continue;
        }
        let center = critical_scan_center(g)?;
        let t_max = default_t_max(n);
        for _ in 0..draws {
            let gamma = center * 4f64.powf(rng.gen_range(-1.0..=1.0));
            let t = rng.gen_range(0.0..=t_max);
            comparisons.push(compare_with_oracle(g, gamma, t, oracle_cap)?);
        }
    }
    let max_delta = comparisons
        .iter()
        .map(OracleComparison::max_delta)
        .fold(0.0, f64::max);
    let pass = max_delta < tolerance && comparisons.iter().all(|c| c.unmatched == 0);
    Ok(ValidationReport {
        seed,
        oracle_cap,
        tolerance,
        comparisons,
        max_delta,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_families_agree() {
        for g in [
            GraphFamily::complete(32).unwrap(),
            GraphFamily::hypercube(5).unwrap(),
            GraphFamily::lattice(3, 4).unwrap(),
        ] {
            let c = compare_with_oracle(&g, 0.3, 3.0, 4096).unwrap();
            assert!(c.max_delta() < 1e-10, "{c:?}");
            assert_eq!(c.unmatched, 0);
        }
    }

    #[test]
    fn families_above_cap_are_skipped() {
        let report = validate(&[GraphFamily::complete(64).unwrap()], 2, 1, 32, 1e-8).unwrap();
        assert!(report.comparisons.is_empty());
    }

    #[test]
    fn same_seed_same_draws() {
        let fams = [GraphFamily::lattice(2, 4).unwrap()];
        let a = validate(&fams, 3, 9, 4096, 1e-8).unwrap();
        let b = validate(&fams, 3, 9, 4096, 1e-8).unwrap();
        assert_eq!(a, b);
        assert!(a.pass);
    }
}
