use proptest::prelude::*;
use walksearch::graph::level_spectrum;
use walksearch::secular::{secular_derivative, secular_value, solve_lowest, solve_spectrum};
use walksearch::GraphFamily;

fn family() -> impl Strategy<Value = GraphFamily> {
    prop_oneof![
        (2usize..100_000).prop_map(|n| GraphFamily::Complete { num_vertices: n }),
        (1u32..24).prop_map(|n| GraphFamily::Hypercube { num_bits: n }),
        (1u32..4, 2usize..24).prop_map(|(d, l)| GraphFamily::Lattice { dim: d, side: l }),
        (4u32..7, 2usize..7).prop_map(|(d, l)| GraphFamily::Lattice { dim: d, side: l }),
    ]
}

/// `gamma` spread over four decades around the finite-size scan centre.
fn family_and_gamma() -> impl Strategy<Value = (GraphFamily, f64)> {
    (family(), -2.0f64..2.0).prop_map(|(g, e)| {
        let c = level_spectrum(&g).unwrap().inverse_moment(1);
        (g, c * 10f64.powf(e))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_identities_hold((g, gamma) in family_and_gamma()) {
        let ls = level_spectrum(&g).unwrap();
        let spec = solve_spectrum(&ls, gamma).unwrap();
        prop_assert!((spec.sum_rule() + 1.0).abs() < 1e-9, "sum rule {}", spec.sum_rule());
        prop_assert!((spec.total_w_weight() - 1.0).abs() < 1e-9);
        prop_assert!((spec.total_s_weight() - 1.0).abs() < 1e-9);
        let negatives = spec.roots.iter().filter(|r| r.energy < 0.0).count();
        prop_assert_eq!(negatives, 1);
        prop_assert_eq!(spec.roots.len(), ls.num_levels());
        prop_assert_eq!(spec.roots.len() as u64 + spec.irrelevant_count, g.num_vertices() as u64);
    }

    #[test]
    fn roots_interlace_with_scaled_levels((g, gamma) in family_and_gamma()) {
        let ls = level_spectrum(&g).unwrap();
        let spec = solve_spectrum(&ls, gamma).unwrap();
        let poles: Vec<f64> = ls.levels().iter().map(|l| gamma * l.energy).collect();
        prop_assert!(spec.roots[0].energy < poles[0]);
        for (i, r) in spec.roots.iter().enumerate().skip(1) {
            prop_assert!(poles[i - 1] < r.energy && r.energy < poles[i],
                "root {} = {} outside ({}, {})", i, r.energy, poles[i - 1], poles[i]);
        }
    }

    #[test]
    fn secular_function_increases_between_poles(
        (g, gamma) in family_and_gamma(),
        frac in prop::collection::vec(0.01f64..0.99, 8),
    ) {
        let ls = level_spectrum(&g).unwrap();
        let poles: Vec<f64> = ls.levels().iter().map(|l| gamma * l.energy).collect();
        for w in poles.windows(2).take(6) {
            let mut xs: Vec<f64> = frac.iter().map(|f| w[0] + f * (w[1] - w[0])).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let fs: Vec<f64> = xs.iter().map(|&x| secular_value(&ls, gamma, x).unwrap()).collect();
            for p in fs.windows(2) {
                prop_assert!(p[1] > p[0]);
            }
            for &x in &xs {
                prop_assert!(secular_derivative(&ls, gamma, x).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn roots_solve_the_secular_equation((g, gamma) in family_and_gamma()) {
        let ls = level_spectrum(&g).unwrap();
        for r in solve_lowest(&ls, gamma, 6).unwrap() {
            prop_assert!(r.residual.abs() <= 1e-10 * r.residual_scale.max(1.0));
            // Re-evaluating at the absolute energy loses the pole offset to
            // rounding, so allow for its conditioning.
            let fp = secular_derivative(&ls, gamma, r.energy).unwrap();
            let gap = ls
                .levels()
                .iter()
                .map(|l| (gamma * l.energy - r.energy).abs())
                .fold(f64::INFINITY, f64::min);
            let cond = 1.0 + r.energy.abs() / gap;
            prop_assert!((fp - r.secular_derivative).abs() <= 1e-12 * cond * fp);
        }
    }

    #[test]
    fn complete_graph_matches_quadratic(n in 2usize..1_000_000, scale in 0.1f64..10.0) {
        // F(E) = 1 reduces to E^2 + (1 - gamma N) E - gamma = 0.
        let gamma = scale / n as f64;
        let ls = level_spectrum(&GraphFamily::complete(n).unwrap()).unwrap();
        let spec = solve_spectrum(&ls, gamma).unwrap();
        let b = 1.0 - gamma * n as f64;
        let disc = (b * b + 4.0 * gamma).sqrt();
        let (lo, hi) = if b > 0.0 {
            let lo = -(b + disc) / 2.0;
            (lo, -gamma / lo)
        } else {
            let hi = (-b + disc) / 2.0;
            (-gamma / hi, hi)
        };
        prop_assert!((spec.roots[0].energy - lo).abs() <= 1e-12 * lo.abs().max(gamma));
        prop_assert!((spec.roots[1].energy - hi).abs() <= 1e-12 * hi.abs().max(gamma));
    }
}

#[test]
fn fig4_structure() {
    let ls = level_spectrum(&GraphFamily::lattice(2, 4).unwrap()).unwrap();
    let spec = solve_spectrum(&ls, 1.0).unwrap();
    assert_eq!(spec.roots.len(), 5);
    assert_eq!(spec.irrelevant_count, 11);
}

#[test]
fn secular_value_rejects_poles() {
    let ls = level_spectrum(&GraphFamily::hypercube(4).unwrap()).unwrap();
    assert!(secular_value(&ls, 0.5, 1.0).is_err());
    assert!(secular_value(&ls, 0.5, 0.0).is_err());
    assert!(secular_value(&ls, -1.0, 0.3).is_err());
}

#[test]
fn tiny_weight_roots_are_kept() {
    // Singly degenerate top levels of a large hypercube carry weight ~ 1/N.
    let ls = level_spectrum(&GraphFamily::hypercube(36).unwrap()).unwrap();
    let spec = solve_spectrum(&ls, 0.01).unwrap();
    assert_eq!(spec.roots.len(), ls.num_levels());
    assert!(spec.roots.iter().any(|r| r.w_overlap_sq < 1e-10));
    assert!((spec.total_w_weight() - 1.0).abs() < 1e-9);
}
