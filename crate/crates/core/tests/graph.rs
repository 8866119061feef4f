use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use walksearch::graph::{
    dispersion, lattice_level_tolerance, level_spectrum, momentum_grid, negative_laplacian_dense,
};
use walksearch::{Error, GraphFamily};

fn small_family() -> impl Strategy<Value = GraphFamily> {
    prop_oneof![
        (2usize..5000).prop_map(|n| GraphFamily::Complete { num_vertices: n }),
        (1u32..20).prop_map(|n| GraphFamily::Hypercube { num_bits: n }),
        (1u32..4, 2usize..14).prop_map(|(d, l)| GraphFamily::Lattice { dim: d, side: l }),
        (4u32..7, 2usize..6).prop_map(|(d, l)| GraphFamily::Lattice { dim: d, side: l }),
    ]
}

proptest! {
    #[test]
    fn multiplicities_sum_to_n(g in small_family()) {
        let ls = level_spectrum(&g).unwrap();
        let total: u64 = ls.levels().iter().map(|l| l.multiplicity).sum();
        prop_assert_eq!(total as usize, g.num_vertices());
        prop_assert_eq!(ls.levels()[0].energy, 0.0);
        prop_assert_eq!(ls.levels()[0].multiplicity, 1);
    }

    #[test]
    fn even_lattices_are_reflection_symmetric(d in 1u32..5, half in 1usize..7) {
        let side = 2 * half;
        let ls = level_spectrum(&GraphFamily::lattice(d, side).unwrap()).unwrap();
        let top = 4.0 * d as f64;
        let levels = ls.levels();
        for (lo, hi) in levels.iter().zip(levels.iter().rev()) {
            prop_assert!((lo.energy + hi.energy - top).abs() < 1e-9);
            prop_assert_eq!(lo.multiplicity, hi.multiplicity);
        }
    }

    #[test]
    fn lattice_levels_are_the_dispersion_image(d in 1u32..4, side in 2usize..9) {
        let ls = level_spectrum(&GraphFamily::lattice(d, side).unwrap()).unwrap();
        let tol = lattice_level_tolerance(d);
        let mut counts = vec![0u64; ls.num_levels()];
        for k in momentum_grid(d, side).unwrap() {
            let e = dispersion(&k);
            let hits: Vec<usize> = ls
                .levels()
                .iter()
                .enumerate()
                .filter(|(_, l)| (l.energy - e).abs() <= tol)
                .map(|(i, _)| i)
                .collect();
            prop_assert_eq!(hits.len(), 1, "energy {} matched {:?}", e, hits);
            counts[hits[0]] += 1;
        }
        for (c, l) in counts.iter().zip(ls.levels()) {
            prop_assert_eq!(*c, l.multiplicity);
        }
    }
}

#[test]
fn explicit_laplacian_matches_levels() {
    let families = [
        GraphFamily::complete(40).unwrap(),
        GraphFamily::hypercube(7).unwrap(),
        GraphFamily::lattice(1, 17).unwrap(),
        GraphFamily::lattice(2, 2).unwrap(),
        GraphFamily::lattice(2, 9).unwrap(),
        GraphFamily::lattice(3, 5).unwrap(),
        GraphFamily::lattice(4, 3).unwrap(),
    ];
    for g in families {
        let m = negative_laplacian_dense(&g).unwrap();
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let ls = level_spectrum(&g).unwrap();
        let mut expected = Vec::new();
        for l in ls.levels() {
            expected.extend(std::iter::repeat_n(l.energy, l.multiplicity as usize));
        }
        assert_eq!(ev.len(), expected.len());
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-9, "{g}: {a} vs {b}");
        }
    }
}

#[test]
fn hypercube_levels_are_binomial() {
    let ls = level_spectrum(&GraphFamily::hypercube(10).unwrap()).unwrap();
    let got: Vec<(f64, u64)> = ls
        .levels()
        .iter()
        .map(|l| (l.energy, l.multiplicity))
        .collect();
    let mut c = 1u64;
    for (r, &(e, m)) in got.iter().enumerate() {
        assert_eq!(e, 2.0 * r as f64);
        assert_eq!(m, c);
        c = c * (10 - r as u64) / (r as u64 + 1);
    }
}

#[test]
fn small_torus_pole_structure() {
    // lattice:2:4 has levels 0, 2, 4, 6, 8 with degeneracies 1, 4, 6, 4, 1.
    let ls = level_spectrum(&GraphFamily::lattice(2, 4).unwrap()).unwrap();
    let table: BTreeMap<i64, u64> = ls
        .levels()
        .iter()
        .map(|l| (l.energy.round() as i64, l.multiplicity))
        .collect();
    assert_eq!(
        table,
        BTreeMap::from([(0, 1), (2, 4), (4, 6), (6, 4), (8, 1)])
    );
}

#[test]
fn invalid_families_are_rejected() {
    assert!(GraphFamily::complete(1).is_err());
    assert!(GraphFamily::hypercube(0).is_err());
    assert_eq!(GraphFamily::lattice(1, 1), Err(Error::SideTooSmall(1)));
    assert!(GraphFamily::lattice(0, 4).is_err());
}
