mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;

use common::neighbour_matchings;
use z2band::momentum::{
    cell_decomposition, effective_zone_path, enumerate_pairings, fixed_points, involution, MomentumSpace, TrimPairing,
};

fn index_pairs(p: &TrimPairing) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = p.pairs.iter().map(|(a, b)| (a.index.min(b.index), a.index.max(b.index))).collect();
    v.sort_unstable();
    v
}

#[test]
fn pairings_are_exactly_the_axis_aligned_matchings() {
    for d in 2..=3 {
        let space = MomentumSpace::Torus(d);
        let ours: BTreeSet<Vec<(usize, usize)>> = enumerate_pairings(space).unwrap().iter().map(index_pairs).collect();
        let oracle: BTreeSet<Vec<(usize, usize)>> = neighbour_matchings(d)
            .into_iter()
            .filter(|m| {
                let dirs: BTreeSet<usize> = m.iter().map(|(a, b)| a ^ b).collect();
                dirs.len() == 1
            })
            .collect();
        assert_eq!(ours, oracle, "T^{d}");
    }
}

#[test]
fn groupings_split_pairs_into_sub_tori() {
    let space = MomentumSpace::Torus(3);
    let pairings = enumerate_pairings(space).unwrap();
    assert_eq!(pairings.len(), 9);
    let mut splits = BTreeSet::new();
    for p in &pairings {
        assert!(p.is_valid());
        let g = p.grouping.as_ref().unwrap();
        assert_eq!(g.north.len(), 2);
        assert_eq!(g.south.len(), 2);
        let mut all: Vec<usize> = g.north.iter().chain(&g.south).copied().collect();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
        let mut north = g.north.clone();
        north.sort_unstable();
        splits.insert((p.axis, north));
    }
    assert_eq!(splits.len(), 9);
}

#[test]
fn unsupported_spaces() {
    assert!(enumerate_pairings(MomentumSpace::Torus(1)).is_err());
    assert!(enumerate_pairings(MomentumSpace::Sphere(2)).is_err());
    assert!(MomentumSpace::torus(4).is_err());
    assert_eq!(MomentumSpace::parse("t3").unwrap(), MomentumSpace::Torus(3));
    assert_eq!(MomentumSpace::parse("s2").unwrap(), MomentumSpace::Sphere(2));
    assert!(MomentumSpace::parse("q2").is_err());
}

#[test]
fn fixed_points_are_involution_invariant() {
    for d in 1..=3 {
        for p in fixed_points(MomentumSpace::Torus(d)) {
            let k = p.k();
            let back = involution(&k);
            assert!(k.iter().all(|&x| x == 0.0 || x == PI));
            assert_eq!(back, k);
        }
    }
}

#[test]
fn cells_count_matches_product_structure() {
    for d in 1..=3 {
        let space = MomentumSpace::Torus(d);
        let dec = cell_decomposition(space);
        assert_eq!(dec.fixed_cells.len(), 1 << d);
        let cells = dec.all_cells(space);
        assert_eq!(cells.len(), 4usize.pow(d as u32));
        for f in &dec.free_cells {
            assert_ne!(f.representative, f.image);
            assert_eq!(f.representative.involution(), f.image);
        }
    }
    let s = cell_decomposition(MomentumSpace::Sphere(3));
    assert_eq!(s.fixed_cells.len(), 2);
    assert_eq!(s.free_cells.len(), 3);
}

#[test]
fn effective_zone_paths() {
    let space = MomentumSpace::Torus(2);
    let pts = fixed_points(space);
    let path = effective_zone_path(space, (pts[0], pts[2]), 5).unwrap();
    assert_eq!(path.len(), 5);
    assert_eq!(path[0], vec![0.0, 0.0]);
    assert_eq!(path[4], vec![PI, 0.0]);
    assert!(effective_zone_path(space, (pts[0], pts[3]), 5).is_err());
    assert!(effective_zone_path(space, (pts[0], pts[2]), 1).is_err());
}

proptest! {
    #[test]
    fn torus_cells_partition_the_torus(k in prop::collection::vec(-PI..PI, 1..=3)) {
        let space = MomentumSpace::Torus(k.len());
        let cells = cell_decomposition(space).all_cells(space);
        let hits: Vec<_> = cells.iter().filter(|c| c.contains(&k)).collect();
        prop_assert_eq!(hits.len(), 1);
        let cell = hits[0];
        prop_assert!(cell.involution().contains(&involution(&k)));
        if cell.dim() > 0 {
            prop_assert!(!cell.contains(&involution(&k)) || involution(&k) == k);
        }
    }

    #[test]
    fn involution_is_an_involution(k in prop::collection::vec(-PI..PI, 1..=3)) {
        let back = involution(&involution(&k));
        for (a, b) in k.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
