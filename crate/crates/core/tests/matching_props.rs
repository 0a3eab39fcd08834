mod common;

use common::{brute_force_matching_size, hall_holds, random_graph};
use propavg::matching::{
    hall_deficient_set, has_perfect_matching, max_matching, max_matching_from, perfect_matching,
    try_max_matching, BipartiteGraph, MatchingError, DEFAULT_HALL_CAP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_exclusion(rng: &mut ChaCha8Rng, right: usize) -> Option<usize> {
    (right > 0 && rng.gen_bool(0.5)).then(|| rng.gen_range(0..right))
}

#[test]
fn maximum_size_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3_000 {
        let left = rng.gen_range(0..=8);
        let right = rng.gen_range(0..=8);
        let density = rng.gen_range(0.0..1.0);
        let g = random_graph(&mut rng, left, right, density);
        let excl = random_exclusion(&mut rng, right);
        let m = max_matching(&g, excl);
        assert!(m.is_valid_for(&g, excl));
        assert_eq!(m.len(), brute_force_matching_size(&g, excl));
    }
}

#[test]
fn warm_start_reaches_the_same_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1_000 {
        let n = rng.gen_range(1..=8);
        let g = random_graph(&mut rng, n, n + 1, 0.5);
        let seed = max_matching(&g, None);
        let excl = Some(rng.gen_range(0..=n));
        let warm = max_matching_from(&g, excl, seed);
        assert!(warm.is_valid_for(&g, excl));
        assert_eq!(warm.len(), max_matching(&g, excl).len());
    }
}

#[test]
fn perfect_matching_agrees_with_hall() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2_000 {
        let left = rng.gen_range(1..=8);
        let right = rng.gen_range(left..=left + 2);
        let density = rng.gen_range(0.2..0.9);
        let g = random_graph(&mut rng, left, right, density);
        let excl = random_exclusion(&mut rng, right);
        let perfect = has_perfect_matching(&g, excl);
        assert_eq!(perfect, hall_holds(&g, excl, 0));
        let witness = hall_deficient_set(&g, excl, false, DEFAULT_HALL_CAP).unwrap();
        assert_eq!(perfect, witness.is_none());
        if let Some(s) = witness {
            let mut nbrs: Vec<usize> = s
                .iter()
                .flat_map(|&l| g.neighbors(l).iter().copied())
                .filter(|&r| Some(r) != excl)
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            assert!(s.len() > nbrs.len(), "witness {s:?} is not deficient");
        }
        if let Some(m) = perfect_matching(&g, excl) {
            assert!(m.covers_left() && m.is_valid_for(&g, excl));
        }
    }
}

#[test]
fn every_single_exclusion_iff_strict_hall() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut positives = 0;
    for _ in 0..1_000 {
        let n = rng.gen_range(1..=9);
        let density = rng.gen_range(0.3..0.95);
        let g = random_graph(&mut rng, n, n + 1, density);
        let all = (0..=n).all(|u| has_perfect_matching(&g, Some(u)));
        assert_eq!(all, hall_holds(&g, None, 1));
        assert_eq!(
            all,
            hall_deficient_set(&g, None, true, DEFAULT_HALL_CAP)
                .unwrap()
                .is_none()
        );
        positives += usize::from(all);
    }
    assert!(positives > 100 && positives < 900, "{positives}");
}

#[test]
fn adding_edges_never_shrinks_the_matching() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let left = rng.gen_range(1..=8);
        let right = rng.gen_range(1..=8);
        let mut g = random_graph(&mut rng, left, right, 0.3);
        let excl = random_exclusion(&mut rng, right);
        let mut size = max_matching(&g, excl).len();
        for _ in 0..10 {
            g.add_edge(rng.gen_range(0..left), rng.gen_range(0..right))
                .unwrap();
            let next = max_matching(&g, excl).len();
            assert!(next >= size);
            size = next;
        }
    }
}

#[test]
fn empty_and_complete_graphs() {
    assert_eq!(max_matching(&BipartiteGraph::new(0, 0), None).len(), 0);
    assert!(has_perfect_matching(&BipartiteGraph::new(0, 3), None));
    assert!(!has_perfect_matching(&BipartiteGraph::new(2, 3), None));
    let k = BipartiteGraph::complete(4, 5);
    for u in 0..5 {
        assert!(has_perfect_matching(&k, Some(u)));
    }
    assert!(!has_perfect_matching(
        &BipartiteGraph::complete(4, 4),
        Some(0)
    ));
}

#[test]
fn bad_inputs_are_reported() {
    let mut g = BipartiteGraph::new(2, 2);
    assert!(matches!(
        g.add_edge(2, 0),
        Err(MatchingError::EdgeOutOfRange { .. })
    ));
    assert!(matches!(
        try_max_matching(&g, Some(2)),
        Err(MatchingError::ExclusionOutOfRange { .. })
    ));
    let big = BipartiteGraph::complete(21, 22);
    assert!(matches!(
        hall_deficient_set(&big, None, false, DEFAULT_HALL_CAP),
        Err(MatchingError::CapExceeded { .. })
    ));
}
