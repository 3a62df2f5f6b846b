use anyon_jit::chunks::constants::{constants_report, minimal_q};
use anyon_jit::chunks::linking::{build_linked_trees, check_linking, clusters_from_decomposition};
use anyon_jit::chunks::{
    brute_force_levels, cluster_statistics, decompose, decompose_errors, nugget_separation,
    verify_nugget_separation, SeparationForm,
};
use anyon_jit::geometry::{SpacetimePoint, Torus};
use anyon_jit::spacetime::{sample_errors, FaultAlphabet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(x: i32, y: i32, t: i32) -> SpacetimePoint {
    SpacetimePoint::new(x, y, t)
}

#[test]
fn worked_examples_match_enumeration() {
    let torus = Torus::new(20);
    for (pts, f1) in [
        (vec![pt(3, 3, 3), pt(5, 4, 3)], 2),
        (vec![pt(0, 0, 1), pt(10, 0, 1)], 0),
        (vec![pt(0, 0, 1), pt(2, 0, 1)], 2),
    ] {
        let d = decompose(&torus, &pts, 6);
        assert_eq!(d.level_of, brute_force_levels(&torus, &pts, 6));
        assert_eq!(d.f(1).len(), f1);
        assert!(verify_nugget_separation(&d).is_empty());
    }
}

#[test]
fn random_configurations_respect_separation() {
    let torus = Torus::new(20);
    let alphabet = FaultAlphabet::default();
    for s in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let p = [0.005, 0.02, 0.05][s as usize % 3];
        let e = sample_errors(p, &torus, 20, &alphabet, &mut rng);
        let d = decompose_errors(&torus, &e, 6);
        assert!(d.exact);
        assert!(verify_nugget_separation(&d).is_empty(), "seed {s}");
    }
}

#[test]
fn max_level_form_of_separation_fails() {
    // an isolated site next to a large top-level nugget: separated by more
    // than Q/3 but far less than Q^m/3
    let torus = Torus::new(20);
    let mut pts: Vec<SpacetimePoint> = (0..8).map(|i| pt(i, 0, 1)).collect();
    pts.push(pt(10, 10, 12));
    let d = decompose(&torus, &pts, 6);
    assert!(verify_nugget_separation(&d).is_empty());
    assert!(!nugget_separation(&d, SeparationForm::MaxLevel).is_empty());
}

#[test]
fn nugget_frequencies_fall_with_level() {
    let torus = Torus::new(20);
    let zero = cluster_statistics(20, 0.0, &torus, 20, 6, 1);
    assert!(zero.nuggets_per_sample.is_empty());
    let s = cluster_statistics(500, 0.02, &torus, 20, 6, 1);
    assert_eq!(s.lemma_violations, 0);
    let f = |n: usize| s.nuggets_per_sample.get(n).copied().unwrap_or(0.0);
    assert!(f(1) < f(0), "{:?}", s.nuggets_per_sample);
}

/// Hierarchical clumps: each level doubles the blob with an offset of up
/// to Q^j/4, plus strays at random distances.
fn clumpy(rng: &mut ChaCha8Rng, q: i32, levels: u32, centers: usize) -> Vec<SpacetimePoint> {
    let mut out = Vec::new();
    for _ in 0..centers {
        let c = pt(rng.gen_range(0..400_000), rng.gen_range(0..400_000), rng.gen_range(0..400_000));
        let mut blob = vec![c];
        let top = rng.gen_range(0..=levels);
        for j in 1..=top {
            let r = q.pow(j) / 4;
            let (dx, dy, dt) = (rng.gen_range(-r..=r), rng.gen_range(-r..=r), rng.gen_range(-r..=r));
            let copy: Vec<SpacetimePoint> = blob.iter().map(|p| pt(p.x + dx, p.y + dy, p.t + dt)).collect();
            blob.extend(copy);
        }
        for _ in 0..rng.gen_range(0..3) {
            let r = q.pow(rng.gen_range(0..=levels)) * 2;
            blob.push(pt(c.x + rng.gen_range(-r..=r), c.y + rng.gen_range(-r..=r), c.t + rng.gen_range(-r..=r)));
        }
        out.extend(blob);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn linking_properties_hold_for_large_q(seed in any::<u64>(), q in 60i32..80) {
        let torus = Torus::new(1_000_000);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = clumpy(&mut rng, q, 2, 3);
        let d = decompose(&torus, &pts, q as u32);
        prop_assert!(verify_nugget_separation(&d).is_empty());
        let clusters = clusters_from_decomposition(&d);
        let trees = build_linked_trees(&torus, &clusters, q as u32);
        let report = check_linking(&torus, &clusters, &trees, q as u32);
        // the one-larger and one-per-size clauses are checked separately below
        prop_assert!(report.equal_level_links.is_empty(), "{:?}", report);
        prop_assert!(report.shared_roots.is_empty(), "{:?}", report);
        prop_assert!(report.oversized.is_empty(), "{:?}", report);
        prop_assert!(report.close_trees.is_empty(), "{:?}", report);
    }
}

#[test]
fn one_larger_link_fails_for_extended_regions() {
    // a stray site beside a level-1 nugget, both deep inside the absorbing
    // region of a distant level-3 nugget
    let q = 79;
    let torus = Torus::new(1_000_000);
    let pts = [
        pt(0, 0, 0),
        pt(55, 89, 33),
        pt(62, 81, 40),
        pt(20341, -105473, 224006),
        pt(20343, -105467, 224000),
        pt(21233, -106645, 224785),
        pt(21235, -106639, 224779),
        pt(193742, -231716, 99889),
        pt(193758, -231699, 99878),
        pt(194410, -233126, 99329),
        pt(194426, -233109, 99318),
    ];
    let d = decompose(&torus, &pts, q);
    assert!(verify_nugget_separation(&d).is_empty());
    let clusters = clusters_from_decomposition(&d);
    let levels: Vec<u32> = clusters.iter().map(|c| c.level).collect();
    assert_eq!(levels, [0, 1, 3]);
    let trees = build_linked_trees(&torus, &clusters, q);
    let report = check_linking(&torus, &clusters, &trees, q);
    assert!(report.equal_level_links.is_empty());
    assert_eq!(report.multiple_larger, [0], "{report:?}");
}

#[test]
fn one_link_per_size_fails_for_extended_regions() {
    // two isolated sites on opposite sides of a level-2 nugget both sit
    // within 2(Q^0+2) of its absorbing region
    let q = 61;
    let torus = Torus::new(1_000_000);
    let big = [pt(0, 0, 0), pt(8, 10, 8), pt(316, -295, 293), pt(324, -285, 301)];
    let mut pts = big.to_vec();
    pts.push(pt(263, -372, 203));
    pts.push(pt(275, -342, 288));
    let d = decompose(&torus, &pts, q);
    assert!(verify_nugget_separation(&d).is_empty());
    let clusters = clusters_from_decomposition(&d);
    let trees = build_linked_trees(&torus, &clusters, q);
    let report = check_linking(&torus, &clusters, &trees, q);
    assert!(report.equal_level_links.is_empty() && report.multiple_larger.is_empty());
    assert_eq!(report.crowded_regions.len(), 1, "{report:?}");
}

#[test]
fn constant_table() {
    let r = constants_report();
    assert_eq!(r.rows.len(), 9);
    assert_eq!(minimal_q("tree-separation-diameter"), Ok(45));
    let known: Vec<_> = r.discrepancies.iter().filter(|d| d.known).collect();
    assert_eq!(known.len(), 2);
    let unexpected: Vec<_> = r.rows.iter().filter(|row| !row.agrees).map(|row| row.id.as_str()).collect();
    assert_eq!(unexpected, vec!["tree-separation-diameter"]);
}
