use std::collections::BTreeSet;

use anyon_jit::geometry::{Edge, Torus};
use anyon_jit::sim::FrameState;
use anyon_jit::spacetime::{
    detectors_from_readings, sample_errors, ErrorConfiguration, Fault, FaultAlphabet, FaultKind, FaultTag,
    StabFamily, StabId,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn fault_count_is_binomial() {
    let torus = Torus::new(10);
    let (p, rounds, samples) = (0.02, 10, 400);
    let n = (torus.sites() as i32 * rounds) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let total: usize = (0..samples)
        .map(|_| sample_errors(p, &torus, rounds, &FaultAlphabet::default(), &mut rng).weight())
        .sum();
    let mean = total as f64 / samples as f64;
    // standard error of the sample mean
    let se = (n * p * (1.0 - p) / samples as f64).sqrt();
    assert!((mean - n * p).abs() < 4.0 * se, "mean {mean}, expected {}", n * p);
}

#[test]
fn restricted_alphabet_draws_only_its_kinds() {
    let torus = Torus::new(8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let e = sample_errors(0.2, &torus, 8, &FaultAlphabet::only(&[FaultTag::QubitZ]), &mut rng);
    assert!(e.weight() > 0);
    assert!(e.faults.iter().all(|f| f.kind.tag() == FaultTag::QubitZ));
}

#[test]
fn sampled_configurations_survive_text() {
    let torus = Torus::new(8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let e = sample_errors(0.05, &torus, 8, &FaultAlphabet::default(), &mut rng);
    assert_eq!(ErrorConfiguration::from_text(&e.to_text()).unwrap(), e);
}

fn events_for(l: i32, apply: impl Fn(&mut FrameState, i32) -> Vec<Fault>) -> Vec<(i32, StabId)> {
    let torus = Torus::new(l);
    let mut f = FrameState::new(torus);
    let history: Vec<_> = (0..8)
        .map(|t| {
            let flips = apply(&mut f, t);
            f.measure_round(t, &flips)
        })
        .collect();
    detectors_from_readings(&torus, &history, &f.schedule)
        .unwrap()
        .events
        .into_iter()
        .map(|e| (e.time, e.stab))
        .collect()
}

fn physical() -> impl Strategy<Value = FaultKind> {
    let edge = (0..8, 0..8, any::<bool>()).prop_map(|(x, y, h)| if h { Edge::Horizontal(x, y) } else { Edge::Vertical(x, y) });
    (edge, 0..4u8, 1..3u8).prop_map(|(e, k, a)| match k {
        0 => FaultKind::QubitX(e),
        1 => FaultKind::QubitZ(e),
        2 => FaultKind::QutritX(e, a),
        _ => FaultKind::QutritZ(e, a),
    })
}

proptest! {
    #[test]
    fn single_fault_gives_two_simultaneous_events(kind in physical(), at in 1..7i32) {
        let events = events_for(8, |f, t| {
            if t == at {
                f.apply(kind);
            }
            Vec::new()
        });
        prop_assert_eq!(events.len(), 2);
        prop_assert!(events.iter().all(|e| e.0 == at));
    }

    #[test]
    fn measurement_flip_is_stacked_in_time(x in 0..8i32, y in 0..8i32, fam in 0..4usize, at in 1..7i32) {
        let stab = StabId::new(StabFamily::ALL[fam], (x, y));
        let events = events_for(8, |_, t| {
            if t == at { vec![Fault::new(t, FaultKind::MeasFlip(stab, 1))] } else { Vec::new() }
        });
        let times: BTreeSet<i32> = events.iter().map(|e| e.0).collect();
        prop_assert_eq!(times, BTreeSet::from([at, at + 1]));
        prop_assert!(events.iter().all(|e| e.1 == stab));
    }
}
