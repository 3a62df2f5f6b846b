use anyon_jit::decoder::trial::{isolated_cluster_trial, traced_trial};
use anyon_jit::decoder::{global_eta_decode, ActionKind, DecoderState};
use anyon_jit::geometry::{Edge, Torus};
use anyon_jit::sim::FrameState;
use anyon_jit::spacetime::FaultKind;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn decoding_is_deterministic() {
    let (a, da) = traced_trial(20, 4, 17, true);
    let (b, db) = traced_trial(20, 4, 17, true);
    assert_eq!(da.actions_json_lines(), db.actions_json_lines());
    assert_eq!(a.rounds, b.rounds);
}

#[test]
fn quiet_torus_takes_no_action() {
    let torus = Torus::new(10);
    let mut f = FrameState::new(torus);
    let mut d = DecoderState::new(torus);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in 0..10 {
        let r = f.measure_round(t, &[]);
        assert!(d.step(&mut f, &r, t, &mut rng).is_empty());
    }
    assert!(d.is_idle());
}

#[test]
fn every_opened_region_is_regauged() {
    for seed in 0..20 {
        let (o, d) = traced_trial(20, 3, seed, false);
        assert!(o.reason.is_none() && o.rounds.is_some(), "{o:?}");
        let opened = d.actions.iter().any(|a| a.action == ActionKind::Ungauge);
        let closed = d.actions.iter().any(|a| a.action == ActionKind::Regauge);
        assert_eq!(opened, closed, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_isolated_cluster_is_cleaned_up(d in 0..5i32, seed in any::<u64>(), flip in any::<bool>()) {
        let o = isolated_cluster_trial(20, d, seed, flip);
        prop_assert!(o.within(5 * (d + 2), 4 * d + 7), "{:?}", o);
    }

    #[test]
    fn two_distant_faults_are_both_corrected(
        a in (0..6i32, 0..6i32, 1..3u8),
        b in (0..6i32, 0..6i32, 1..3u8),
        electric in any::<bool>(),
    ) {
        let torus = Torus::new(16);
        let mut f = FrameState::new(torus);
        let mut d = DecoderState::new(torus);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kind = |(x, y, k): (i32, i32, u8)| {
            let e = Edge::Horizontal(x, y);
            if electric { FaultKind::QutritZ(e, k) } else { FaultKind::QutritX(e, k) }
        };
        for t in 0..30 {
            if t == 2 {
                f.apply(kind(a));
                f.apply(kind((b.0 + 8, b.1 + 8, b.2)));
            }
            let r = f.measure_round(t, &[]);
            d.step(&mut f, &r, t, &mut rng);
        }
        prop_assert!(d.failure.is_none());
        let eta = global_eta_decode(&mut f, &d.eta_log, &d.closed_walls());
        prop_assert!(!eta.failed());
        prop_assert!(f.is_quiet());
    }
}
