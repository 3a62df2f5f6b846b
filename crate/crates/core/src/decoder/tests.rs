use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::Edge::{Horizontal as H, Vertical as V};
use crate::spacetime::{Fault, FaultKind};

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(11)
}

fn quiet_frame(l: i32) -> FrameState {
    let mut f = FrameState::new(Torus::new(l));
    f.eta_emission = 0.0;
    f
}

/// Runs rounds t0..t1, applying `faults` at their times. Returns the round
/// at which the decoder last went idle.
fn run(f: &mut FrameState, d: &mut DecoderState, faults: &[Fault], t0: i32, t1: i32) -> Option<i32> {
    let mut rng = rng();
    let mut idle_at = None;
    for t in t0..t1 {
        let flips: Vec<Fault> = faults.iter().filter(|x| x.t == t && x.is_measurement()).copied().collect();
        for x in faults.iter().filter(|x| x.t == t && !x.is_measurement()) {
            f.apply_fault(x);
        }
        let r = f.measure_round(t, &flips);
        d.step(f, &r, t, &mut rng);
        if d.is_idle() && f.regions.is_empty() {
            idle_at.get_or_insert(t);
        } else {
            idle_at = None;
        }
    }
    idle_at
}

#[test]
fn age_rule_waits_for_the_diameter() {
    let ev = |x, t| TrackedEvent {
        event: DetectorEvent {
            time: t,
            species: Species::E,
            stab: StabId::new(StabFamily::Vertex, (x, 0)),
            boundary: false,
            delta: 1,
        },
        point: SpacetimePoint::new(x, 0, t),
        pending: true,
    };
    let mut c = ClusterRecord::new(0, ev(2, 3));
    c.events.push(ev(5, 3));
    c.diameter = 3;
    assert!(!age_rule(&c, 5));
    assert!(age_rule(&c, 6));
    let single = ClusterRecord::new(1, ev(0, 4));
    assert!(age_rule(&single, 4));
}

#[test]
fn e_pair_is_corrected_locally() {
    let mut f = quiet_frame(12);
    let mut d = DecoderState::new(f.torus);
    let faults: Vec<Fault> = (2..5).map(|x| Fault::new(3, FaultKind::QutritZ(H(x, 2), 1))).collect();
    run(&mut f, &mut d, &faults, 0, 40);
    assert!(d.failure.is_none(), "{:?}", d.failure);
    assert!(f.is_quiet());
    let done = d.actions.iter().find(|a| a.action == ActionKind::Regauge).expect("regauged").t;
    assert!(done - 3 <= 5 * (3 + 2), "took {}", done - 3);
    let ungauge = d.actions.iter().find(|a| a.action == ActionKind::Ungauge).expect("ungauged");
    assert!(ungauge.t >= 3, "ungauged at {}", ungauge.t);
    assert!(ungauge.region.iter().all(|p| (1..=5).contains(&p.0)), "{:?}", ungauge.region);
}

#[test]
fn measurement_flip_needs_no_correction() {
    let mut f = quiet_frame(10);
    let mut d = DecoderState::new(f.torus);
    let flip = Fault::new(4, FaultKind::MeasFlip(StabId::new(StabFamily::Vertex, (5, 5)), 1));
    run(&mut f, &mut d, &[flip], 0, 20);
    assert!(d.failure.is_none());
    assert!(f.is_quiet());
    assert!(d
        .actions
        .iter()
        .filter(|a| a.action == ActionKind::Correct)
        .all(|a| a.moves.is_empty()));
}

#[test]
fn magnetic_pair_across_the_boundary() {
    let mut f = quiet_frame(8);
    let mut d = DecoderState::new(f.torus);
    let faults = [Fault::new(2, FaultKind::QutritX(V(0, 4), 2)), Fault::new(2, FaultKind::QutritX(V(7, 4), 2))];
    run(&mut f, &mut d, &faults, 0, 30);
    assert!(d.failure.is_none(), "{:?}", d.failure);
    assert!(f.is_quiet());
}

#[test]
fn eta_string_is_matched_end_to_end() {
    let mut f = quiet_frame(12);
    let mut d = DecoderState::new(f.torus);
    let faults: Vec<Fault> = (3..8).map(|x| Fault::new(2, FaultKind::QubitZ(H(x, 6)))).collect();
    run(&mut f, &mut d, &faults, 0, 6);
    assert_eq!(d.eta_log.len(), 2);
    let out = global_eta_decode(&mut f, &d.eta_log, &d.closed_walls());
    assert!(out.correction.len() <= 10);
    assert!(!out.failed());
}

#[test]
fn eta_loop_around_the_torus_is_caught() {
    let mut f = quiet_frame(6);
    for x in 0..6 {
        f.apply(FaultKind::QubitZ(H(x, 1)));
    }
    let out = global_eta_decode(&mut f, &[], &[]);
    assert_eq!(out.residual, 0);
    assert!(out.nontrivial);
}

#[test]
fn logical_one_survives_a_nearby_error() {
    let mut f = quiet_frame(16);
    f.encode_logical([(2, 2), (10, 2), (2, 10), (10, 10)], 1, 8).expect("encodes");
    let mut d = DecoderState::new(f.torus);
    let faults = [Fault::new(3, FaultKind::QutritZ(H(3, 2), 1))];
    run(&mut f, &mut d, &faults, 0, 30);
    assert!(d.failure.is_none(), "{:?}", d.failure);
    let mut rng = rng();
    let t = d.flush(&mut f, 30, &mut rng);
    assert!(d.failure.is_none(), "{:?}", d.failure);
    let out = f.readout_logical(t, &mut rng).expect("readout");
    assert_eq!(out.bit, Some(1));
}

#[test]
fn flush_closes_everything() {
    let mut f = quiet_frame(10);
    let mut d = DecoderState::new(f.torus);
    let faults = [
        Fault::new(1, FaultKind::QutritZ(V(2, 2), 2)),
        Fault::new(1, FaultKind::QutritX(H(6, 6), 1)),
        Fault::new(2, FaultKind::QubitZ(V(4, 4))),
    ];
    run(&mut f, &mut d, &faults, 0, 3);
    let mut rng = rng();
    d.flush(&mut f, 3, &mut rng);
    assert!(d.failure.is_none(), "{:?}", d.failure);
    assert!(d.is_idle() && f.regions.is_empty());
    let out = global_eta_decode(&mut f, &d.eta_log, &d.closed_walls());
    assert!(!out.failed());
    assert!(f.is_quiet());
}

#[test]
fn actions_log_as_json_lines() {
    let mut f = quiet_frame(8);
    let mut d = DecoderState::new(f.torus);
    run(&mut f, &mut d, &[Fault::new(1, FaultKind::QutritZ(H(1, 1), 1))], 0, 12);
    let text = d.actions_json_lines();
    assert!(text.lines().count() >= 3);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("json");
        assert!(v.get("clusterId").is_some() && v.get("region").is_some());
    }
}
