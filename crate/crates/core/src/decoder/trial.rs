//! Engineered isolated clusters on an otherwise noiseless torus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{global_eta_decode, ActionKind, DecoderState};
use crate::geometry::{Edge, SpacetimePoint, Torus};
use crate::sim::FrameState;
use crate::spacetime::{Fault, FaultKind, StabFamily, StabId};

/// Round of the first engineered fault.
const START: i32 = 2;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialOutcome {
    pub diameter: i32,
    pub faults: Vec<Fault>,
    /// Rounds from the first fault until every charge and region is gone.
    pub rounds: Option<i32>,
    /// Largest spatial distance from the cluster to an ungauged plaquette.
    pub reach: i32,
    pub reason: Option<String>,
}

impl TrialOutcome {
    pub fn within(&self, time_bound: i32, reach_bound: i32) -> bool {
        self.reason.is_none() && self.rounds.is_some_and(|r| r <= time_bound) && self.reach <= reach_bound
    }
}

fn physical(rng: &mut impl Rng, torus: &Torus, (x, y): (i32, i32)) -> FaultKind {
    let e = torus.wrap_edge(if rng.gen_bool(0.5) { Edge::Horizontal(x, y) } else { Edge::Vertical(x, y) });
    let a = rng.gen_range(1..=2);
    match rng.gen_range(0..4) {
        0 => FaultKind::QubitX(e),
        1 => FaultKind::QubitZ(e),
        2 => FaultKind::QutritX(e, a),
        _ => FaultKind::QutritZ(e, a),
    }
}

/// Faults whose locations span exactly `d` in the L∞ metric: two corners
/// of a random box plus a few points inside it, and optionally one
/// measurement flip inside the box.
pub fn engineered_cluster(torus: &Torus, d: i32, seed: u64, flip: bool) -> Vec<Fault> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x0, y0) = (rng.gen_range(0..torus.l), rng.gen_range(0..torus.l));
    let mut span = [rng.gen_range(0..=d), rng.gen_range(0..=d), rng.gen_range(0..=d)];
    span[rng.gen_range(0..3)] = d;
    let sx = if rng.gen_bool(0.5) { 1 } else { -1 };
    let sy = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut corners = vec![(0, 0, 0), (span[0], span[1], span[2])];
    for _ in 0..rng.gen_range(0..=d.min(3)) {
        corners.push((rng.gen_range(0..=span[0]), rng.gen_range(0..=span[1]), rng.gen_range(0..=span[2])));
    }
    let place = |(dx, dy, dt): (i32, i32, i32)| (torus.wrap2((x0 + sx * dx, y0 + sy * dy)), START + dt);
    let mut out: Vec<Fault> = corners
        .into_iter()
        .map(|c| {
            let (site, t) = place(c);
            Fault::new(t, physical(&mut rng, torus, site))
        })
        .collect();
    if flip {
        let c = (rng.gen_range(0..=span[0]), rng.gen_range(0..=span[1]), rng.gen_range(0..=span[2]));
        let (site, t) = place(c);
        let family = [StabFamily::Vertex, StabFamily::Plaquette, StabFamily::Alpha, StabFamily::Beta][rng.gen_range(0..4)];
        out.push(Fault::new(t, FaultKind::MeasFlip(StabId::new(family, site), rng.gen_range(1..=2))));
    }
    out
}

fn charges_quiet(frame: &FrameState) -> bool {
    let mut f = frame.clone();
    f.eta.fill(false);
    f.is_quiet()
}

/// Runs the cluster on an L×L torus with no other noise, then decodes η
/// offline. `rounds` is when the frame last became quiet with no open
/// region.
pub fn isolated_cluster_trial(l: i32, d: i32, seed: u64, flip: bool) -> TrialOutcome {
    traced_trial(l, d, seed, flip).0
}

/// The trial together with the decoder that ran it.
pub fn traced_trial(l: i32, d: i32, seed: u64, flip: bool) -> (TrialOutcome, DecoderState) {
    let torus = Torus::new(l);
    let faults = engineered_cluster(&torus, d, seed, flip);
    let mut frame = FrameState::new(torus);
    let mut decoder = DecoderState::new(torus);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let end = START + 5 * (d + 2) + 12;
    let mut quiet_at = None;
    for t in 0..=end {
        let flips: Vec<Fault> = faults.iter().filter(|f| f.t == t && f.is_measurement()).copied().collect();
        for f in faults.iter().filter(|f| f.t == t && !f.is_measurement()) {
            frame.apply_fault(f);
        }
        let r = frame.measure_round(t, &flips);
        decoder.step(&mut frame, &r, t, &mut rng);
        if decoder.failure.is_some() {
            break;
        }
        let done = t >= START + d && decoder.is_idle() && frame.regions.is_empty() && charges_quiet(&frame);
        if !done {
            quiet_at = None;
        } else if quiet_at.is_none() {
            quiet_at = Some(t);
        }
    }
    let pts: Vec<SpacetimePoint> = faults.iter().map(|f| f.location()).collect();
    let reach = decoder
        .actions
        .iter()
        .filter(|a| a.action == ActionKind::Ungauge || a.action == ActionKind::Widen)
        .flat_map(|a| a.region.iter())
        .map(|&p| pts.iter().map(|q| torus.site_distance(q.site(), p)).min().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let mut reason = decoder.failure.clone();
    if reason.is_none() {
        let eta = global_eta_decode(&mut frame, &decoder.eta_log, &decoder.closed_walls());
        if eta.failed() || !frame.is_quiet() {
            reason = Some(format!("η closure: residual {}, nontrivial {}", eta.residual, eta.nontrivial));
        } else if quiet_at.is_none() {
            reason = Some("not quiet by the end of the run".into());
        }
    }
    let out = TrialOutcome {
        diameter: d,
        faults,
        rounds: quiet_at.map(|t| t - START),
        reach,
        reason,
    };
    (out, decoder)
}
