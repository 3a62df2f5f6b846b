//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyon_jit::algebra::{Charge, FusionTable};
use anyon_jit::chunks::constants::constants_report;
use anyon_jit::chunks::{brute_force_levels, decompose, decompose_errors, verify_nugget_separation};
use anyon_jit::decoder::trial::isolated_cluster_trial;
use anyon_jit::decoder::{global_eta_decode, DecoderState};
use anyon_jit::geometry::{Edge, SpacetimePoint, Torus};
use anyon_jit::harness::{run_memory, RunConfig};
use anyon_jit::lab::checks::{check_spectrum, check_ungauge_projection, ground_state, identity_suite};
use anyon_jit::lab::stabilizers::{LabLattice, Site, StabilizerKind};
use anyon_jit::sim::FrameState;
use anyon_jit::spacetime::{
    detectors_from_readings, sample_errors, Fault, FaultAlphabet, FaultKind, FaultTag, StabFamily, StabId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Cube probability `p` as a per-element rate for N = 10.
fn eps_for(p: f64) -> f64 {
    1.0 - (1.0 - p).powf(0.1)
}

fn fusion_ring() -> Outcome {
    let t = FusionTable::global();
    let violations = t.commutativity_violations().len()
        + t.unit_violations().len()
        + t.dimension_violations().len()
        + t.associativity_violations().len();
    let mu_mu: u32 = t.fuse(Charge::Mu, Charge::Mu).iter().map(|c| t.multiplicity(Charge::Mu, Charge::Mu, *c) * c.quantum_dim()).sum();
    let square = Charge::Mu.quantum_dim().pow(2);
    outcome(violations == 0 && mu_mu == 9 && square == 9, format!("{violations} violations, d_mu^2 = {square} = {mu_mu}"))
}

fn stabilizer_algebra() -> Outcome {
    let lat = LabLattice::patch(3, 3);
    let results = match identity_suite(&lat, 20, 11) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let worst = results.iter().map(|r| r.residual).fold(0.0, f64::max);
    let identities = results.iter().all(|r| r.pass);
    let mut off = Vec::new();
    let stabilizers = [
        (StabilizerKind::Alpha, Site::Vertex(1, 1)),
        (StabilizerKind::Beta, Site::Plaquette(1, 1)),
        (StabilizerKind::SV, Site::Vertex(1, 1)),
        (StabilizerKind::SP, Site::Plaquette(1, 1)),
    ];
    for (kind, site) in stabilizers {
        match check_spectrum(kind, site, &lat) {
            Ok(s) => {
                let values: Vec<f64> = s.eigenvalues.iter().map(|v| v.0).collect();
                let pm = values.len() == 2 && (values[0] + 1.0).abs() < 1e-9 && (values[1] - 1.0).abs() < 1e-9;
                if !pm {
                    off.push(format!("{} {:?}", kind.name(), values));
                }
            }
            Err(e) => off.push(format!("{}: {e}", kind.name())),
        }
    }
    outcome(
        identities && off.is_empty(),
        format!("{} identities, max residual {worst:.1e}; spectra not {{-1,+1}}: {off:?}", results.len()),
    )
}

fn gauging_round_trip() -> Outcome {
    let lat = LabLattice::torus(2, 2);
    let run = || -> Result<bool, anyon_jit::lab::LabError> {
        let ground = ground_state(&lat, 3)?;
        let clean = check_ungauge_projection(&lat, &ground, &vec![0; lat.edges().len()])?;
        let star = lat.vertex_edges((0, 0));
        let pattern: Vec<u8> = lat.edges().iter().map(|e| star.contains(e) as u8).collect();
        let looped = check_ungauge_projection(&lat, &ground, &pattern)?;
        Ok(clean.pass() && looped.pass() && looped.contractible)
    };
    match run() {
        Ok(pass) => outcome(pass, "clean and single-loop outcomes on the 2x2 torus"),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn detector_semantics() -> Outcome {
    let torus = Torus::new(8);
    let mut kinds = Vec::new();
    for e in [Edge::Horizontal(3, 3), Edge::Vertical(3, 3)] {
        kinds.push(FaultKind::QubitX(e));
        kinds.push(FaultKind::QubitZ(e));
        for a in 1..=2 {
            kinds.push(FaultKind::QutritX(e, a));
            kinds.push(FaultKind::QutritZ(e, a));
        }
    }
    let mut bad = Vec::new();
    for kind in kinds {
        let mut f = FrameState::new(torus);
        let mut history = Vec::new();
        for t in 0..6 {
            if t == 3 {
                f.apply(kind);
            }
            history.push(f.measure_round(t, &[]));
        }
        let s = detectors_from_readings(&torus, &history, &f.schedule).expect("consecutive rounds");
        let times: BTreeSet<i32> = s.events.iter().map(|e| e.time).collect();
        if s.events.len() != 2 || times != BTreeSet::from([3]) {
            bad.push(format!("{kind:?}: {} events at {times:?}", s.events.len()));
        }
    }
    for family in StabFamily::ALL {
        let stab = StabId::new(family, (4, 4));
        let mut f = FrameState::new(torus);
        let mut history = Vec::new();
        for t in 0..6 {
            let flips = if t == 3 { vec![Fault::new(3, FaultKind::MeasFlip(stab, 1))] } else { Vec::new() };
            history.push(f.measure_round(t, &flips));
        }
        let s = detectors_from_readings(&torus, &history, &f.schedule).expect("consecutive rounds");
        let stacked = s.events.len() == 2
            && s.events.iter().all(|e| e.stab == stab)
            && s.events.iter().map(|e| e.time).collect::<BTreeSet<_>>() == BTreeSet::from([3, 4]);
        if !stacked {
            bad.push(format!("flip {family:?}: {} events", s.events.len()));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "every fault kind and family".to_string() } else { bad.join("; ") })
}

fn chunk_decomposition() -> Outcome {
    let torus = Torus::new(20);
    let alphabet = FaultAlphabet::default();
    let violations: usize = (0..10_000u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let e = sample_errors(0.05, &torus, 20, &alphabet, &mut rng);
            verify_nugget_separation(&decompose_errors(&torus, &e, 6)).len()
        })
        .sum();
    let p = SpacetimePoint::new;
    let worked = [
        vec![p(3, 3, 3), p(5, 4, 3)],
        vec![p(0, 0, 1), p(10, 0, 1)],
        vec![p(0, 0, 1), p(2, 0, 1)],
        vec![p(0, 0, 0), p(1, 1, 1)],
    ];
    let matches = worked.iter().all(|pts| decompose(&torus, pts, 6).level_of == brute_force_levels(&torus, pts, 6));
    outcome(violations == 0 && matches, format!("{violations} separation violations over 10^4 samples; worked examples match: {matches}"))
}

fn constant_chain() -> Outcome {
    let r = constants_report();
    let off: Vec<String> = r
        .rows
        .iter()
        .filter(|row| !row.agrees)
        .map(|row| format!("{} searched {} > stated {}", row.id, row.searched_q, row.stated_q))
        .collect();
    let flagged = ["link-one-larger", "isolated-lifetime"]
        .iter()
        .all(|id| r.discrepancies.iter().any(|d| d.id == *id && d.known));
    outcome(off.is_empty() && flagged && r.rows.len() == 9, format!("{} rows, known discrepancies flagged: {flagged}; {off:?}", r.rows.len()))
}

fn isolated_clusters() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = (i32::MIN, i32::MIN);
    for flip in [false, true] {
        for d in 0..=6 {
            for k in 0..100u64 {
                let o = isolated_cluster_trial(24, d, 1_000_003 * k + 31 * d as u64 + flip as u64, flip);
                worst.0 = worst.0.max(o.rounds.unwrap_or(i32::MAX) - 5 * (d + 2));
                worst.1 = worst.1.max(o.reach - (4 * d + 7));
                if !o.within(5 * (d + 2), 4 * d + 7) {
                    bad.push(format!("d={d} flip={flip} seed {k}: {:?}", o.reason));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("1400 trials, {} outside the bounds (worst slack: time {}, reach {}) {:?}", bad.len(), -worst.0, -worst.1, bad.iter().take(3).collect::<Vec<_>>()),
    )
}

fn hiding_and_reveal() -> Outcome {
    let positions = [(2, 2), (10, 2), (2, 10), (10, 10)];
    let mut bad = Vec::new();
    let mut cases = 0;
    for bit in [0, 1] {
        for &(x, y) in &positions {
            // edges touching a corner of the computational μ's plaquette
            for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 0), (0, -1)] {
                for horizontal in [true, false] {
                    for a in 1..=2 {
                        let e = if horizontal { Edge::Horizontal(x + dx, y + dy) } else { Edge::Vertical(x + dx, y + dy) };
                        for kind in [FaultKind::QutritZ(e, a), FaultKind::QutritX(e, a)] {
                            cases += 1;
                            if let Err(why) = reveal_case(bit, kind) {
                                bad.push(format!("bit {bit} {kind:?}: {why}"));
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{cases} pair-creation cases, {} wrong {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()))
}

/// A pair created next to a computational μ (one end absorbed), decoded
/// noiselessly, then the computational pairs annihilated at readout.
fn reveal_case(bit: u8, kind: FaultKind) -> Result<(), String> {
    let torus = Torus::new(16);
    let mut f = FrameState::new(torus);
    f.encode_logical([(2, 2), (10, 2), (2, 10), (10, 10)], bit, 8).map_err(|e| e.to_string())?;
    let mut d = DecoderState::new(torus);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in 0..30 {
        if t == 3 {
            f.apply(kind);
        }
        let r = f.measure_round(t, &[]);
        d.step(&mut f, &r, t, &mut rng);
    }
    let t = d.flush(&mut f, 30, &mut rng);
    if let Some(why) = &d.failure {
        return Err(why.clone());
    }
    let eta = global_eta_decode(&mut f, &d.eta_log, &d.closed_walls());
    if eta.failed() || !f.is_quiet() {
        return Err("stabilizers not restored".into());
    }
    let out = f.readout_logical(t, &mut rng).map_err(|e| e.to_string())?;
    (out.bit == Some(bit)).then_some(()).ok_or(format!("read {:?}", out.bit))
}

fn memory_suppression() -> Outcome {
    let run = |l: i32| {
        run_memory(&RunConfig {
            l,
            t: l,
            d: l / 2,
            eps: 1e-4,
            shots: 10_000,
            seed: 2024,
            ..RunConfig::default()
        })
        .expect("valid config")
    };
    let (small, large) = (run(8), run(16));
    outcome(
        large.ci.1 < small.ci.0,
        format!(
            "eps 1e-4: L=8 {:.4} ({:.4}, {:.4}), L=16 {:.4} ({:.4}, {:.4})",
            small.fail_rate, small.ci.0, small.ci.1, large.fail_rate, large.ci.0, large.ci.1
        ),
    )
}

fn eta_global_decode() -> Outcome {
    let r = run_memory(&RunConfig {
        l: 16,
        t: 16,
        d: 8,
        eps: eps_for(1e-3),
        shots: 1000,
        seed: 77,
        boundaries: true,
        faults: vec![FaultTag::QubitZ],
        ..RunConfig::default()
    })
    .expect("valid config");
    let ok = r.shots.iter().filter(|s| !s.failure).count();
    let faults: usize = r.shots.iter().map(|s| s.faults).sum();
    outcome(ok >= 990, format!("{ok}/1000 shots closed trivially, {faults} qubitZ faults in total"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("fusion-ring exactness", fusion_ring, Duration::from_secs(1)),
        ("stabilizer algebra", stabilizer_algebra, Duration::from_secs(120)),
        ("gauging round trip", gauging_round_trip, Duration::from_secs(60)),
        ("detector semantics", detector_semantics, Duration::MAX),
        ("chunk decomposition", chunk_decomposition, Duration::from_secs(300)),
        ("constant chain", constant_chain, Duration::MAX),
        ("isolated-cluster correction", isolated_clusters, Duration::MAX),
        ("hiding and reveal", hiding_and_reveal, Duration::MAX),
        ("memory suppression", memory_suppression, Duration::from_secs(1800)),
        ("eta global decode", eta_global_decode, Duration::from_secs(600)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took <= *budget;
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {:<28} {} ({:.1}s) {}",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
