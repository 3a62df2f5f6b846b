//! Named verification suites.

use serde::Serialize;
use serde_json::{json, Value};

use super::{run_memory, RunConfig};
use crate::algebra::{complete_fusion_rules, Charge, FusionTable};
use crate::chunks::constants::constants_report;
use crate::decoder::trial::{isolated_cluster_trial, TrialOutcome};
use crate::chunks::{brute_force_levels, decompose_errors, verify_nugget_separation};
use crate::geometry::Torus;
use crate::lab::checks::{check_global_conjugation, check_spectrum, expected_spectrum, identity_suite};
use crate::lab::stabilizers::{LabLattice, Site, StabilizerKind};
use crate::spacetime::{sample_errors, FaultAlphabet};

pub const SUITES: [&str; 5] = ["algebra", "stabilizers", "chunks", "constants", "pipeline"];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

fn check(name: &str, pass: bool, detail: Value) -> Check {
    Check {
        name: name.to_string(),
        pass,
        detail,
    }
}

/// `None` for an unknown suite name.
pub fn run_suite(name: &str) -> Option<SuiteReport> {
    let checks = match name {
        "algebra" => algebra(),
        "stabilizers" => stabilizers(),
        "chunks" => chunks(),
        "constants" => constants(),
        "pipeline" => pipeline(),
        _ => return None,
    };
    Some(SuiteReport {
        suite: name.to_string(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}

fn algebra() -> Vec<Check> {
    let solutions = complete_fusion_rules().len();
    let t = FusionTable::global();
    let dims: u32 = Charge::ALL.iter().map(|c| c.quantum_dim().pow(2)).sum();
    vec![
        check("unique completion", solutions == 1, json!({ "solutions": solutions })),
        check("commutativity", t.commutativity_violations().is_empty(), json!(t.commutativity_violations().len())),
        check("unit", t.unit_violations().is_empty(), json!(t.unit_violations().len())),
        check("dimensions", t.dimension_violations().is_empty(), json!(t.dimension_violations().len())),
        check("associativity", t.associativity_violations().is_empty(), json!(t.associativity_violations().len())),
        check("total dimension", dims == 36, json!(dims)),
    ]
}

fn stabilizers() -> Vec<Check> {
    let mut out = Vec::new();
    let lat = LabLattice::torus(2, 2);
    match identity_suite(&lat, 3, 7) {
        Ok(rs) => {
            let worst = rs.iter().map(|r| r.residual).fold(0.0, f64::max);
            let failed: Vec<String> = rs.iter().filter(|r| !r.pass).map(|r| format!("{} {}", r.id, r.placement)).collect();
            out.push(check("commutation identities", failed.is_empty(), json!({ "cases": rs.len(), "maxResidual": worst, "failed": failed })));
        }
        Err(e) => out.push(check("commutation identities", false, json!(e.to_string()))),
    }
    for kind in StabilizerKind::ALL.into_iter().filter(|&k| expected_spectrum(k).is_some()) {
        let site = match kind {
            StabilizerKind::Alpha | StabilizerKind::SV => Site::Vertex(0, 0),
            StabilizerKind::Beta | StabilizerKind::SP => Site::Plaquette(0, 0),
            _ => Site::Pair { vertex: (0, 0), plaquette: (0, 0) },
        };
        let name = format!("spectrum {}", kind.name());
        match check_spectrum(kind, site, &LabLattice::patch(1, 1)) {
            Ok(r) => out.push(check(&name, r.pass, json!({ "eigenvalues": r.eigenvalues, "expected": r.expected }))),
            Err(e) => out.push(check(&name, false, json!(e.to_string()))),
        }
    }
    match check_global_conjugation(&LabLattice::torus(2, 1), 2, 3) {
        Ok(r) => out.push(check("global conjugation", r.residual < 1e-10 && r.beta_invariance < 1e-10, json!(r))),
        Err(e) => out.push(check("global conjugation", false, json!(e.to_string()))),
    }
    out
}

fn chunks() -> Vec<Check> {
    use rand::SeedableRng;
    let torus = Torus::new(12);
    let alphabet = FaultAlphabet::default();
    let (mut violations, mut mismatches, mut inexact) = (0, 0, 0);
    for s in 0..40u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
        let e = sample_errors(0.01, &torus, 12, &alphabet, &mut rng);
        let d = decompose_errors(&torus, &e, 6);
        violations += verify_nugget_separation(&d).len();
        inexact += usize::from(!d.exact);
        if e.weight() <= 10 && d.level_of != brute_force_levels(&torus, &d.sites, 6) {
            mismatches += 1;
        }
    }
    vec![
        check("nugget separation", violations == 0, json!(violations)),
        check("levels match enumeration", mismatches == 0, json!(mismatches)),
        check("exact decompositions", inexact == 0, json!(inexact)),
    ]
}

fn constants() -> Vec<Check> {
    let r = constants_report();
    let flagged = ["link-one-larger", "isolated-lifetime"]
        .iter()
        .all(|id| r.discrepancies.iter().any(|d| d.id == *id && d.known));
    let mut out: Vec<Check> = r
        .rows
        .iter()
        .map(|row| {
            check(
                &row.id,
                row.agrees,
                json!({ "statedQ": row.stated_q, "searchedQ": row.searched_q, "inequality": row.inequality }),
            )
        })
        .collect();
    out.push(check("known discrepancies flagged", flagged, json!(r.discrepancies)));
    out
}

fn pipeline() -> Vec<Check> {
    let quiet = RunConfig {
        shots: 20,
        ..RunConfig::default()
    };
    let noisy = RunConfig {
        eps: 1e-4,
        shots: 50,
        ..RunConfig::default()
    };
    let mut out = Vec::new();
    for (name, cfg, limit) in [("noiseless memory", quiet, 0.0), ("low-noise memory", noisy, 0.2)] {
        match run_memory(&cfg) {
            Ok(r) => out.push(check(name, r.fail_rate <= limit, json!({ "failRate": r.fail_rate, "shots": cfg.shots }))),
            Err(e) => out.push(check(name, false, json!(e.to_string()))),
        }
    }
    for flip in [false, true] {
        let trials: Vec<TrialOutcome> = (0..=6)
            .flat_map(|d| (0..10u64).map(move |s| isolated_cluster_trial(24, d, 7919 * s + d as u64, flip)))
            .collect();
        let bad: Vec<&TrialOutcome> = trials.iter().filter(|o| !o.within(5 * (o.diameter + 2), 4 * o.diameter + 7)).collect();
        let name = if flip { "engineered clusters with a flip" } else { "engineered clusters" };
        out.push(check(name, bad.is_empty(), json!({ "trials": trials.len(), "failed": bad })));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_none() {
        assert!(run_suite("nope").is_none());
    }

    #[test]
    fn algebra_suite_passes() {
        let r = run_suite("algebra").expect("known");
        assert!(r.pass, "{}", serde_json::to_string(&r).unwrap());
    }

    #[test]
    fn pipeline_suite_passes() {
        assert!(run_suite("pipeline").expect("known").pass);
    }
}
