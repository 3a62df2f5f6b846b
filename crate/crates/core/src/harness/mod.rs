//! Memory experiments: encode a bit, run noisy rounds under the decoder,
//! flush, match η, read out.

mod config;
mod plot;
pub mod verify;

pub use config::{parse_config, parse_grid, ConfigError};
pub use plot::svg_chart;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{global_eta_decode, ClosedWall, DecoderState};
use crate::geometry::{Coord, Torus};
use crate::sim::FrameState;
use crate::spacetime::{cube_failure_prob, sample_errors, Fault, FaultAlphabet, FaultTag};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(rename = "L")]
    pub l: i32,
    #[serde(rename = "T")]
    pub t: i32,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// Analysis scale; recorded with the results, unused by the decoder.
    #[serde(rename = "Q")]
    pub q: u32,
    pub d: i32,
    pub shots: usize,
    #[serde(alias = "masterSeed")]
    pub seed: u64,
    #[serde(alias = "etaEmission")]
    pub eta_emission: bool,
    #[serde(alias = "measurementNoise")]
    pub measurement_noise: bool,
    /// Open short-lived 2×2 walls every 4 rounds.
    pub boundaries: bool,
    /// Restrict faults to these kinds (all when empty).
    pub faults: Vec<FaultTag>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            l: 8,
            t: 8,
            eps: 0.0,
            n: 10,
            q: 6,
            d: 4,
            shots: 100,
            seed: 1,
            eta_emission: true,
            measurement_noise: true,
            boundaries: false,
            faults: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.d < 4 {
            return bad("d must be at least 4");
        }
        if self.l < 2 * self.d {
            return bad("L must be at least 2d");
        }
        if self.shots == 0 {
            return bad("shots must be at least 1");
        }
        if self.t < 0 || self.n == 0 || !(0.0..=1.0).contains(&self.eps) {
            return bad("need T >= 0, N >= 1 and eps in [0, 1]");
        }
        Ok(())
    }

    /// Probability that a unit cube fails.
    pub fn cube_p(&self) -> f64 {
        cube_failure_prob(self.eps, self.n)
    }

    fn alphabet(&self) -> FaultAlphabet {
        let mut kinds = if self.faults.is_empty() { FaultTag::ALL.to_vec() } else { self.faults.clone() };
        if !self.measurement_noise {
            kinds.retain(|&k| k != FaultTag::MeasFlip);
        }
        FaultAlphabet::only(&kinds)
    }

    /// Pair A along x, pair B half the torus away in y.
    pub fn positions(&self) -> [Coord; 4] {
        let h = self.l / 2;
        [(1, 1), (1 + self.d, 1), (1, 1 + h), (1 + self.d, 1 + h)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShotOutcome {
    pub shot: usize,
    pub bit_in: u8,
    pub bit_out: Option<u8>,
    pub failure: bool,
    pub reason: Option<String>,
    pub faults: usize,
    pub clusters: usize,
    pub max_level: u32,
    pub max_region: usize,
    /// Wall-clock time; left out of the serialized report.
    #[serde(skip)]
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub config: RunConfig,
    pub shots: Vec<ShotOutcome>,
    pub failures: usize,
    pub fail_rate: f64,
    pub ci: (f64, f64),
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn mean_max_level(&self) -> f64 {
        self.shots.iter().map(|s| s.max_level as f64).sum::<f64>() / self.shots.len() as f64
    }

    pub fn mean_runtime_ms(&self) -> f64 {
        self.shots.iter().map(|s| s.runtime_ms).sum::<f64>() / self.shots.len() as f64
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(failures: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let (k, n) = (failures as f64, n as f64);
    let p = k / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if failures as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Independent stream per shot.
pub fn shot_rng(seed: u64, shot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot as u64);
    rng
}

pub fn run_shot(cfg: &RunConfig, shot: usize) -> ShotOutcome {
    replay_shot(cfg, shot).0
}

/// One shot plus the decoder that ran it, for action logs.
pub fn replay_shot(cfg: &RunConfig, shot: usize) -> (ShotOutcome, DecoderState) {
    let start = Instant::now();
    let mut rng = shot_rng(cfg.seed, shot);
    let torus = Torus::new(cfg.l);
    let mut frame = FrameState::new(torus);
    frame.eta_emission = if cfg.eta_emission { 0.5 } else { 0.0 };
    let mut decoder = DecoderState::new(torus);
    let bit = (shot % 2) as u8;
    let mut out = ShotOutcome {
        shot,
        bit_in: bit,
        bit_out: None,
        failure: true,
        reason: None,
        faults: 0,
        clusters: 0,
        max_level: 0,
        max_region: 0,
        runtime_ms: 0.0,
    };
    if let Err(e) = frame.encode_logical(cfg.positions(), bit, cfg.d) {
        out.reason = Some(e.to_string());
        return (out, decoder);
    }
    let errors = sample_errors(cfg.cube_p(), &torus, cfg.t, &cfg.alphabet(), &mut rng);
    out.faults = errors.weight();
    let mut walls: Vec<(u32, i32)> = Vec::new();
    let mut closed: Vec<ClosedWall> = Vec::new();
    for t in 0..=cfg.t {
        let now: Vec<&Fault> = errors.at_time(t).collect();
        for f in now.iter().filter(|f| !f.is_measurement()) {
            frame.apply_fault(f);
        }
        if cfg.boundaries {
            wall_step(&mut frame, &decoder, &mut walls, &mut closed, t, &mut rng);
        }
        let flips: Vec<Fault> = now.iter().filter(|f| f.is_measurement()).map(|f| **f).collect();
        let r = frame.measure_round(t, &flips);
        decoder.step(&mut frame, &r, t, &mut rng);
        if decoder.failure.is_some() {
            break;
        }
    }
    let mut reason = decoder.failure.clone();
    if reason.is_none() {
        for (id, _) in walls.drain(..) {
            if frame.regions.contains_key(&id) && !decoder.owns_region(id) {
                close_wall(&mut frame, id, cfg.t, &mut closed, &mut rng);
            }
        }
        let t = decoder.flush(&mut frame, cfg.t + 1, &mut rng);
        reason = decoder.failure.clone();
        if reason.is_none() {
            closed.extend(decoder.closed_walls());
            let eta = global_eta_decode(&mut frame, &decoder.eta_log, &closed);
            if eta.failed() {
                reason = Some(format!("η closure: residual {}, nontrivial {}", eta.residual, eta.nontrivial));
            }
        }
        if reason.is_none() {
            match frame.readout_logical(t, &mut rng) {
                Ok(r) => {
                    out.bit_out = r.bit;
                    if r.bit != Some(bit) {
                        reason = Some(format!("readout {:?}", r.pair_charges));
                    }
                }
                Err(e) => reason = Some(e.to_string()),
            }
        }
    }
    out.failure = reason.is_some();
    out.reason = reason;
    out.clusters = decoder.stats.clusters;
    out.max_level = decoder.stats.max_tier;
    out.max_region = decoder.stats.max_region;
    out.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    (out, decoder)
}

/// Every 4 rounds a 2×2 wall opens at a random spot away from the
/// computational anyons; walls not taken over by the decoder close 2
/// rounds later.
fn wall_step(
    frame: &mut FrameState,
    decoder: &DecoderState,
    walls: &mut Vec<(u32, i32)>,
    closed: &mut Vec<ClosedWall>,
    t: i32,
    rng: &mut impl Rng,
) {
    walls.retain(|&(id, opened)| {
        if !frame.regions.contains_key(&id) || decoder.owns_region(id) {
            return false;
        }
        if t < opened + 2 {
            return true;
        }
        close_wall(frame, id, t - 1, closed, rng);
        false
    });
    if t % 4 != 1 {
        return;
    }
    let l = frame.torus.l;
    let (x, y) = (rng.gen_range(0..l), rng.gen_range(0..l));
    let plaquettes: Vec<Coord> = [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
        .into_iter()
        .map(|p| frame.torus.wrap2(p))
        .collect();
    // keep a one-plaquette gap to open regions and computational anyons
    let clear = plaquettes.iter().all(|&p| {
        let near = (0..frame.torus.sites()).filter(|&i| frame.torus.site_distance(frame.torus.coord(i), p) <= 1);
        near.into_iter().all(|i| frame.phase[i] == 0)
            && frame.designated.iter().all(|d| frame.torus.site_distance(d.site, p) > 1)
    });
    if clear {
        if let Ok(o) = frame.ungauge_region(plaquettes, t, 2, rng) {
            walls.push((o.id, t));
        }
    }
}

/// Regauge before the readings of round t + 1.
fn close_wall(frame: &mut FrameState, id: u32, t: i32, closed: &mut Vec<ClosedWall>, rng: &mut impl Rng) {
    let Ok(r) = frame.region(id) else {
        return;
    };
    let plaquettes = r.plaquettes.clone();
    let _ = frame.set_deadline(id, t);
    if frame.regauge_region(id, t, rng).is_ok() {
        closed.push(ClosedWall { t, plaquettes });
    }
}

/// Shots in parallel, folded in shot order.
pub fn run_memory(cfg: &RunConfig) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    let shots: Vec<ShotOutcome> = (0..cfg.shots).into_par_iter().map(|k| run_shot(cfg, k)).collect();
    let failures = shots.iter().filter(|s| s.failure).count();
    Ok(RunReport {
        config: cfg.clone(),
        failures,
        fail_rate: failures as f64 / shots.len() as f64,
        ci: wilson_interval(failures, shots.len()),
        shots,
    })
}

pub const CSV_HEADER: &str = "L,T,eps,N,Q,d,shots,seed,fail_rate,ci_lo,ci_hi,mean_max_level,mean_runtime_ms";

pub fn csv_row(r: &RunReport) -> String {
    let c = &r.config;
    format!(
        "{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.4},{:.3}",
        c.l,
        c.t,
        c.eps,
        c.n,
        c.q,
        c.d,
        c.shots,
        c.seed,
        r.fail_rate,
        r.ci.0,
        r.ci.1,
        r.mean_max_level(),
        r.mean_runtime_ms()
    )
}

/// One CSV row per config, in input order.
pub fn sweep(configs: &[RunConfig]) -> Result<String, ConfigError> {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in configs {
        out.push_str(&csv_row(&run_memory(c)?));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
