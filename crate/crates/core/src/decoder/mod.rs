//! Just-in-time decoder.
//!
//! Each round the decoder compares readings with the last accepted value
//! of every stabilizer. Changes become events; events cluster by
//! single-linkage with doubling radii. A cluster waits (its readings are
//! flipped back, so the change is seen again next round) until every event
//! is as old as the cluster's diameter. Then its bounding box, grown by 1,
//! is ungauged. After a dwell of diameter + 2 rounds the ℤ₃ readings in the
//! region are paired up and corrected and the region is regauged, or the
//! region grows by the next tier if its content is not neutral.
//!
//! η events are only logged; they are matched globally at the end.

mod eta;
mod plan;
pub mod trial;

pub use eta::{global_eta_decode, ClosedWall, EtaOutcome};
pub use plan::plan_correction;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use crate::geometry::{Coord, SpacetimePoint, Torus};
use crate::sim::{box_around, CorrectionMove, FrameState, SimError};
use crate::spacetime::{DetectorEvent, Reading, RoundReadings, Species, StabFamily, StabId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ClusterStatus {
    Deferred,
    Ripe,
    Ungauged(u32),
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrackedEvent {
    pub event: DetectorEvent,
    pub point: SpacetimePoint,
    /// Still waiting outside any region; its reading is being held back.
    pub pending: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterRecord {
    pub id: usize,
    pub events: Vec<TrackedEvent>,
    pub birth: i32,
    pub last_growth: i32,
    /// L∞ spacetime diameter of the initial detections.
    pub diameter: i32,
    pub status: ClusterStatus,
    /// Escalation tier; raises the linking radius.
    pub tier: u32,
    pub linked_absorber: Option<u32>,
}

impl ClusterRecord {
    fn new(id: usize, ev: TrackedEvent) -> ClusterRecord {
        ClusterRecord {
            id,
            events: vec![ev],
            birth: ev.point.t,
            last_growth: ev.point.t,
            diameter: 0,
            status: ClusterStatus::Deferred,
            tier: 0,
            linked_absorber: None,
        }
    }

    fn region(&self) -> Option<u32> {
        match self.status {
            ClusterStatus::Ungauged(r) => Some(r),
            _ => None,
        }
    }

    fn points(&self) -> Vec<SpacetimePoint> {
        self.events.iter().map(|e| e.point).collect()
    }

    fn pending(&self) -> impl Iterator<Item = &TrackedEvent> {
        self.events.iter().filter(|e| e.pending)
    }
}

/// Every event at least as old as the cluster's diameter.
pub fn age_rule(cluster: &ClusterRecord, t: i32) -> bool {
    cluster.events.iter().all(|e| t - e.point.t >= cluster.diameter)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ActionKind {
    Defer,
    Ungauge,
    Correct,
    Regauge,
    Widen,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Action {
    pub t: i32,
    pub cluster_id: usize,
    pub action: ActionKind,
    pub region: Vec<Coord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<CorrectionMove>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecoderConfig {
    /// Extra dwell rounds on top of the cluster diameter.
    pub dwell_extra: i32,
    /// At the end of a run: commit everything at once, no dwell.
    pub flush: bool,
    /// Linking radius at tier k is 2^(base_tier + k).
    pub base_tier: u32,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            dwell_extra: 2,
            flush: false,
            base_tier: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecoderStats {
    pub clusters: usize,
    pub max_tier: u32,
    pub max_region: usize,
}

fn family_slot(f: StabFamily) -> usize {
    match f {
        StabFamily::Alpha => 0,
        StabFamily::Beta => 1,
        StabFamily::Vertex => 2,
        StabFamily::Plaquette => 3,
    }
}

pub struct DecoderState {
    pub torus: Torus,
    pub config: DecoderConfig,
    pub clusters: BTreeMap<usize, ClusterRecord>,
    pub closed: Vec<ClusterRecord>,
    next_id: usize,
    accepted: [Vec<Option<Reading>>; 4],
    gap: [Vec<bool>; 4],
    /// Stabilizer → cluster holding its pending event.
    pending: BTreeMap<StabId, usize>,
    pub eta_log: Vec<DetectorEvent>,
    pub actions: Vec<Action>,
    prev: Option<RoundReadings>,
    /// Set when the decoder gives up (region would span the torus or hold
    /// two computational anyons).
    pub failure: Option<String>,
    pub stats: DecoderStats,
}

impl DecoderState {
    pub fn new(torus: Torus) -> DecoderState {
        let n = torus.sites();
        DecoderState {
            torus,
            config: DecoderConfig::default(),
            clusters: BTreeMap::new(),
            closed: Vec::new(),
            next_id: 0,
            accepted: std::array::from_fn(|_| vec![None; n]),
            gap: std::array::from_fn(|_| vec![false; n]),
            pending: BTreeMap::new(),
            eta_log: Vec::new(),
            actions: Vec::new(),
            prev: None,
            failure: None,
            stats: DecoderStats::default(),
        }
    }

    pub fn is_idle(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Regions this decoder regauged, for the η matcher.
    pub fn closed_walls(&self) -> Vec<ClosedWall> {
        self.actions
            .iter()
            .filter(|a| a.action == ActionKind::Regauge)
            .map(|a| ClosedWall {
                t: a.t,
                plaquettes: a.region.iter().copied().collect(),
            })
            .collect()
    }

    pub fn owns_region(&self, region: u32) -> bool {
        self.cluster_of_region(region).is_some()
    }

    pub fn actions_json_lines(&self) -> String {
        self.actions
            .iter()
            .map(|a| serde_json::to_string(a).expect("action serializes") + "\n")
            .collect()
    }

    fn shifted(frame: &FrameState, s: StabId, r: Reading, t: i32) -> Reading {
        match r {
            Reading::Binary(v) => Reading::Binary((v + frame.schedule.expected(s, t)) % 2),
            other => other,
        }
    }

    /// Changes against the accepted readings. Baselines of α and of
    /// stabilizers inside regions move immediately; others are left for
    /// the clustering to decide.
    fn detect(&mut self, frame: &FrameState, r: &RoundReadings, t: i32) -> (Vec<DetectorEvent>, BTreeSet<StabId>) {
        let mut fresh = Vec::new();
        let mut quiet = BTreeSet::new();
        for family in StabFamily::ALL {
            let slot = family_slot(family);
            for i in 0..self.torus.sites() {
                let stab = StabId::new(family, self.torus.coord(i));
                let cur = Self::shifted(frame, stab, r.family(family)[i], t);
                let v = match cur {
                    Reading::Absent => {
                        self.gap[slot][i] = true;
                        continue;
                    }
                    Reading::Masked => continue,
                    Reading::Binary(v) | Reading::Ternary(v) => v,
                };
                let Some(prev) = self.accepted[slot][i] else {
                    self.accepted[slot][i] = Some(cur);
                    continue;
                };
                let p = prev.value().expect("accepted readings carry values");
                let same_kind = std::mem::discriminant(&prev) == std::mem::discriminant(&cur);
                let changed = if same_kind { p != v } else { (p != 0) != (v != 0) };
                let boundary = !same_kind || self.gap[slot][i];
                self.gap[slot][i] = false;
                if !changed {
                    if !same_kind {
                        self.accepted[slot][i] = Some(cur);
                    }
                    quiet.insert(stab);
                    continue;
                }
                let modulus = if matches!(cur, Reading::Ternary(_)) { 3 } else { 2 };
                let ev = DetectorEvent {
                    time: t,
                    species: family.species(),
                    stab,
                    boundary,
                    delta: if same_kind { (v + modulus - p) % modulus } else { v },
                };
                if family == StabFamily::Alpha {
                    self.eta_log.push(ev);
                    self.accepted[slot][i] = Some(cur);
                } else {
                    fresh.push(ev);
                }
            }
        }
        (fresh, quiet)
    }

    fn accept(&mut self, frame: &FrameState, s: StabId, r: &RoundReadings, t: i32) {
        let i = self.torus.index(s.site);
        let cur = Self::shifted(frame, s, r.family(s.family)[i], t);
        if cur.value().is_some() {
            self.accepted[family_slot(s.family)][i] = Some(cur);
        }
    }

    fn set_accepted(&mut self, s: StabId, v: Reading) {
        let i = self.torus.index(s.site);
        self.accepted[family_slot(s.family)][i] = Some(v);
    }

    fn event_region(&self, frame: &FrameState, ev: &DetectorEvent) -> Option<u32> {
        let s = ev.stab.site;
        match ev.stab.family {
            StabFamily::Vertex => self
                .torus
                .vertex_plaquettes(s)
                .iter()
                .map(|&p| frame.phase[self.torus.index(p)])
                .find(|&id| id != 0),
            _ => Some(frame.phase[self.torus.index(s)]).filter(|&id| id != 0),
        }
    }

    fn cluster_of_region(&self, region: u32) -> Option<usize> {
        self.clusters.values().find(|c| c.region() == Some(region)).map(|c| c.id)
    }

    fn region_distance(&self, frame: &FrameState, region: u32, site: Coord) -> i32 {
        frame
            .regions
            .get(&region)
            .map(|r| r.plaquettes.iter().map(|&p| self.torus.site_distance(p, site)).min().unwrap_or(i32::MAX))
            .unwrap_or(i32::MAX)
    }

    /// Clusters in linking range of a point.
    fn in_range(&self, frame: &FrameState, pt: SpacetimePoint) -> Vec<usize> {
        let radius = |c: &ClusterRecord| 1i32 << (self.config.base_tier + c.tier).min(20);
        self.clusters
            .values()
            .filter(|c| match c.region() {
                // only events straddling the wall join an open region
                Some(r) => self.region_distance(frame, r, pt.site()) <= 1,
                None => c.events.iter().any(|e| self.torus.distance(e.point, pt) <= radius(c)),
            })
            .map(|c| c.id)
            .collect()
    }

    /// Merges clusters into the oldest one (lowest id on ties).
    fn merge(
        &mut self,
        frame: &mut FrameState,
        ids: &[usize],
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<usize, SimError> {
        let keep = *ids
            .iter()
            .min_by_key(|&&id| (self.clusters[&id].birth, id))
            .expect("nonempty merge");
        for &id in ids {
            if id == keep {
                continue;
            }
            let other = self.clusters.remove(&id).expect("active cluster");
            let region_a = self.clusters[&keep].region();
            let region = match (region_a, other.region()) {
                (Some(a), Some(b)) => {
                    let plaquettes: Vec<Coord> = frame.region(b)?.plaquettes.iter().copied().collect();
                    frame.extend_region(a, plaquettes, t, rng)?;
                    Some(a)
                }
                (a, b) => a.or(b),
            };
            for e in &other.events {
                if e.pending {
                    self.pending.insert(e.event.stab, keep);
                }
            }
            let c = self.clusters.get_mut(&keep).expect("kept cluster");
            c.events.extend(other.events);
            c.birth = c.birth.min(other.birth);
            c.last_growth = c.last_growth.max(other.last_growth);
            c.tier = c.tier.max(other.tier);
            if let Some(r) = region {
                c.status = ClusterStatus::Ungauged(r);
            }
        }
        let c = self.clusters.get_mut(&keep).expect("kept cluster");
        c.diameter = self.torus.diameter(&c.points());
        if c.region().is_none() {
            c.status = ClusterStatus::Deferred;
        }
        Ok(keep)
    }

    /// Attaches new events to clusters.
    pub fn cluster_events(
        &mut self,
        frame: &mut FrameState,
        events: &[DetectorEvent],
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<(), SimError> {
        for ev in events {
            let point = SpacetimePoint::new(ev.stab.site.0, ev.stab.site.1, ev.time);
            let inside = self.event_region(frame, ev);
            let tracked = TrackedEvent {
                event: *ev,
                point,
                pending: inside.is_none(),
            };
            let mut ids = self.in_range(frame, point);
            if let Some(c) = inside.and_then(|r| self.cluster_of_region(r)) {
                if !ids.contains(&c) {
                    ids.push(c);
                }
            }
            let id = self.next_id;
            self.next_id += 1;
            self.stats.clusters += 1;
            self.clusters.insert(id, ClusterRecord::new(id, tracked));
            if let Some(r) = inside {
                // a region with no cluster (e.g. opened by hand) adopts it
                if self.cluster_of_region(r).is_none() {
                    self.clusters.get_mut(&id).expect("new").status = ClusterStatus::Ungauged(r);
                }
            }
            if tracked.pending {
                self.pending.insert(ev.stab, id);
            }
            ids.push(id);
            let keep = self.merge(frame, &ids, t, rng)?;
            let c = self.clusters.get_mut(&keep).expect("kept");
            if let Some(r) = c.region() {
                if !tracked.pending {
                    let deadline = frame.region(r)?.dwell_deadline.max(t + self.config.dwell_extra);
                    frame.set_deadline(r, deadline)?;
                }
            }
        }
        Ok(())
    }

    /// One decoding round on the readings of round t.
    pub fn step(
        &mut self,
        frame: &mut FrameState,
        readings: &RoundReadings,
        t: i32,
        rng: &mut impl Rng,
    ) -> Vec<Action> {
        let start = self.actions.len();
        if self.failure.is_none() {
            if let Err(e) = self.step_inner(frame, readings, t, rng) {
                self.failure = Some(e.to_string());
            }
        }
        self.prev = Some(readings.clone());
        self.actions[start..].to_vec()
    }

    fn step_inner(
        &mut self,
        frame: &mut FrameState,
        readings: &RoundReadings,
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<(), SimError> {
        let (fresh, quiet) = self.detect(frame, readings, t);

        // pending events whose reading came back: measurement errors
        let continuing: BTreeSet<StabId> = fresh.iter().map(|e| e.stab).collect();
        let vanished: Vec<StabId> = self
            .pending
            .keys()
            .filter(|s| quiet.contains(s) && !continuing.contains(s))
            .copied()
            .collect();
        for s in vanished {
            let cid = self.pending.remove(&s).expect("pending");
            if let Some(c) = self.clusters.get_mut(&cid) {
                c.events.retain(|e| !(e.pending && e.event.stab == s));
                c.diameter = self.torus.diameter(&c.points());
            }
        }
        let emptied: Vec<usize> = self
            .clusters
            .values()
            .filter(|c| c.events.is_empty() && c.region().is_none())
            .map(|c| c.id)
            .collect();
        for id in emptied {
            let mut c = self.clusters.remove(&id).expect("cluster");
            c.status = ClusterStatus::Closed;
            self.closed.push(c);
        }

        let new: Vec<DetectorEvent> = fresh.into_iter().filter(|e| !self.pending.contains_key(&e.stab)).collect();
        for ev in &new {
            if self.event_region(frame, ev).is_some() {
                self.accept(frame, ev.stab, readings, t);
            }
        }
        self.cluster_events(frame, &new, t, rng)?;

        let ids: Vec<usize> = self.clusters.keys().copied().collect();
        for id in ids {
            if !self.clusters.contains_key(&id) {
                continue;
            }
            self.advance(frame, id, readings, t, rng)?;
            if self.failure.is_some() {
                break;
            }
        }
        Ok(())
    }

    fn log(&mut self, t: i32, cluster_id: usize, action: ActionKind, region: Vec<Coord>, moves: Vec<CorrectionMove>) {
        self.actions.push(Action {
            t,
            cluster_id,
            action,
            region,
            moves,
        });
    }

    /// Pending events are ripe when each is as old as the cluster diameter
    /// (or, next to an open region, its distance to that region).
    fn pending_ripe(&self, frame: &FrameState, c: &ClusterRecord, t: i32) -> bool {
        if self.config.flush {
            return true;
        }
        match c.region() {
            None => age_rule(c, t),
            Some(r) => {
                let pts: Vec<SpacetimePoint> = c.pending().map(|e| e.point).collect();
                let reach = pts.iter().map(|p| self.region_distance(frame, r, p.site())).max().unwrap_or(0);
                let need = self.torus.diameter(&pts).max(reach);
                pts.iter().all(|p| t - p.t >= need)
            }
        }
    }

    fn advance(
        &mut self,
        frame: &mut FrameState,
        id: usize,
        readings: &RoundReadings,
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<(), SimError> {
        let c = self.clusters[&id].clone();
        let has_pending = c.pending().next().is_some();
        if has_pending {
            if !self.pending_ripe(frame, &c, t) {
                if c.last_growth == t {
                    self.log(t, id, ActionKind::Defer, Vec::new(), Vec::new());
                }
                return Ok(());
            }
            return self.commit(frame, id, readings, t, rng);
        }
        let Some(r) = c.region() else {
            return Ok(());
        };
        let deadline = frame.region(r)?.dwell_deadline;
        if t < deadline || !self.stable(frame, r, readings) {
            return Ok(());
        }
        self.resolve(frame, id, r, readings, t, rng)
    }

    /// Ungauges (or extends the cluster's region over) the pending events.
    fn commit(
        &mut self,
        frame: &mut FrameState,
        id: usize,
        readings: &RoundReadings,
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<(), SimError> {
        let c = self.clusters[&id].clone();
        let sites: Vec<Coord> = c.pending().map(|e| e.point.site()).collect();
        let wanted = box_around(&self.torus, &sites, 1);
        let dwell = if self.config.flush { 0 } else { c.diameter + self.config.dwell_extra };
        // emissions of a wall closed this round must be read before a
        // neighbour hides its vertices again
        let near_closed = self.actions.iter().rev().take_while(|a| a.t == t).any(|a| {
            a.action == ActionKind::Regauge
                && a.region.iter().any(|&q| wanted.iter().any(|&p| self.torus.site_distance(p, q) <= 1))
        });
        if near_closed && c.region().is_none() {
            return Ok(());
        }
        let mut touched = self.adjacent_regions(frame, &wanted);
        if let Some(r) = c.region() {
            touched.insert(r);
        }
        let region = match touched.iter().next().copied() {
            None => frame.ungauge_region(wanted.iter().copied(), t, dwell, rng)?.id,
            Some(r) => {
                let mut all = wanted.clone();
                for &o in &touched {
                    all.extend(frame.region(o)?.plaquettes.iter().copied());
                }
                if frame.computational_in(&all).len() > 1 && c.region().is_none() {
                    // wait for the neighbouring region to close
                    return Ok(());
                }
                frame.extend_region(r, all, t, rng)?;
                let d = frame.region(r)?.dwell_deadline.max(t + dwell);
                frame.set_deadline(r, d)?;
                r
            }
        };
        // clusters owning absorbed regions join this one
        let mut group = vec![id];
        for other in self.clusters.values() {
            if other.id != id {
                if let Some(r) = other.region() {
                    if !frame.regions.contains_key(&r) || r == region {
                        group.push(other.id);
                    }
                }
            }
        }
        let keep = if group.len() > 1 { self.merge_with_region(frame, &group, region) } else { id };
        // events the region does not cover stay pending for a later commit
        let covered: BTreeSet<StabId> = self.clusters[&keep]
            .pending()
            .filter(|e| self.event_region(frame, &e.event) == Some(region))
            .map(|e| e.event.stab)
            .collect();
        let c = self.clusters.get_mut(&keep).expect("cluster");
        c.status = ClusterStatus::Ungauged(region);
        c.linked_absorber = Some(region);
        let pend: Vec<StabId> = covered.iter().copied().collect();
        for e in c.events.iter_mut().filter(|e| covered.contains(&e.event.stab)) {
            e.pending = false;
        }
        for s in pend {
            self.pending.remove(&s);
            self.accept(frame, s, readings, t);
        }
        let size = frame.region(region)?.plaquettes.len();
        self.stats.max_region = self.stats.max_region.max(size);
        self.log(t, keep, ActionKind::Ungauge, frame.region(region)?.plaquettes.iter().copied().collect(), Vec::new());
        Ok(())
    }

    /// Open regions sharing a vertex with the set.
    fn adjacent_regions(&self, frame: &FrameState, set: &BTreeSet<Coord>) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for &(x, y) in set {
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let q = self.torus.wrap2((x + dx, y + dy));
                    let id = frame.phase[self.torus.index(q)];
                    if id != 0 {
                        out.insert(id);
                    }
                }
            }
        }
        out
    }

    /// Folds clusters whose regions were merged by the simulator into one
    /// record carrying `region`.
    fn merge_with_region(&mut self, frame: &FrameState, group: &[usize], region: u32) -> usize {
        let keep = *group.iter().min_by_key(|&&id| (self.clusters[&id].birth, id)).expect("nonempty");
        for &g in group {
            if g == keep {
                continue;
            }
            let other = self.clusters.remove(&g).expect("cluster");
            for e in &other.events {
                if e.pending {
                    self.pending.insert(e.event.stab, keep);
                }
            }
            let c = self.clusters.get_mut(&keep).expect("cluster");
            c.events.extend(other.events);
            c.birth = c.birth.min(other.birth);
            c.tier = c.tier.max(other.tier);
        }
        let c = self.clusters.get_mut(&keep).expect("cluster");
        c.diameter = self.torus.diameter(&c.points());
        c.status = ClusterStatus::Ungauged(region);
        debug_assert!(frame.regions.contains_key(&region));
        keep
    }

    /// Region readings unchanged since the previous round.
    fn stable(&self, frame: &FrameState, region: u32, r: &RoundReadings) -> bool {
        if self.config.flush {
            return true;
        }
        let Some(prev) = &self.prev else {
            return false;
        };
        let Ok(reg) = frame.region(region) else {
            return false;
        };
        let same = |f: StabFamily, s: Coord| {
            let i = self.torus.index(s);
            prev.family(f)[i] == r.family(f)[i]
        };
        reg.plaquettes.iter().all(|&p| same(StabFamily::Plaquette, p) && same(StabFamily::Beta, p))
            && frame.region_vertices(&reg.plaquettes).into_iter().all(|v| same(StabFamily::Vertex, v))
    }

    fn resolve(
        &mut self,
        frame: &mut FrameState,
        id: usize,
        region: u32,
        readings: &RoundReadings,
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<(), SimError> {
        let plaquettes = frame.region(region)?.plaquettes.clone();
        match plan_correction(frame, &plaquettes, readings, t) {
            Some(moves) => {
                frame.apply_correction(region, &moves)?;
                self.log(t, id, ActionKind::Correct, plaquettes.iter().copied().collect(), moves);
                frame.set_deadline(region, t)?;
                frame.regauge_region(region, t, rng)?;
                self.log(t, id, ActionKind::Regauge, plaquettes.iter().copied().collect(), Vec::new());
                for v in frame.region_vertices(&plaquettes) {
                    let still = frame.vertex_in_region(v);
                    let value = if still { Reading::Ternary(0) } else { Reading::Binary(0) };
                    self.set_accepted(StabId::new(StabFamily::Vertex, v), value);
                }
                for &p in &plaquettes {
                    self.set_accepted(StabId::new(StabFamily::Plaquette, p), Reading::Binary(0));
                    self.set_accepted(StabId::new(StabFamily::Beta, p), Reading::Binary(0));
                }
                let mut c = self.clusters.remove(&id).expect("cluster");
                c.status = ClusterStatus::Closed;
                self.closed.push(c);
                Ok(())
            }
            None => self.widen(frame, id, region, readings, t, rng),
        }
    }

    /// Grows a non-neutral region: first to the nearest μ outside it within
    /// 2^tier (a μ may hold the missing charge), else by 2^(tier-1) on
    /// every side.
    fn widen(
        &mut self,
        frame: &mut FrameState,
        id: usize,
        region: u32,
        readings: &RoundReadings,
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<(), SimError> {
        let l = self.torus.l;
        let plaquettes: Vec<Coord> = frame.region(region)?.plaquettes.iter().copied().collect();
        if plaquettes.len() >= self.torus.sites() {
            self.failure = Some("non-neutral region spans the torus".into());
            return Ok(());
        }
        let tier = self.clusters[&id].tier + 1;
        let reach = 1i32 << tier.min(20);
        let nearest_mu = (0..self.torus.sites())
            .filter(|&i| readings.beta[i] == Reading::Binary(1) && frame.phase[i] != region)
            .map(|i| self.torus.coord(i))
            .map(|p| (plaquettes.iter().map(|&q| self.torus.site_distance(p, q)).min().unwrap_or(i32::MAX), p))
            .filter(|&(dist, _)| dist <= reach)
            .min();
        let wanted = match nearest_mu {
            Some((_, p)) => {
                let mut sites = plaquettes.clone();
                sites.push(p);
                box_around(&self.torus, &sites, 0)
            }
            None => box_around(&self.torus, &plaquettes, (reach / 2).min(l)),
        };
        // regions must not share a vertex, so neighbours are merged in
        let mut merged = wanted.clone();
        for o in self.adjacent_regions(frame, &wanted) {
            if o != region {
                merged.extend(frame.region(o)?.plaquettes.iter().copied());
            }
        }
        let wanted = if frame.computational_in(&merged).len() > 1 { wanted } else { merged };
        frame.extend_region(region, wanted.iter().copied(), t, rng)?;
        // clusters now inside, or owning merged regions, join
        let members: BTreeSet<Coord> = frame.region(region)?.plaquettes.clone();
        let mut group = vec![id];
        for c in self.clusters.values() {
            if c.id == id {
                continue;
            }
            let gone = c.region().is_some_and(|r| !frame.regions.contains_key(&r));
            let inside = c.events.iter().any(|e| members.contains(&e.point.site()));
            if gone || inside {
                group.push(c.id);
            }
        }
        let keep = self.merge_with_region(frame, &group, region);
        let c = self.clusters.get_mut(&keep).expect("cluster");
        c.tier = tier;
        let pend: Vec<StabId> = c.events.iter().filter(|e| e.pending).map(|e| e.event.stab).collect();
        for e in c.events.iter_mut() {
            e.pending = false;
        }
        let diameter = c.diameter;
        for s in pend {
            self.pending.remove(&s);
        }
        let dwell = if self.config.flush { 0 } else { diameter + self.config.dwell_extra };
        frame.set_deadline(region, t + dwell)?;
        self.stats.max_tier = self.stats.max_tier.max(tier);
        self.stats.max_region = self.stats.max_region.max(members.len());
        self.log(t, keep, ActionKind::Widen, members.into_iter().collect(), Vec::new());
        Ok(())
    }

    /// Noiseless rounds from `t` with every cluster committed at once, until
    /// nothing is open and a round passes quietly. Returns the next round.
    pub fn flush(&mut self, frame: &mut FrameState, mut t: i32, rng: &mut impl Rng) -> i32 {
        self.config.flush = true;
        let cap = t + 4 * self.torus.l + 16;
        let mut quiet_rounds = 0;
        while quiet_rounds < 2 && self.failure.is_none() {
            if t > cap {
                self.failure = Some("flush did not settle".into());
                break;
            }
            let r = frame.measure_round(t, &[]);
            let before = self.actions.len();
            self.step(frame, &r, t, rng);
            let busy = !self.is_idle() || self.actions.len() > before || !frame.regions.is_empty();
            quiet_rounds = if busy { 0 } else { quiet_rounds + 1 };
            t += 1;
        }
        t
    }

    /// Species of the events seen so far, for reporting.
    pub fn species_counts(&self) -> BTreeMap<Species, usize> {
        let mut out = BTreeMap::new();
        for c in self.clusters.values().chain(&self.closed) {
            for e in &c.events {
                *out.entry(e.event.species).or_default() += 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests;
