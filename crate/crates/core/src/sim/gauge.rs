//! Ungauging and regauging of plaquette regions.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use super::{FrameState, SimError};
use crate::algebra::{Charge, MicroCharge};
use crate::geometry::{Coord, Edge, Torus};
use crate::spacetime::{DetectorEvent, FaultKind, StabFamily, StabId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GaugeRegion {
    pub id: u32,
    pub plaquettes: BTreeSet<Coord>,
    pub open_time: i32,
    pub dwell_deadline: i32,
    pub expected_charge: Charge,
    /// Opened by the logical readout, which may hold a whole pair.
    pub readout: bool,
}

/// σ^Z outcomes on the region's edges after ungauging.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopReport {
    pub minus_one: Vec<Edge>,
    /// Plaquettes with odd σ^Z parity, i.e. where strings end.
    pub open_ends: Vec<Coord>,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UngaugeOutcome {
    pub id: u32,
    /// Noiseless prediction of the wall detectors at the next round.
    pub boundary: Vec<DetectorEvent>,
    pub loops: LoopReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionContent {
    pub visible: MicroCharge,
    pub mu: Vec<Coord>,
    pub computational: Vec<usize>,
}

/// One correction operator, restricted to an ungauged region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorrectionMove {
    /// Z^a on the qutrit of an edge.
    Electric { edge: Edge, a: u8 },
    /// X^a on the qutrit of an edge.
    Magnetic { edge: Edge, a: u8 },
    /// σ^X on the qubit of an edge (moves or fuses μ).
    Membrane { edge: Edge },
}

/// Shortest periodic arc covering the values, as (start, length).
fn circular_span(l: i32, vals: &[i32]) -> (i32, i32) {
    let mut v: Vec<i32> = vals.iter().map(|&x| x.rem_euclid(l)).collect();
    v.sort_unstable();
    v.dedup();
    let k = v.len();
    let mut best = (v[0] + l - v[k - 1], 0usize);
    for i in 0..k - 1 {
        let gap = v[i + 1] - v[i];
        if gap > best.0 {
            best = (gap, i + 1);
        }
    }
    let start = v[best.1];
    let end = v[(best.1 + k - 1) % k];
    (start, (end - start).rem_euclid(l) + 1)
}

/// Axis-aligned box of plaquettes covering the sites, grown by `inflate`
/// on every side, clipped to the torus.
pub fn box_around(torus: &Torus, sites: &[Coord], inflate: i32) -> BTreeSet<Coord> {
    assert!(!sites.is_empty(), "box needs sites");
    let l = torus.l;
    let axis = |vals: Vec<i32>| {
        let (s, len) = circular_span(l, &vals);
        let len = len + 2 * inflate;
        if len >= l {
            (0, l)
        } else {
            (s - inflate, len)
        }
    };
    let (x0, w) = axis(sites.iter().map(|c| c.0).collect());
    let (y0, h) = axis(sites.iter().map(|c| c.1).collect());
    let mut out = BTreeSet::new();
    for dy in 0..h {
        for dx in 0..w {
            out.insert(torus.wrap2((x0 + dx, y0 + dy)));
        }
    }
    out
}

impl FrameState {
    pub fn region(&self, id: u32) -> Result<&GaugeRegion, SimError> {
        self.regions.get(&id).ok_or(SimError::UnknownRegion(id))
    }

    pub fn region_vertices(&self, plaquettes: &BTreeSet<Coord>) -> BTreeSet<Coord> {
        plaquettes.iter().flat_map(|&p| self.torus.plaquette_corners(p)).collect()
    }

    pub fn region_edges(&self, plaquettes: &BTreeSet<Coord>) -> BTreeSet<Edge> {
        plaquettes.iter().flat_map(|&p| self.torus.plaquette_edges(p)).collect()
    }

    /// Edges with a region plaquette on both sides.
    pub fn inner_edges(&self, plaquettes: &BTreeSet<Coord>) -> BTreeSet<Edge> {
        self.region_edges(plaquettes)
            .into_iter()
            .filter(|&e| self.torus.edge_plaquettes(e).iter().all(|p| plaquettes.contains(p)))
            .collect()
    }

    pub fn computational_in(&self, plaquettes: &BTreeSet<Coord>) -> Vec<usize> {
        plaquettes.iter().filter_map(|&p| self.label[self.torus.index(p)]).collect()
    }

    pub fn ungauge_region(
        &mut self,
        plaquettes: impl IntoIterator<Item = Coord>,
        t: i32,
        dwell: i32,
        rng: &mut impl Rng,
    ) -> Result<UngaugeOutcome, SimError> {
        let set: BTreeSet<Coord> = plaquettes.into_iter().map(|p| self.torus.wrap2(p)).collect();
        self.open(set, t, dwell, false, rng)
    }

    pub(super) fn open(
        &mut self,
        set: BTreeSet<Coord>,
        t: i32,
        dwell: i32,
        readout: bool,
        rng: &mut impl Rng,
    ) -> Result<UngaugeOutcome, SimError> {
        if set.is_empty() {
            return Err(SimError::EmptyRegion);
        }
        if let Some(&p) = set.iter().find(|&&p| self.plaquette_in_region(p)) {
            return Err(SimError::RegionOverlap(self.phase[self.torus.index(p)]));
        }
        let comp = self.computational_in(&set);
        if comp.len() > 1 && !readout {
            return Err(SimError::TwoComputational(comp.len()));
        }
        let id = self.next_region;
        self.next_region += 1;
        let switching: Vec<Coord> = self
            .region_vertices(&set)
            .into_iter()
            .filter(|&v| !self.vertex_in_region(v))
            .collect();
        let before = self.violations(&switching, &set);
        for &p in &set {
            let i = self.torus.index(p);
            self.phase[i] = id;
        }
        for &p in &set {
            let i = self.torus.index(p);
            if readout && self.mu[i] {
                let l = std::mem::take(&mut self.logical[i]);
                self.reveal_at(p, l);
            }
            self.settle_mu(p);
        }
        let boundary = self.wall_events(&switching, &set, &before, t);
        let loops = self.loop_report(&set, rng);
        self.regions.insert(
            id,
            GaugeRegion {
                id,
                plaquettes: set,
                open_time: t,
                dwell_deadline: t + dwell,
                expected_charge: if comp.len() == 1 { Charge::Mu } else { Charge::Vacuum },
                readout,
            },
        );
        Ok(UngaugeOutcome { id, boundary, loops })
    }

    /// Violation flags last reported for the given vertices and plaquettes;
    /// noiseless current values where no round was measured yet.
    fn violations(&self, vertices: &[Coord], plaquettes: &BTreeSet<Coord>) -> (Vec<bool>, Vec<bool>) {
        let fresh;
        let r = match &self.last_readings {
            Some(r) => r,
            None => {
                fresh = self.readings(0);
                &fresh
            }
        };
        let get = |f: StabFamily, c: Coord| r.get(&self.torus, StabId::new(f, c)).is_violated();
        (
            vertices.iter().map(|&v| get(StabFamily::Vertex, v)).collect(),
            plaquettes.iter().map(|&p| get(StabFamily::Plaquette, p)).collect(),
        )
    }

    fn wall_events(
        &self,
        vertices: &[Coord],
        plaquettes: &BTreeSet<Coord>,
        before: &(Vec<bool>, Vec<bool>),
        t: i32,
    ) -> Vec<DetectorEvent> {
        let mut out = Vec::new();
        let mut push = |family: StabFamily, site: Coord, was: bool, now: u8| {
            if was != (now != 0) {
                out.push(DetectorEvent {
                    time: t,
                    species: family.species(),
                    stab: StabId::new(family, site),
                    boundary: true,
                    delta: now,
                });
            }
        };
        for (k, &v) in vertices.iter().enumerate() {
            push(StabFamily::Vertex, v, before.0[k], self.e[self.torus.index(v)]);
        }
        for (k, &p) in plaquettes.iter().enumerate() {
            push(StabFamily::Plaquette, p, before.1[k], self.m[self.torus.index(p)]);
        }
        out
    }

    /// σ^Z outcomes: the membrane, dressed by a random α gauge on vertices
    /// whose whole star lies in the region.
    fn loop_report(&self, set: &BTreeSet<Coord>, rng: &mut impl Rng) -> LoopReport {
        let mut minus: BTreeSet<Edge> = self
            .region_edges(set)
            .into_iter()
            .filter(|&e| self.qubit_x[self.torus.edge_index(e)] == 1)
            .collect();
        for v in self.region_vertices(set) {
            let interior = self.torus.vertex_plaquettes(v).iter().all(|p| set.contains(p));
            if interior && rng.gen::<bool>() {
                for e in self.torus.vertex_edges(v) {
                    if !minus.remove(&e) {
                        minus.insert(e);
                    }
                }
            }
        }
        let open_ends: Vec<Coord> = set
            .iter()
            .copied()
            .filter(|&p| self.torus.plaquette_edges(p).iter().filter(|e| minus.contains(e)).count() % 2 == 1)
            .collect();
        LoopReport {
            closed: open_ends.is_empty(),
            minus_one: minus.into_iter().collect(),
            open_ends,
        }
    }

    /// Grows an open region; other open regions it touches are merged in.
    pub fn extend_region(
        &mut self,
        id: u32,
        plaquettes: impl IntoIterator<Item = Coord>,
        t: i32,
        rng: &mut impl Rng,
    ) -> Result<UngaugeOutcome, SimError> {
        let mut region = self.regions.get(&id).cloned().ok_or(SimError::UnknownRegion(id))?;
        let wanted: BTreeSet<Coord> = plaquettes.into_iter().map(|p| self.torus.wrap2(p)).collect();
        let mut absorbed = BTreeSet::new();
        for &p in &wanted {
            let other = self.phase[self.torus.index(p)];
            if other != 0 && other != id {
                absorbed.insert(other);
            }
        }
        let mut all = region.plaquettes.clone();
        all.extend(wanted.iter().copied());
        for &o in &absorbed {
            all.extend(self.regions[&o].plaquettes.iter().copied());
        }
        let comp = self.computational_in(&all);
        if comp.len() > 1 && !region.readout {
            return Err(SimError::TwoComputational(comp.len()));
        }
        for o in absorbed {
            let r = self.regions.remove(&o).expect("open region");
            region.open_time = region.open_time.min(r.open_time);
            region.dwell_deadline = region.dwell_deadline.max(r.dwell_deadline);
            for p in r.plaquettes {
                let i = self.torus.index(p);
                self.phase[i] = id;
                region.plaquettes.insert(p);
            }
        }
        let fresh: BTreeSet<Coord> = wanted.into_iter().filter(|&p| !self.plaquette_in_region(p)).collect();
        let switching: Vec<Coord> = self
            .region_vertices(&fresh)
            .into_iter()
            .filter(|&v| !self.vertex_in_region(v))
            .collect();
        let before = self.violations(&switching, &fresh);
        for &p in &fresh {
            let i = self.torus.index(p);
            self.phase[i] = id;
            region.plaquettes.insert(p);
        }
        for &p in &fresh {
            self.settle_mu(p);
        }
        region.expected_charge = if comp.len() == 1 { Charge::Mu } else { Charge::Vacuum };
        let boundary = self.wall_events(&switching, &fresh, &before, t);
        let loops = self.loop_report(&region.plaquettes, rng);
        self.regions.insert(id, region);
        Ok(UngaugeOutcome { id, boundary, loops })
    }

    pub fn set_deadline(&mut self, id: u32, deadline: i32) -> Result<(), SimError> {
        let r = self.regions.get_mut(&id).ok_or(SimError::UnknownRegion(id))?;
        r.dwell_deadline = deadline;
        Ok(())
    }

    pub fn region_content(&self, id: u32) -> Result<RegionContent, SimError> {
        let r = self.region(id)?;
        let mut visible = MicroCharge::VACUUM;
        for v in self.region_vertices(&r.plaquettes) {
            visible = visible.add(MicroCharge::electric(self.e[self.torus.index(v)] as i64));
        }
        let mut mu = Vec::new();
        for &p in &r.plaquettes {
            let i = self.torus.index(p);
            visible = visible.add(MicroCharge::magnetic(self.m[i] as i64));
            if self.mu[i] {
                mu.push(p);
            }
        }
        Ok(RegionContent {
            visible,
            mu,
            computational: self.computational_in(&r.plaquettes),
        })
    }

    /// Total charge of the region: μ when it holds an odd number of μ,
    /// otherwise the orbit of the visible ℤ₃ sum (η is decoded elsewhere).
    pub fn evaluate_neutrality(&self, id: u32) -> Result<Charge, SimError> {
        let c = self.region_content(id)?;
        Ok(if c.mu.len() % 2 == 1 { Charge::Mu } else { c.visible.orbit() })
    }

    /// Applies the moves, then checks that no visible charge is left in the
    /// region and that only computational anyons, at their designated
    /// sites, remain as μ.
    pub fn apply_correction(&mut self, id: u32, moves: &[CorrectionMove]) -> Result<(), SimError> {
        let plaquettes = self.region(id)?.plaquettes.clone();
        let edges = self.region_edges(&plaquettes);
        let inner = self.inner_edges(&plaquettes);
        for mv in moves {
            let (edge, ok) = match *mv {
                CorrectionMove::Electric { edge, .. } => (edge, edges.contains(&self.torus.wrap_edge(edge))),
                CorrectionMove::Magnetic { edge, .. } | CorrectionMove::Membrane { edge } => {
                    (edge, inner.contains(&self.torus.wrap_edge(edge)))
                }
            };
            if !ok {
                return Err(SimError::OutsideRegion(edge, id));
            }
        }
        for mv in moves {
            self.apply(match *mv {
                CorrectionMove::Electric { edge, a } => FaultKind::QutritZ(edge, a),
                CorrectionMove::Magnetic { edge, a } => FaultKind::QutritX(edge, a),
                CorrectionMove::Membrane { edge } => FaultKind::QubitX(edge),
            });
        }
        let c = self.region_content(id)?;
        let residual = MicroCharge::new(c.visible.e as i64, c.visible.m as i64, 0);
        if !residual.is_vacuum() {
            return Err(SimError::NotNeutralized(id, residual));
        }
        let stray = c.mu.iter().any(|&p| match self.label[self.torus.index(p)] {
            Some(k) => self.designated[k].site != p,
            None => true,
        });
        if stray {
            return Err(SimError::StrayMu(id));
        }
        Ok(())
    }

    /// Returns the region to the S3 phase. η strings inside are dropped
    /// (the qubits are reset) and each boundary edge emits an η pair with
    /// probability `eta_emission`. Returns the emitting edges.
    pub fn regauge_region(&mut self, id: u32, t: i32, rng: &mut impl Rng) -> Result<Vec<Edge>, SimError> {
        let deadline = self.region(id)?.dwell_deadline;
        if t < deadline {
            return Err(SimError::BeforeDeadline(id, deadline));
        }
        let region = self.regions.remove(&id).expect("checked above");
        let edges = self.region_edges(&region.plaquettes);
        for &e in &edges {
            if self.qubit_z[self.torus.edge_index(e)] == 1 {
                self.apply(FaultKind::QubitZ(e));
            }
        }
        let mut emitted = Vec::new();
        for &e in &edges {
            let inside = self.torus.edge_plaquettes(e).iter().filter(|p| region.plaquettes.contains(p)).count();
            if inside == 1 && self.eta_emission > 0.0 && rng.gen_bool(self.eta_emission) {
                self.apply(FaultKind::QubitZ(e));
                emitted.push(e);
            }
        }
        for &p in &region.plaquettes {
            let i = self.torus.index(p);
            self.phase[i] = 0;
        }
        for v in self.region_vertices(&region.plaquettes) {
            self.settle_vertex(v);
        }
        for &p in &region.plaquettes {
            self.settle_plaquette(p);
            self.settle_mu(p);
        }
        Ok(emitted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_wrap() {
        assert_eq!(circular_span(10, &[1, 3]), (1, 3));
        assert_eq!(circular_span(10, &[9, 0, 1]), (9, 3));
        assert_eq!(circular_span(10, &[4]), (4, 1));
    }

    #[test]
    fn boxes_clip_to_torus() {
        let torus = Torus::new(6);
        assert_eq!(box_around(&torus, &[(0, 0)], 1).len(), 9);
        assert_eq!(box_around(&torus, &[(0, 0), (3, 0)], 2).len(), 30);
        assert!(box_around(&torus, &[(5, 5)], 1).contains(&(0, 0)));
    }
}
