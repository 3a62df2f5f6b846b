//! Phenomenological frame simulator for the D(S3) phase.
//!
//! The frame keeps the qubit layer exactly (the μ branch-cut membrane and η
//! strings) and the qutrit layer as visible ℤ₃ charges on vertices (e) and
//! plaquettes (m). A μ absorbs charge that lands on its four corners or in
//! the 3×3 block of plaquettes around it; absorbed charge sits in the μ's
//! hidden accumulator until a gauge wall or a fusion reveals it.
//!
//! Computational anyons additionally carry a logical charge that no local
//! operation reveals. Only the readout, which opens one region around both
//! anyons of a pair, adds it to the visible total.

mod gauge;
mod logical;

pub use gauge::{box_around, CorrectionMove, GaugeRegion, LoopReport, RegionContent, UngaugeOutcome};
pub use logical::{Designated, Readout};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::algebra::MicroCharge;
use crate::geometry::{Coord, Edge, Torus};
use crate::spacetime::{AnyonSchedule, Fault, FaultKind, Reading, RoundReadings, StabFamily};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SimError {
    #[error("region overlaps open region {0}")]
    RegionOverlap(u32),
    #[error("region would hold {0} computational anyons")]
    TwoComputational(usize),
    #[error("no open region {0}")]
    UnknownRegion(u32),
    #[error("edge {0} lies outside region {1}")]
    OutsideRegion(Edge, u32),
    #[error("region {0} still holds charge {1} after correction")]
    NotNeutralized(u32, MicroCharge),
    #[error("region {0} has μ defects after correction")]
    StrayMu(u32),
    #[error("region {0} cannot be regauged before t = {1}")]
    BeforeDeadline(u32, i32),
    #[error("computational anyons {0} and {1} are closer than {2}")]
    PositionsTooClose(usize, usize, i32),
    #[error("readout regions of the two pairs overlap")]
    PairRegionsOverlap,
    #[error("empty region")]
    EmptyRegion,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameState {
    pub torus: Torus,
    /// Per edge: branch-cut membrane.
    pub qubit_x: Vec<u8>,
    /// Per edge: η strings.
    pub qubit_z: Vec<u8>,
    /// Per edge: net qutrit exponents applied so far (record only).
    pub qutrit_x: Vec<u8>,
    pub qutrit_z: Vec<u8>,
    /// Visible e charge per vertex, m charge per plaquette.
    pub e: Vec<u8>,
    pub m: Vec<u8>,
    /// β_p = −1.
    pub mu: Vec<bool>,
    /// α_v = −1.
    pub eta: Vec<bool>,
    /// Per plaquette, meaningful where `mu` is set.
    pub hidden: Vec<MicroCharge>,
    pub logical: Vec<MicroCharge>,
    /// Index into `designated` of the computational anyon sitting here.
    pub label: Vec<Option<usize>>,
    /// Region id per plaquette, 0 for the S3 phase.
    pub phase: Vec<u32>,
    pub regions: BTreeMap<u32, GaugeRegion>,
    next_region: u32,
    pub designated: Vec<Designated>,
    pub schedule: AnyonSchedule,
    /// Probability per boundary edge of emitting an η pair at regauging.
    pub eta_emission: f64,
    /// Readings of the last round, after measurement flips.
    #[serde(skip)]
    pub last_readings: Option<RoundReadings>,
}

impl FrameState {
    pub fn new(torus: Torus) -> FrameState {
        let n = torus.sites();
        FrameState {
            torus,
            qubit_x: vec![0; 2 * n],
            qubit_z: vec![0; 2 * n],
            qutrit_x: vec![0; 2 * n],
            qutrit_z: vec![0; 2 * n],
            e: vec![0; n],
            m: vec![0; n],
            mu: vec![false; n],
            eta: vec![false; n],
            hidden: vec![MicroCharge::VACUUM; n],
            logical: vec![MicroCharge::VACUUM; n],
            label: vec![None; n],
            phase: vec![0; n],
            regions: BTreeMap::new(),
            next_region: 1,
            designated: Vec::new(),
            schedule: AnyonSchedule::default(),
            eta_emission: 0.5,
            last_readings: None,
        }
    }

    fn idx(&self, c: Coord) -> usize {
        self.torus.index(c)
    }

    pub fn plaquette_in_region(&self, p: Coord) -> bool {
        self.phase[self.idx(p)] != 0
    }

    /// A vertex is in the ℤ₃ phase when any plaquette around it is.
    pub fn vertex_in_region(&self, v: Coord) -> bool {
        self.torus.vertex_plaquettes(v).iter().any(|&p| self.plaquette_in_region(p))
    }

    fn s3_mu(&self, p: Coord) -> bool {
        let i = self.idx(p);
        self.mu[i] && self.phase[i] == 0
    }

    pub fn mu_sites(&self) -> Vec<Coord> {
        (0..self.torus.sites()).filter(|&i| self.mu[i]).map(|i| self.torus.coord(i)).collect()
    }

    /// The 3×3 block of plaquettes around p, p itself first.
    fn block(&self, (x, y): Coord) -> impl Iterator<Item = Coord> + '_ {
        std::iter::once((x, y)).chain(
            (-1..=1)
                .flat_map(move |dy| (-1..=1).map(move |dx| (dx, dy)))
                .filter(|&d| d != (0, 0))
                .map(move |(dx, dy)| self.torus.wrap2((x + dx, y + dy))),
        )
    }

    pub fn vertex_masked(&self, v: Coord) -> bool {
        !self.vertex_in_region(v) && self.torus.vertex_plaquettes(v).iter().any(|&p| self.s3_mu(p))
    }

    pub fn plaquette_masked(&self, p: Coord) -> bool {
        !self.plaquette_in_region(p) && self.block(p).any(|q| self.s3_mu(q))
    }

    /// Sum of visible charge, hidden and logical accumulators, and η parity.
    pub fn total_charge(&self) -> MicroCharge {
        let mut t = MicroCharge::VACUUM;
        for i in 0..self.torus.sites() {
            t = t.add(MicroCharge::new(self.e[i] as i64, self.m[i] as i64, self.eta[i] as i64));
            if self.mu[i] {
                t = t.add(self.hidden[i]).add(self.logical[i]);
            }
        }
        t
    }

    /// The frame carries no visible charge, μ, or η outside the
    /// computational anyons.
    pub fn is_quiet(&self) -> bool {
        (0..self.torus.sites()).all(|i| {
            self.e[i] == 0
                && self.m[i] == 0
                && !self.eta[i]
                && (!self.mu[i] || self.label[i].is_some())
                && self.hidden[i].is_vacuum()
        })
    }

    // ---- absorption ----

    fn settle_vertex(&mut self, v: Coord) {
        let vi = self.idx(v);
        if self.e[vi] == 0 || self.vertex_in_region(v) {
            return;
        }
        if let Some(p) = self.torus.vertex_plaquettes(v).into_iter().find(|&p| self.s3_mu(p)) {
            let pi = self.idx(p);
            self.hidden[pi] = self.hidden[pi].add(MicroCharge::electric(self.e[vi] as i64));
            self.e[vi] = 0;
        }
    }

    fn settle_plaquette(&mut self, q: Coord) {
        let qi = self.idx(q);
        if self.m[qi] == 0 || self.plaquette_in_region(q) {
            return;
        }
        let found = self.block(q).find(|&p| self.s3_mu(p));
        if let Some(p) = found {
            let pi = self.idx(p);
            self.hidden[pi] = self.hidden[pi].add(MicroCharge::magnetic(self.m[qi] as i64));
            self.m[qi] = 0;
        }
    }

    /// Puts charge down visibly: e on the SW corner of p, m on p.
    fn reveal_at(&mut self, p: Coord, c: MicroCharge) {
        let pi = self.idx(p);
        let vi = self.idx(p);
        self.e[vi] = (self.e[vi] + c.e) % 3;
        self.m[pi] = (self.m[pi] + c.m) % 3;
    }

    /// After μ at p appeared or moved: a μ in a region gives up its hidden
    /// charge, a μ in the S3 phase absorbs what sits around it.
    fn settle_mu(&mut self, p: Coord) {
        let pi = self.idx(p);
        if !self.mu[pi] {
            return;
        }
        if self.phase[pi] != 0 {
            let h = std::mem::take(&mut self.hidden[pi]);
            self.reveal_at(p, h);
            return;
        }
        for v in self.torus.plaquette_corners(p) {
            self.settle_vertex(v);
        }
        let block: Vec<Coord> = self.block(p).collect();
        for q in block {
            self.settle_plaquette(q);
        }
    }

    fn deposit_hidden(&mut self, p: Coord, c: MicroCharge) {
        let pi = self.idx(p);
        if self.phase[pi] != 0 {
            self.reveal_at(p, c);
            self.settle_vertex(p);
            self.settle_plaquette(p);
        } else {
            self.hidden[pi] = self.hidden[pi].add(c);
        }
    }

    /// The μ that an open branch cut through `edge` ends on, nearest first.
    /// Closed membrane loops carry no μ and give `None`.
    fn cut_endpoint(&self, edge: Edge) -> Option<Coord> {
        let ei = self.torus.edge_index(edge);
        if self.qubit_x[ei] == 0 {
            return None;
        }
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Coord> = self.torus.edge_plaquettes(edge).into_iter().collect();
        for &p in &queue {
            seen.insert(p);
        }
        let mut found = Vec::new();
        while let Some(p) = queue.pop_front() {
            if self.mu[self.idx(p)] {
                found.push(p);
            }
            for f in self.torus.plaquette_edges(p) {
                if self.qubit_x[self.torus.edge_index(f)] == 1 {
                    for q in self.torus.edge_plaquettes(f) {
                        if seen.insert(q) {
                            queue.push_back(q);
                        }
                    }
                }
            }
        }
        let base = edge.base();
        found.into_iter().min_by_key(|&p| (self.torus.site_distance(base, p), self.idx(p)))
    }

    // ---- faults ----

    pub fn apply_fault(&mut self, fault: &Fault) {
        self.apply(fault.kind);
    }

    /// Applies one operator to the frame. Measurement flips are ignored
    /// here; they only act on readings.
    pub fn apply(&mut self, kind: FaultKind) {
        match kind {
            FaultKind::QubitX(e) => self.flip_membrane(self.torus.wrap_edge(e)),
            FaultKind::QubitZ(e) => {
                let e = self.torus.wrap_edge(e);
                let ei = self.torus.edge_index(e);
                self.qubit_z[ei] ^= 1;
                for v in self.torus.edge_vertices(e) {
                    let vi = self.idx(v);
                    self.eta[vi] = !self.eta[vi];
                }
            }
            FaultKind::QutritZ(e, a) => self.qutrit(self.torus.wrap_edge(e), a, true),
            FaultKind::QutritX(e, a) => self.qutrit(self.torus.wrap_edge(e), a, false),
            FaultKind::MeasFlip(..) => {}
        }
    }

    fn flip_membrane(&mut self, e: Edge) {
        let ei = self.torus.edge_index(e);
        self.qubit_x[ei] ^= 1;
        let [p, q] = self.torus.edge_plaquettes(e);
        let (pi, qi) = (self.idx(p), self.idx(q));
        match (self.mu[pi], self.mu[qi]) {
            (false, false) => {
                self.mu[pi] = true;
                self.mu[qi] = true;
                self.settle_mu(p);
                self.settle_mu(q);
            }
            (true, true) => {
                let total = self.hidden[pi]
                    .add(self.hidden[qi])
                    .add(self.logical[pi])
                    .add(self.logical[qi]);
                for i in [pi, qi] {
                    self.mu[i] = false;
                    self.hidden[i] = MicroCharge::VACUUM;
                    self.logical[i] = MicroCharge::VACUUM;
                    self.label[i] = None;
                }
                self.reveal_at(p, total);
                self.settle_vertex(p);
                self.settle_plaquette(p);
            }
            (true, false) => self.move_mu(pi, qi, q),
            (false, true) => self.move_mu(qi, pi, p),
        }
    }

    fn move_mu(&mut self, from: usize, to: usize, to_site: Coord) {
        self.mu[from] = false;
        self.mu[to] = true;
        self.hidden[to] = std::mem::take(&mut self.hidden[from]);
        self.logical[to] = std::mem::take(&mut self.logical[from]);
        self.label[to] = self.label[from].take();
        self.settle_mu(to_site);
    }

    /// Z^a (electric) or X^a (magnetic) on the qutrit of edge e. The first
    /// site gets +a (X on a vertical edge: −a) and the second the opposite,
    /// unless the edge lies on an open branch cut: then the second site's
    /// charge is conjugated and the μ ending that cut takes up the rest.
    fn qutrit(&mut self, e: Edge, a: u8, electric: bool) {
        let ei = self.torus.edge_index(e);
        let sign: i64 = if !electric && !e.is_horizontal() { -1 } else { 1 };
        let first = sign * a as i64;
        let mut second = -first;
        if let Some(end) = self.cut_endpoint(e) {
            second = first;
            let rest = -2 * first;
            let c = if electric { MicroCharge::electric(rest) } else { MicroCharge::magnetic(rest) };
            self.deposit_hidden(end, c);
        }
        if electric {
            self.qutrit_z[ei] = (self.qutrit_z[ei] + a) % 3;
            let [u, w] = self.torus.edge_vertices(e);
            for (v, c) in [(u, first), (w, second)] {
                let vi = self.idx(v);
                self.e[vi] = ((self.e[vi] as i64 + c).rem_euclid(3)) as u8;
                self.settle_vertex(v);
            }
        } else {
            self.qutrit_x[ei] = (self.qutrit_x[ei] + a) % 3;
            let [p, q] = self.torus.edge_plaquettes(e);
            for (s, c) in [(p, first), (q, second)] {
                let si = self.idx(s);
                self.m[si] = ((self.m[si] as i64 + c).rem_euclid(3)) as u8;
                self.settle_plaquette(s);
            }
        }
    }

    // ---- readings ----

    /// Noiseless readings of the current frame.
    pub fn readings(&self, t: i32) -> RoundReadings {
        let n = self.torus.sites();
        let mut r = RoundReadings::vacuum(&self.torus, t);
        for i in 0..n {
            let c = self.torus.coord(i);
            r.beta[i] = Reading::Binary(self.mu[i] as u8);
            let zv = self.vertex_in_region(c);
            r.alpha[i] = if zv { Reading::Absent } else { Reading::Binary(self.eta[i] as u8) };
            r.vertex[i] = if zv {
                Reading::Ternary(self.e[i])
            } else if self.vertex_masked(c) {
                Reading::Masked
            } else {
                Reading::Binary((self.e[i] != 0) as u8)
            };
            r.plaquette[i] = if self.phase[i] != 0 {
                Reading::Ternary(self.m[i])
            } else if self.plaquette_masked(c) {
                Reading::Masked
            } else {
                Reading::Binary((self.m[i] != 0) as u8)
            };
        }
        r
    }

    /// Readings of round t with the listed measurement flips applied.
    pub fn measure_round(&mut self, t: i32, flips: &[Fault]) -> RoundReadings {
        let mut r = self.readings(t);
        for f in flips {
            if let FaultKind::MeasFlip(s, a) = f.kind {
                let slot = &mut r.family_mut(s.family)[self.torus.index(s.site)];
                *slot = match *slot {
                    Reading::Binary(v) => Reading::Binary(v ^ 1),
                    Reading::Ternary(v) => Reading::Ternary((v + a) % 3),
                    other => other,
                };
            }
        }
        self.last_readings = Some(r.clone());
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("frame serializes")
    }

    /// Which family a stabilizer on this site reads in the current phase.
    pub fn reads_ternary(&self, family: StabFamily, site: Coord) -> bool {
        match family {
            StabFamily::Vertex => self.vertex_in_region(site),
            StabFamily::Plaquette => self.plaquette_in_region(site),
            _ => false,
        }
    }
}
