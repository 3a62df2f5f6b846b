//! Faults, error configurations, stabilizer readings and detector events on
//! the (2+1)-dimensional spacetime lattice.
//!
//! Round t = 0 is the perfect reference readout. A physical fault with time t
//! acts between rounds t − 1 and t; a measurement flip with time t corrupts
//! the readout of round t.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Coord, Edge, SpacetimePoint, Torus};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpacetimeError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("reading rounds are not consecutive at t = {0}")]
    NonConsecutive(i32),
    #[error("round {0} has {1} entries for a lattice of {2} sites")]
    SizeMismatch(i32, usize, usize),
    #[error("absorber extent is empty")]
    EmptyAbsorber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Species {
    #[serde(rename = "mu")]
    Mu,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "m")]
    M,
}

/// Stabilizer families: α_v (η), β_p (μ), the vertex term S_v or A^{ℤ₃}_v
/// (e) and the plaquette term S_p or B^{ℤ₃}_p (m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StabFamily {
    Alpha,
    Beta,
    Vertex,
    Plaquette,
}

impl StabFamily {
    pub const ALL: [StabFamily; 4] = [StabFamily::Alpha, StabFamily::Beta, StabFamily::Vertex, StabFamily::Plaquette];

    pub fn species(self) -> Species {
        match self {
            StabFamily::Alpha => Species::Eta,
            StabFamily::Beta => Species::Mu,
            StabFamily::Vertex => Species::E,
            StabFamily::Plaquette => Species::M,
        }
    }

    fn name(self) -> &'static str {
        match self {
            StabFamily::Alpha => "alpha",
            StabFamily::Beta => "beta",
            StabFamily::Vertex => "vertex",
            StabFamily::Plaquette => "plaquette",
        }
    }

    fn parse(s: &str) -> Option<StabFamily> {
        StabFamily::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StabId {
    pub family: StabFamily,
    pub site: Coord,
}

impl StabId {
    pub fn new(family: StabFamily, site: Coord) -> StabId {
        StabId { family, site }
    }
}

impl fmt::Display for StabId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.family.name(), self.site.0, self.site.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FaultKind {
    QubitX(Edge),
    QubitZ(Edge),
    /// X^a on the qutrit, a ∈ {1, 2}.
    QutritX(Edge, u8),
    /// Z^a on the qutrit, a ∈ {1, 2}.
    QutritZ(Edge, u8),
    /// Corrupts one reported value: binary readings flip, ternary readings
    /// shift by a.
    MeasFlip(StabId, u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FaultTag {
    QubitX,
    QubitZ,
    QutritX,
    QutritZ,
    MeasFlip,
}

impl FaultTag {
    pub const ALL: [FaultTag; 5] = [
        FaultTag::QubitX,
        FaultTag::QubitZ,
        FaultTag::QutritX,
        FaultTag::QutritZ,
        FaultTag::MeasFlip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FaultTag::QubitX => "qubitX",
            FaultTag::QubitZ => "qubitZ",
            FaultTag::QutritX => "qutritX",
            FaultTag::QutritZ => "qutritZ",
            FaultTag::MeasFlip => "measFlip",
        }
    }
}

impl FromStr for FaultTag {
    type Err = String;

    fn from_str(s: &str) -> Result<FaultTag, String> {
        FaultTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown fault kind {s:?}"))
    }
}

impl FaultKind {
    pub fn tag(&self) -> FaultTag {
        match self {
            FaultKind::QubitX(_) => FaultTag::QubitX,
            FaultKind::QubitZ(_) => FaultTag::QubitZ,
            FaultKind::QutritX(..) => FaultTag::QutritX,
            FaultKind::QutritZ(..) => FaultTag::QutritZ,
            FaultKind::MeasFlip(..) => FaultTag::MeasFlip,
        }
    }

    pub fn site(&self) -> Coord {
        match *self {
            FaultKind::QubitX(e) | FaultKind::QubitZ(e) | FaultKind::QutritX(e, _) | FaultKind::QutritZ(e, _) => e.base(),
            FaultKind::MeasFlip(s, _) => s.site,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fault {
    pub t: i32,
    pub kind: FaultKind,
}

impl Fault {
    pub fn new(t: i32, kind: FaultKind) -> Fault {
        Fault { t, kind }
    }

    pub fn location(&self) -> SpacetimePoint {
        let (x, y) = self.kind.site();
        SpacetimePoint::new(x, y, self.t)
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self.kind, FaultKind::MeasFlip(..))
    }
}

fn edge_token(e: Edge) -> &'static str {
    if e.is_horizontal() {
        "h"
    } else {
        "v"
    }
}

impl fmt::Display for Fault {
    /// `t x y kind [params]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.kind.site();
        write!(f, "{} {} {} {}", self.t, x, y, self.kind.tag().name())?;
        match self.kind {
            FaultKind::QubitX(e) | FaultKind::QubitZ(e) => write!(f, " {}", edge_token(e)),
            FaultKind::QutritX(e, a) | FaultKind::QutritZ(e, a) => write!(f, " {} {a}", edge_token(e)),
            FaultKind::MeasFlip(s, a) => write!(f, " {} {a}", s.family.name()),
        }
    }
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(line: &str) -> Result<Fault, String> {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() < 5 {
            return Err(format!("expected `t x y kind param...`, got {line:?}"));
        }
        let num = |s: &str| s.parse::<i32>().map_err(|_| format!("bad integer {s:?}"));
        let (t, x, y) = (num(tok[0])?, num(tok[1])?, num(tok[2])?);
        let tag: FaultTag = tok[3].parse()?;
        let edge = |s: &str| match s {
            "h" => Ok(Edge::Horizontal(x, y)),
            "v" => Ok(Edge::Vertical(x, y)),
            _ => Err(format!("bad edge orientation {s:?}")),
        };
        let power = |i: usize| -> Result<u8, String> {
            match tok.get(i).copied().unwrap_or("1") {
                "1" => Ok(1),
                "2" => Ok(2),
                s => Err(format!("exponent must be 1 or 2, got {s:?}")),
            }
        };
        let kind = match tag {
            FaultTag::QubitX => FaultKind::QubitX(edge(tok[4])?),
            FaultTag::QubitZ => FaultKind::QubitZ(edge(tok[4])?),
            FaultTag::QutritX => FaultKind::QutritX(edge(tok[4])?, power(5)?),
            FaultTag::QutritZ => FaultKind::QutritZ(edge(tok[4])?, power(5)?),
            FaultTag::MeasFlip => {
                let fam = StabFamily::parse(tok[4]).ok_or_else(|| format!("bad stabilizer family {:?}", tok[4]))?;
                FaultKind::MeasFlip(StabId::new(fam, (x, y)), power(5)?)
            }
        };
        Ok(Fault { t, kind })
    }
}

/// The set E of faults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorConfiguration {
    pub faults: BTreeSet<Fault>,
}

impl ErrorConfiguration {
    pub fn new(faults: impl IntoIterator<Item = Fault>) -> ErrorConfiguration {
        ErrorConfiguration {
            faults: faults.into_iter().collect(),
        }
    }

    pub fn weight(&self) -> usize {
        self.faults.len()
    }

    pub fn union(&self, other: &ErrorConfiguration) -> ErrorConfiguration {
        ErrorConfiguration::new(self.faults.union(&other.faults).copied())
    }

    pub fn difference(&self, other: &ErrorConfiguration) -> ErrorConfiguration {
        ErrorConfiguration::new(self.faults.difference(&other.faults).copied())
    }

    pub fn points(&self) -> Vec<SpacetimePoint> {
        self.faults.iter().map(Fault::location).collect()
    }

    /// Faults acting before round `t`'s readout (physical) or on it
    /// (measurement), in application order.
    pub fn at_time(&self, t: i32) -> impl Iterator<Item = &Fault> {
        self.faults.iter().filter(move |f| f.t == t)
    }

    /// Maximal r-connected subsets: faults chained by steps of distance ≤ r.
    pub fn components(&self, torus: &Torus, r: i32) -> Vec<ErrorConfiguration> {
        let faults: Vec<Fault> = self.faults.iter().copied().collect();
        let mut uf = UnionFind::<usize>::new(faults.len());
        for i in 0..faults.len() {
            for j in i + 1..faults.len() {
                if torus.distance(faults[i].location(), faults[j].location()) <= r {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<Fault>> = Default::default();
        for (i, f) in faults.into_iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(f);
        }
        groups.into_values().map(ErrorConfiguration::new).collect()
    }

    pub fn is_connected(&self, torus: &Torus, r: i32) -> bool {
        self.components(torus, r).len() <= 1
    }

    pub fn to_text(&self) -> String {
        self.faults.iter().map(|f| format!("{f}\n")).collect()
    }

    /// Parses the line format, skipping blank lines and `#` comments.
    pub fn from_text(text: &str) -> Result<ErrorConfiguration, SpacetimeError> {
        let mut faults = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f = line.parse().map_err(|msg| SpacetimeError::Parse { line: i + 1, msg })?;
            faults.insert(f);
        }
        Ok(ErrorConfiguration { faults })
    }
}

/// Probability that a unit cube of `n` independently failing elements
/// experiences at least one error.
pub fn cube_failure_prob(eps: f64, n: u32) -> f64 {
    assert!((0.0..=1.0).contains(&eps) && n >= 1);
    1.0 - (1.0 - eps).powi(n as i32)
}

/// Fault kinds a faulted unit cube may draw from, uniformly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultAlphabet {
    pub kinds: Vec<FaultTag>,
}

impl Default for FaultAlphabet {
    fn default() -> FaultAlphabet {
        FaultAlphabet {
            kinds: FaultTag::ALL.to_vec(),
        }
    }
}

impl FaultAlphabet {
    pub fn only(kinds: &[FaultTag]) -> FaultAlphabet {
        FaultAlphabet { kinds: kinds.to_vec() }
    }

    /// Draws the fault of a failed cube at (x, y, t): a kind uniformly, then
    /// the cube's H or V edge (or one of its four stabilizers) and the
    /// exponent uniformly.
    pub fn draw(&self, (x, y): Coord, t: i32, rng: &mut impl Rng) -> Fault {
        let tag = self.kinds[rng.gen_range(0..self.kinds.len())];
        let edge = if rng.gen_bool(0.5) {
            Edge::Horizontal(x, y)
        } else {
            Edge::Vertical(x, y)
        };
        let a = rng.gen_range(1..=2u8);
        let kind = match tag {
            FaultTag::QubitX => FaultKind::QubitX(edge),
            FaultTag::QubitZ => FaultKind::QubitZ(edge),
            FaultTag::QutritX => FaultKind::QutritX(edge, a),
            FaultTag::QutritZ => FaultKind::QutritZ(edge, a),
            FaultTag::MeasFlip => {
                let family = StabFamily::ALL[rng.gen_range(0..4)];
                let a = match family {
                    StabFamily::Alpha | StabFamily::Beta => 1,
                    _ => a,
                };
                FaultKind::MeasFlip(StabId::new(family, (x, y)), a)
            }
        };
        Fault { t, kind }
    }
}

/// Each unit cube (x, y, t), t ∈ [1, rounds], fails independently with
/// probability `p` and then draws one fault from the alphabet.
pub fn sample_errors(
    p: f64,
    torus: &Torus,
    rounds: i32,
    alphabet: &FaultAlphabet,
    rng: &mut impl Rng,
) -> ErrorConfiguration {
    assert!((0.0..=1.0).contains(&p));
    let mut faults = BTreeSet::new();
    if p == 0.0 || alphabet.kinds.is_empty() {
        return ErrorConfiguration { faults };
    }
    for t in 1..=rounds {
        for i in 0..torus.sites() {
            if rng.gen_bool(p) {
                faults.insert(alphabet.draw(torus.coord(i), t, rng));
            }
        }
    }
    ErrorConfiguration { faults }
}

/// One reported stabilizer value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reading {
    /// The term is not part of the measured group at this site.
    Absent,
    /// The term cannot be measured (neighbouring μ).
    Masked,
    /// 0 for +1, 1 for −1 (α, β, and S_v / S_p).
    Binary(u8),
    /// ℤ₃ charge k for eigenvalue ω^k.
    Ternary(u8),
}

impl Reading {
    pub fn value(self) -> Option<u8> {
        match self {
            Reading::Binary(v) | Reading::Ternary(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_violated(self) -> bool {
        self.value().is_some_and(|v| v != 0)
    }

    fn shifted(self, by: u8) -> Reading {
        match self {
            Reading::Binary(v) => Reading::Binary((v + by) % 2),
            Reading::Ternary(v) => Reading::Ternary((v + by) % 3),
            other => other,
        }
    }
}

/// All readings of one round, indexed by `Torus::index` of the site.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundReadings {
    pub t: i32,
    pub alpha: Vec<Reading>,
    pub beta: Vec<Reading>,
    pub vertex: Vec<Reading>,
    pub plaquette: Vec<Reading>,
}

impl RoundReadings {
    pub fn vacuum(torus: &Torus, t: i32) -> RoundReadings {
        let n = torus.sites();
        RoundReadings {
            t,
            alpha: vec![Reading::Binary(0); n],
            beta: vec![Reading::Binary(0); n],
            vertex: vec![Reading::Binary(0); n],
            plaquette: vec![Reading::Binary(0); n],
        }
    }

    pub fn family(&self, f: StabFamily) -> &[Reading] {
        match f {
            StabFamily::Alpha => &self.alpha,
            StabFamily::Beta => &self.beta,
            StabFamily::Vertex => &self.vertex,
            StabFamily::Plaquette => &self.plaquette,
        }
    }

    pub fn family_mut(&mut self, f: StabFamily) -> &mut Vec<Reading> {
        match f {
            StabFamily::Alpha => &mut self.alpha,
            StabFamily::Beta => &mut self.beta,
            StabFamily::Vertex => &mut self.vertex,
            StabFamily::Plaquette => &mut self.plaquette,
        }
    }

    pub fn get(&self, torus: &Torus, s: StabId) -> Reading {
        self.family(s.family)[torus.index(s.site)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DetectorEvent {
    pub time: i32,
    pub species: Species,
    pub stab: StabId,
    /// Compares readings across a gauge wall (ℤ₃ reading against the prior
    /// S reading, or the first reading after a gap).
    pub boundary: bool,
    /// Difference of the two compared values (mod 2 or mod 3).
    pub delta: u8,
}

/// Stabilizers whose expected value is shifted over a time window, e.g. β_p
/// = −1 along a computational μ worldline.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnyonSchedule {
    pub worldlines: Vec<Worldline>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Worldline {
    pub stab: StabId,
    /// First round with the shifted expectation.
    pub from: i32,
    /// First round without it; `None` means until the end.
    pub to: Option<i32>,
    pub offset: u8,
}

impl AnyonSchedule {
    pub fn expected(&self, s: StabId, t: i32) -> u8 {
        self.worldlines
            .iter()
            .filter(|w| w.stab == s && w.from <= t && w.to.map_or(true, |end| t < end))
            .map(|w| w.offset)
            .sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeStream {
    pub events: Vec<DetectorEvent>,
}

impl SyndromeStream {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("syndrome serializes")
    }

    pub fn at(&self, t: i32) -> impl Iterator<Item = &DetectorEvent> {
        self.events.iter().filter(move |e| e.time == t)
    }
}

/// Compares each stabilizer's reading with its last available reading.
/// Masked and `Absent` rounds are bridged. The first reading after an
/// `Absent` stretch is compared with the last one before it and flagged as a
/// boundary event, so charges emitted or absorbed by a gauge wall show up. A
/// change between binary and ternary readings (a gauge wall) is a boundary
/// event when the violation status differs.
pub fn detectors_from_readings(
    torus: &Torus,
    history: &[RoundReadings],
    schedule: &AnyonSchedule,
) -> Result<SyndromeStream, SpacetimeError> {
    let n = torus.sites();
    for (k, r) in history.iter().enumerate() {
        if k > 0 && r.t != history[k - 1].t + 1 {
            return Err(SpacetimeError::NonConsecutive(r.t));
        }
        for f in StabFamily::ALL {
            if r.family(f).len() != n {
                return Err(SpacetimeError::SizeMismatch(r.t, r.family(f).len(), n));
            }
        }
    }
    let mut events = Vec::new();
    for family in StabFamily::ALL {
        for i in 0..n {
            let stab = StabId::new(family, torus.coord(i));
            let mut last: Option<Reading> = None;
            let mut gap = false;
            for r in history {
                let raw = r.family(family)[i];
                let modulus = if matches!(raw, Reading::Ternary(_)) { 3 } else { 2 };
                let offset = schedule.expected(stab, r.t) % modulus;
                let cur = raw.shifted(modulus - offset);
                match cur {
                    Reading::Absent => gap = true,
                    Reading::Masked => {}
                    Reading::Binary(v) | Reading::Ternary(v) => {
                        if let Some(prev) = last {
                            let p = prev.value().expect("stored readings carry values");
                            let same_kind = std::mem::discriminant(&prev) == std::mem::discriminant(&cur);
                            if same_kind && p != v {
                                events.push(DetectorEvent {
                                    time: r.t,
                                    species: family.species(),
                                    stab,
                                    boundary: gap,
                                    delta: (v + modulus - p) % modulus,
                                });
                            } else if !same_kind && (p != 0) != (v != 0) {
                                events.push(DetectorEvent {
                                    time: r.t,
                                    species: family.species(),
                                    stab,
                                    boundary: true,
                                    delta: v,
                                });
                            }
                        }
                        last = Some(cur);
                        gap = false;
                    }
                }
            }
        }
    }
    events.sort();
    Ok(SyndromeStream { events })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AbsorberKind {
    SpatialBoundary,
    TemporalBoundary,
    GaugingWall,
    ComputationalAnyonWorldline,
    ErrorClusterRegion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorber {
    pub kind: AbsorberKind,
    extent: Vec<SpacetimePoint>,
}

impl Absorber {
    pub fn new(kind: AbsorberKind, extent: Vec<SpacetimePoint>) -> Result<Absorber, SpacetimeError> {
        if extent.is_empty() {
            return Err(SpacetimeError::EmptyAbsorber);
        }
        Ok(Absorber { kind, extent })
    }

    pub fn extent(&self) -> &[SpacetimePoint] {
        &self.extent
    }

    pub fn distance_to(&self, torus: &Torus, p: SpacetimePoint) -> i32 {
        torus.region_distance(&self.extent, &[p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cube_probability() {
        assert_eq!(cube_failure_prob(0.0, 7), 0.0);
        assert_eq!(cube_failure_prob(1.0, 1), 1.0);
        let expect = 1.0 - 0.999f64.powi(10);
        assert!((cube_failure_prob(0.001, 10) - expect).abs() < 1e-15);
        assert!((cube_failure_prob(0.001, 10) - 0.009955119790251).abs() < 1e-12);
    }

    #[test]
    fn sampling_extremes() {
        let torus = Torus::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let alpha = FaultAlphabet::default();
        assert_eq!(sample_errors(0.0, &torus, 5, &alpha, &mut rng).weight(), 0);
        let full = sample_errors(1.0, &torus, 1, &alpha, &mut rng);
        assert_eq!(full.weight(), 4);
        let cubes: BTreeSet<SpacetimePoint> = full.points().into_iter().collect();
        assert_eq!(cubes.len(), 4);
    }

    #[test]
    fn sampling_is_reproducible() {
        let torus = Torus::new(6);
        let alpha = FaultAlphabet::default();
        let a = sample_errors(0.1, &torus, 6, &alpha, &mut ChaCha8Rng::seed_from_u64(3));
        let b = sample_errors(0.1, &torus, 6, &alpha, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn text_round_trip() {
        let e = ErrorConfiguration::new([
            Fault::new(3, FaultKind::QutritZ(Edge::Horizontal(1, 2), 2)),
            Fault::new(1, FaultKind::QubitX(Edge::Vertical(0, 0))),
            Fault::new(2, FaultKind::MeasFlip(StabId::new(StabFamily::Vertex, (4, 4)), 1)),
        ]);
        let text = e.to_text();
        assert!(text.contains("3 1 2 qutritZ h 2"));
        assert_eq!(ErrorConfiguration::from_text(&text).unwrap(), e);
        assert!(matches!(
            ErrorConfiguration::from_text("# c\n1 0 0 qubitY h"),
            Err(SpacetimeError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn components_chain() {
        let torus = Torus::new(20);
        let f = |x, t| Fault::new(t, FaultKind::QubitZ(Edge::Horizontal(x, 0)));
        let e = ErrorConfiguration::new([f(0, 0), f(2, 0), f(4, 1), f(10, 0)]);
        assert_eq!(e.components(&torus, 2).len(), 2);
        assert_eq!(e.components(&torus, 1).len(), 4);
    }

    fn binary_rounds(torus: &Torus, values: &[(i32, usize, u8)], rounds: i32) -> Vec<RoundReadings> {
        (0..=rounds)
            .map(|t| {
                let mut r = RoundReadings::vacuum(torus, t);
                for &(from, i, v) in values {
                    if t >= from {
                        r.vertex[i] = Reading::Binary(v);
                    }
                }
                r
            })
            .collect()
    }

    #[test]
    fn constant_readings_are_silent() {
        let torus = Torus::new(3);
        let h = binary_rounds(&torus, &[], 4);
        assert!(detectors_from_readings(&torus, &h, &AnyonSchedule::default()).unwrap().events.is_empty());
    }

    #[test]
    fn step_change_gives_one_event_each() {
        let torus = Torus::new(3);
        let h = binary_rounds(&torus, &[(2, 0, 1), (2, 4, 1)], 5);
        let s = detectors_from_readings(&torus, &h, &AnyonSchedule::default()).unwrap();
        assert_eq!(s.events.len(), 2);
        assert!(s.events.iter().all(|e| e.time == 2 && e.species == Species::E));
    }

    #[test]
    fn flipped_measurement_is_time_stacked() {
        let torus = Torus::new(3);
        let mut h = binary_rounds(&torus, &[], 5);
        h[3].beta[2] = Reading::Binary(1);
        let s = detectors_from_readings(&torus, &h, &AnyonSchedule::default()).unwrap();
        let times: Vec<i32> = s.events.iter().map(|e| e.time).collect();
        assert_eq!(times, vec![3, 4]);
    }

    #[test]
    fn schedule_shifts_expectation() {
        let torus = Torus::new(3);
        let mut h = binary_rounds(&torus, &[], 4);
        for r in h.iter_mut().skip(2) {
            r.beta[1] = Reading::Binary(1);
        }
        let schedule = AnyonSchedule {
            worldlines: vec![Worldline {
                stab: StabId::new(StabFamily::Beta, torus.coord(1)),
                from: 2,
                to: None,
                offset: 1,
            }],
        };
        assert!(detectors_from_readings(&torus, &h, &schedule).unwrap().events.is_empty());
    }

    #[test]
    fn gauge_wall_comparison() {
        let torus = Torus::new(3);
        let mut h = binary_rounds(&torus, &[], 3);
        h[2].vertex[0] = Reading::Ternary(0);
        h[2].vertex[1] = Reading::Ternary(2);
        h[2].alpha[0] = Reading::Absent;
        h[3].alpha[0] = Reading::Binary(1);
        let s = detectors_from_readings(&torus, &h, &AnyonSchedule::default()).unwrap();
        // entering and leaving the wall at vertex 1, and alpha 0 changed
        // across its gap
        assert_eq!(s.events.len(), 3, "{:?}", s.events);
        assert!(s.events.iter().all(|e| e.boundary));
        let alpha: Vec<_> = s.events.iter().filter(|e| e.species == Species::Eta).collect();
        assert_eq!(alpha.len(), 1);
        assert_eq!((alpha[0].time, alpha[0].stab.site), (3, torus.coord(0)));
    }

    #[test]
    fn absorber_needs_extent() {
        assert_eq!(Absorber::new(AbsorberKind::GaugingWall, vec![]), Err(SpacetimeError::EmptyAbsorber));
        let torus = Torus::new(10);
        let a = Absorber::new(AbsorberKind::TemporalBoundary, vec![SpacetimePoint::new(0, 0, 0)]).unwrap();
        assert_eq!(a.distance_to(&torus, SpacetimePoint::new(9, 2, 1)), 2);
    }

    fn fault() -> impl proptest::strategy::Strategy<Value = Fault> {
        use proptest::prelude::*;
        (0..8i32, 0..8i32, 0..8i32, 0..5usize, any::<bool>(), 1..=2u8, 0..4usize).prop_map(|(x, y, t, k, h, a, f)| {
            let e = if h { Edge::Horizontal(x, y) } else { Edge::Vertical(x, y) };
            let kind = match k {
                0 => FaultKind::QubitX(e),
                1 => FaultKind::QubitZ(e),
                2 => FaultKind::QutritX(e, a),
                3 => FaultKind::QutritZ(e, a),
                _ => FaultKind::MeasFlip(StabId::new(StabFamily::ALL[f], (x, y)), a),
            };
            Fault::new(t, kind)
        })
    }

    proptest::proptest! {
        #[test]
        fn text_format_round_trips(fs in proptest::collection::vec(fault(), 0..20)) {
            let e = ErrorConfiguration::new(fs);
            proptest::prop_assert_eq!(ErrorConfiguration::from_text(&e.to_text()).unwrap(), e);
        }

        #[test]
        fn components_partition(fs in proptest::collection::vec(fault(), 0..20), r in 1..4i32) {
            let torus = Torus::new(8);
            let e = ErrorConfiguration::new(fs);
            let parts = e.components(&torus, r);
            let total: usize = parts.iter().map(|c| c.weight()).sum();
            proptest::prop_assert_eq!(total, e.weight());
            for (i, a) in parts.iter().enumerate() {
                proptest::prop_assert!(a.is_connected(&torus, r));
                for b in &parts[i + 1..] {
                    proptest::prop_assert!(torus.region_distance(&a.points(), &b.points()) > r);
                }
            }
        }
    }
}
