//! Anyon content of the D(S3) quantum double: charge labels, quantum
//! dimensions, fusion multiplicities and the ℤ₃×ℤ₃×ℤ₂ micro-labels used by
//! the frame simulator.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// A D(S3) anyon type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Charge {
    Vacuum,
    Eta,
    Mu,
    Phi,
    E,
    M,
    F,
    G,
}

impl Charge {
    pub const ALL: [Charge; 8] = [
        Charge::Vacuum,
        Charge::Eta,
        Charge::Mu,
        Charge::Phi,
        Charge::E,
        Charge::M,
        Charge::F,
        Charge::G,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Charge {
        Charge::ALL[i]
    }

    /// Quantum dimension d_a.
    pub fn quantum_dim(self) -> u32 {
        match self {
            Charge::Vacuum | Charge::Eta => 1,
            Charge::Mu | Charge::Phi => 3,
            Charge::E | Charge::M | Charge::F | Charge::G => 2,
        }
    }

    pub fn is_abelian(self) -> bool {
        self.quantum_dim() == 1
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Charge::Vacuum => "1",
            Charge::Eta => "eta",
            Charge::Mu => "mu",
            Charge::Phi => "phi",
            Charge::E => "e",
            Charge::M => "m",
            Charge::F => "f",
            Charge::G => "g",
        }
    }

    pub fn parse(s: &str) -> Option<Charge> {
        Charge::ALL.into_iter().find(|c| c.symbol() == s)
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

pub fn quantum_dim(a: Charge) -> u32 {
    a.quantum_dim()
}

/// Fusion rules that are stated outright for D(S3). Each entry is an
/// unordered pair and its outcome list (with multiplicity by repetition).
/// Pairs absent from this list are filled in by [`complete_fusion_rules`].
fn stated_rules() -> Vec<(Charge, Charge, Vec<Charge>)> {
    use Charge::*;
    let mut rules = Vec::new();
    for a in Charge::ALL {
        rules.push((Vacuum, a, vec![a]));
    }
    rules.extend([
        (Eta, Eta, vec![Vacuum]),
        (Eta, Mu, vec![Phi]),
        (Eta, E, vec![E]),
        (Eta, M, vec![M]),
        (Mu, Mu, vec![Vacuum, E, M, F, G]),
        (Mu, Phi, vec![Eta, E, M, F, G]),
        (Mu, E, vec![Mu, Phi]),
        (Mu, M, vec![Mu, Phi]),
        (Phi, Phi, vec![Vacuum, E, M, F, G]),
        (E, E, vec![Vacuum, Eta, E]),
        (M, M, vec![Vacuum, Eta, M]),
        (F, F, vec![Vacuum, Eta, F]),
        (G, G, vec![Vacuum, Eta, G]),
        (E, M, vec![F, G]),
        (F, G, vec![E, M]),
        (E, F, vec![M, G]),
        (E, G, vec![M, F]),
        (M, F, vec![E, G]),
        (M, G, vec![E, F]),
    ]);
    rules
}

type Tensor = [[[u32; 8]; 8]; 8];

/// Fusion multiplicities N_ab^c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionTable {
    n: Tensor,
    /// Unordered pairs whose outcomes were solved for rather than stated.
    derived: BTreeSet<(Charge, Charge)>,
}

/// Failure to close the fusion ring from the stated rules.
#[derive(Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("fusion completion has {0} solutions, expected exactly one")]
    Completion(usize),
}

/// Completes the stated rules into a full fusion ring.
///
/// All D(S3) charges are self-dual, so N_ab^c is symmetric under any
/// permutation of (a, b, c). A triple is known once any of its three pairs is
/// stated. The remaining triples are enumerated over {0, 1, 2} and filtered by
/// dimension consistency and associativity. Returns every consistent
/// completion.
pub fn complete_fusion_rules() -> Vec<FusionTable> {
    let mut known = [[[None::<u32>; 8]; 8]; 8];
    let mut stated_pairs = BTreeSet::new();
    for (a, b, outs) in stated_rules() {
        stated_pairs.insert(ordered(a, b));
        for c in Charge::ALL {
            let mult = outs.iter().filter(|&&o| o == c).count() as u32;
            for (x, y, z) in permutations(a, b, c) {
                known[x.index()][y.index()][z.index()] = Some(mult);
            }
        }
    }

    let mut unknown: Vec<[Charge; 3]> = Vec::new();
    for a in Charge::ALL {
        for b in Charge::ALL {
            for c in Charge::ALL {
                if a <= b && b <= c && known[a.index()][b.index()][c.index()].is_none() {
                    unknown.push([a, b, c]);
                }
            }
        }
    }

    let mut derived = BTreeSet::new();
    for a in Charge::ALL {
        for b in Charge::ALL {
            if a <= b && !stated_pairs.contains(&(a, b)) {
                derived.insert((a, b));
            }
        }
    }

    let mut solutions = Vec::new();
    let combos = 3usize.pow(unknown.len() as u32);
    for code in 0..combos {
        let mut n: Tensor = [[[0; 8]; 8]; 8];
        let mut rest = code;
        let mut guess = known;
        for t in &unknown {
            let v = (rest % 3) as u32;
            rest /= 3;
            for (x, y, z) in permutations(t[0], t[1], t[2]) {
                guess[x.index()][y.index()][z.index()] = Some(v);
            }
        }
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    n[a][b][c] = guess[a][b][c].expect("every triple assigned");
                }
            }
        }
        let table = FusionTable {
            n,
            derived: derived.clone(),
        };
        if table.dimension_violations().is_empty() && table.associativity_violations().is_empty() {
            solutions.push(table);
        }
    }
    solutions
}

fn ordered(a: Charge, b: Charge) -> (Charge, Charge) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn permutations(a: Charge, b: Charge, c: Charge) -> [(Charge, Charge, Charge); 6] {
    [
        (a, b, c),
        (a, c, b),
        (b, a, c),
        (b, c, a),
        (c, a, b),
        (c, b, a),
    ]
}

impl FusionTable {
    /// The unique completion of the D(S3) fusion rules.
    pub fn ds3() -> Result<FusionTable, AlgebraError> {
        let mut sols = complete_fusion_rules();
        if sols.len() == 1 {
            Ok(sols.remove(0))
        } else {
            Err(AlgebraError::Completion(sols.len()))
        }
    }

    /// Shared instance; the completion is unique so this never fails.
    pub fn global() -> &'static FusionTable {
        static TABLE: OnceLock<FusionTable> = OnceLock::new();
        TABLE.get_or_init(|| FusionTable::ds3().expect("D(S3) fusion ring completes uniquely"))
    }

    pub fn multiplicity(&self, a: Charge, b: Charge, c: Charge) -> u32 {
        self.n[a.index()][b.index()][c.index()]
    }

    pub fn is_derived(&self, a: Charge, b: Charge) -> bool {
        self.derived.contains(&ordered(a, b))
    }

    pub fn derived_pairs(&self) -> impl Iterator<Item = &(Charge, Charge)> {
        self.derived.iter()
    }

    /// Outcomes of a × b, repeated according to multiplicity.
    pub fn fuse(&self, a: Charge, b: Charge) -> Vec<Charge> {
        let mut out = Vec::new();
        for c in Charge::ALL {
            for _ in 0..self.multiplicity(a, b, c) {
                out.push(c);
            }
        }
        out
    }

    pub fn support(&self, a: Charge, b: Charge) -> BTreeSet<Charge> {
        Charge::ALL
            .into_iter()
            .filter(|&c| self.multiplicity(a, b, c) > 0)
            .collect()
    }

    pub fn commutativity_violations(&self) -> Vec<(Charge, Charge, Charge)> {
        let mut bad = Vec::new();
        for a in Charge::ALL {
            for b in Charge::ALL {
                for c in Charge::ALL {
                    if self.multiplicity(a, b, c) != self.multiplicity(b, a, c) {
                        bad.push((a, b, c));
                    }
                }
            }
        }
        bad
    }

    pub fn unit_violations(&self) -> Vec<(Charge, Charge)> {
        let mut bad = Vec::new();
        for a in Charge::ALL {
            for c in Charge::ALL {
                let expect = u32::from(a == c);
                if self.multiplicity(Charge::Vacuum, a, c) != expect {
                    bad.push((a, c));
                }
            }
        }
        bad
    }

    pub fn dimension_violations(&self) -> Vec<(Charge, Charge)> {
        let mut bad = Vec::new();
        for a in Charge::ALL {
            for b in Charge::ALL {
                let rhs: u32 = Charge::ALL
                    .into_iter()
                    .map(|c| self.multiplicity(a, b, c) * c.quantum_dim())
                    .sum();
                if a.quantum_dim() * b.quantum_dim() != rhs {
                    bad.push((a, b));
                }
            }
        }
        bad
    }

    pub fn associativity_violations(&self) -> Vec<(Charge, Charge, Charge, Charge)> {
        let mut bad = Vec::new();
        for a in Charge::ALL {
            for b in Charge::ALL {
                for c in Charge::ALL {
                    for d in Charge::ALL {
                        let left: u32 = Charge::ALL
                            .into_iter()
                            .map(|x| self.multiplicity(a, b, x) * self.multiplicity(x, c, d))
                            .sum();
                        let right: u32 = Charge::ALL
                            .into_iter()
                            .map(|y| self.multiplicity(b, c, y) * self.multiplicity(a, y, d))
                            .sum();
                        if left != right {
                            bad.push((a, b, c, d));
                        }
                    }
                }
            }
        }
        bad
    }

    /// Every charge reachable as the total charge of `charges`.
    pub fn possible_total_charges(&self, charges: &[Charge]) -> BTreeSet<Charge> {
        let mut totals = BTreeSet::from([Charge::Vacuum]);
        for &x in charges {
            let mut next = BTreeSet::new();
            for &s in &totals {
                next.extend(self.support(s, x));
            }
            totals = next;
        }
        totals
    }

    pub fn is_neutralizable(&self, charges: &[Charge]) -> bool {
        self.possible_total_charges(charges).contains(&Charge::Vacuum)
    }

    /// 8×8 map of outcome lists, keyed by charge symbol.
    pub fn to_json(&self) -> serde_json::Value {
        let mut rows = serde_json::Map::new();
        for a in Charge::ALL {
            let mut row = serde_json::Map::new();
            for b in Charge::ALL {
                let outs: Vec<&str> = self.fuse(a, b).into_iter().map(Charge::symbol).collect();
                row.insert(b.symbol().to_string(), serde_json::json!(outs));
            }
            rows.insert(a.symbol().to_string(), serde_json::Value::Object(row));
        }
        serde_json::json!({
            "fusion": rows,
            "derived_pairs": self
                .derived
                .iter()
                .map(|(a, b)| format!("{a}x{b}"))
                .collect::<Vec<_>>(),
        })
    }
}

pub fn fuse(a: Charge, b: Charge) -> Vec<Charge> {
    FusionTable::global().fuse(a, b)
}

pub fn possible_total_charges(charges: &[Charge]) -> BTreeSet<Charge> {
    FusionTable::global().possible_total_charges(charges)
}

pub fn is_neutralizable(charges: &[Charge]) -> bool {
    FusionTable::global().is_neutralizable(charges)
}

/// ℤ₃ electric and magnetic charge plus the ℤ₂ η bit carried by a site or
/// accumulator in the frame simulator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MicroCharge {
    pub e: u8,
    pub m: u8,
    pub eta: u8,
}

/// (e, m) pairs that the f projector selects; the conjugate pairs (1,2) and
/// (2,1) belong to g. Fixed by evaluating the parafermion projectors on
/// eigenstates of the vertex/plaquette pair, see the stabilizer lab tests.
pub const PARAFERMION_F: [(u8, u8); 2] = [(1, 1), (2, 2)];

impl MicroCharge {
    pub const VACUUM: MicroCharge = MicroCharge { e: 0, m: 0, eta: 0 };

    pub fn new(e: i64, m: i64, eta: i64) -> MicroCharge {
        MicroCharge {
            e: e.rem_euclid(3) as u8,
            m: m.rem_euclid(3) as u8,
            eta: eta.rem_euclid(2) as u8,
        }
    }

    pub fn electric(e: i64) -> MicroCharge {
        MicroCharge::new(e, 0, 0)
    }

    pub fn magnetic(m: i64) -> MicroCharge {
        MicroCharge::new(0, m, 0)
    }

    pub fn is_vacuum(self) -> bool {
        self == MicroCharge::VACUUM
    }

    pub fn conjugate(self) -> MicroCharge {
        MicroCharge::new(-(self.e as i64), -(self.m as i64), self.eta as i64)
    }

    pub fn add(self, other: MicroCharge) -> MicroCharge {
        MicroCharge::new(
            (self.e + other.e) as i64,
            (self.m + other.m) as i64,
            (self.eta + other.eta) as i64,
        )
    }

    pub fn neg(self) -> MicroCharge {
        MicroCharge::new(-(self.e as i64), -(self.m as i64), self.eta as i64)
    }

    /// All 18 micro-labels.
    pub fn all() -> impl Iterator<Item = MicroCharge> {
        (0..3).flat_map(|e| (0..3).flat_map(move |m| (0..2).map(move |eta| MicroCharge::new(e, m, eta))))
    }

    /// The D(S3) orbit this micro-label belongs to. The η bit only matters
    /// when both ℤ₃ components vanish.
    pub fn orbit(self) -> Charge {
        match (self.e, self.m) {
            (0, 0) if self.eta == 0 => Charge::Vacuum,
            (0, 0) => Charge::Eta,
            (_, 0) => Charge::E,
            (0, _) => Charge::M,
            pair if PARAFERMION_F.contains(&pair) => Charge::F,
            _ => Charge::G,
        }
    }
}

pub fn orbit_of(x: MicroCharge) -> Charge {
    x.orbit()
}

pub fn conjugate(x: MicroCharge) -> MicroCharge {
    x.conjugate()
}

impl fmt::Display for MicroCharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.e, self.m, self.eta)
    }
}
