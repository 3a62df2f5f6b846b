//! Monomial operator words on qutrit⊗qubit edges and their linear
//! combinations.
//!
//! Every primitive factor (X, Z, σ^X, σ^Z, K and ω phases, including the
//! operator-valued exponents built from σ^Z) maps a basis state |ℓ, m⟩ to a
//! phase times another basis state, so a word is a generalized permutation and
//! can be applied to dense states in one pass.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

pub use crate::geometry::Edge;

/// Integer exponent, possibly depending on σ^Z eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Const(i32),
    /// `coeff · Π σ^Z_e`
    Sigma { coeff: i32, edges: Vec<Edge> },
    /// `coeff · (1 − Π σ^Z_e)/2`
    HalfOneMinus { coeff: i32, edges: Vec<Edge> },
}

impl Exponent {
    pub fn sigma(coeff: i32, edges: &[Edge]) -> Exponent {
        Exponent::Sigma {
            coeff,
            edges: edges.to_vec(),
        }
    }

    fn negated(&self) -> Exponent {
        match self {
            Exponent::Const(c) => Exponent::Const(-c),
            Exponent::Sigma { coeff, edges } => Exponent::Sigma {
                coeff: -coeff,
                edges: edges.clone(),
            },
            Exponent::HalfOneMinus { coeff, edges } => Exponent::HalfOneMinus {
                coeff: -coeff,
                edges: edges.clone(),
            },
        }
    }

    fn edges(&self) -> &[Edge] {
        match self {
            Exponent::Const(_) => &[],
            Exponent::Sigma { edges, .. } | Exponent::HalfOneMinus { edges, .. } => edges,
        }
    }

    pub fn eval(&self, sigma: impl Fn(Edge) -> i32) -> i32 {
        match self {
            Exponent::Const(c) => *c,
            Exponent::Sigma { coeff, edges } => coeff * edges.iter().map(|&e| sigma(e)).product::<i32>(),
            Exponent::HalfOneMinus { coeff, edges } => {
                let p: i32 = edges.iter().map(|&e| sigma(e)).product();
                coeff * (1 - p) / 2
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    X(Edge, Exponent),
    Z(Edge, Exponent),
    SigmaX(Edge),
    SigmaZ(Edge),
    K(Edge),
    /// Global phase ω^k.
    Omega(Exponent),
}

impl Factor {
    fn inverse(&self) -> Factor {
        match self {
            Factor::X(e, k) => Factor::X(*e, k.negated()),
            Factor::Z(e, k) => Factor::Z(*e, k.negated()),
            Factor::Omega(k) => Factor::Omega(k.negated()),
            other => other.clone(),
        }
    }

    fn support(&self, out: &mut BTreeSet<Edge>) {
        match self {
            Factor::X(e, k) | Factor::Z(e, k) => {
                out.insert(*e);
                out.extend(k.edges().iter().copied());
            }
            Factor::SigmaX(e) | Factor::SigmaZ(e) | Factor::K(e) => {
                out.insert(*e);
            }
            Factor::Omega(k) => out.extend(k.edges().iter().copied()),
        }
    }
}

/// Ordered product of factors; the last factor acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word {
    pub factors: Vec<Factor>,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn new(factors: Vec<Factor>) -> Word {
        Word { factors }
    }

    pub fn single(f: Factor) -> Word {
        Word { factors: vec![f] }
    }

    pub fn then(&self, other: &Word) -> Word {
        // self · other
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Word { factors }
    }

    pub fn inverse(&self) -> Word {
        Word {
            factors: self.factors.iter().rev().map(Factor::inverse).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Word {
        let mut w = Word::identity();
        for _ in 0..n {
            w = w.then(self);
        }
        w
    }

    /// Group commutator V W V⁻¹ W⁻¹.
    pub fn commutator(v: &Word, w: &Word) -> Word {
        v.then(w).then(&v.inverse()).then(&w.inverse())
    }

    pub fn support(&self) -> BTreeSet<Edge> {
        let mut out = BTreeSet::new();
        for f in &self.factors {
            f.support(&mut out);
        }
        out
    }

    /// Replaces every σ^Z-dependent exponent by its value for fixed
    /// σ^Z eigenvalues.
    pub fn specialize(&self, sigma: impl Fn(Edge) -> i32) -> Word {
        let fix = |k: &Exponent| Exponent::Const(k.eval(&sigma));
        Word {
            factors: self
                .factors
                .iter()
                .map(|f| match f {
                    Factor::X(e, k) => Factor::X(*e, fix(k)),
                    Factor::Z(e, k) => Factor::Z(*e, fix(k)),
                    Factor::Omega(k) => Factor::Omega(fix(k)),
                    other => other.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |edges: &[Edge]| edges.iter().map(|e| format!("sz{e}")).collect::<Vec<_>>().join("*");
        match self {
            Exponent::Const(c) => write!(f, "{c}"),
            Exponent::Sigma { coeff, edges } => write!(f, "{coeff}*{}", list(edges)),
            Exponent::HalfOneMinus { coeff, edges } => write!(f, "{coeff}*(1-{})/2", list(edges)),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let power = |name: &str, e: &Edge, k: &Exponent, f: &mut fmt::Formatter<'_>| match k {
            Exponent::Const(c) => match c.rem_euclid(3) {
                0 => write!(f, "1"),
                1 => write!(f, "{name}{e}"),
                _ => write!(f, "{name}^-1{e}"),
            },
            other => write!(f, "{name}{e}^({other})"),
        };
        match self {
            Factor::X(e, k) => power("X", e, k, f),
            Factor::Z(e, k) => power("Z", e, k, f),
            Factor::SigmaX(e) => write!(f, "sx{e}"),
            Factor::SigmaZ(e) => write!(f, "sz{e}"),
            Factor::K(e) => write!(f, "K{e}"),
            Factor::Omega(k) => write!(f, "w^({k})"),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
}

pub fn omega_pow(k: i32) -> Complex64 {
    match k.rem_euclid(3) {
        0 => Complex64::new(1.0, 0.0),
        1 => omega(),
        _ => omega().conj(),
    }
}

/// Linear combination Σ c_i W_i.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Operator {
    pub terms: Vec<(Complex64, Word)>,
}

impl Operator {
    pub fn zero() -> Operator {
        Operator::default()
    }

    pub fn identity() -> Operator {
        Operator::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Operator {
        Operator {
            terms: vec![(Complex64::new(1.0, 0.0), w)],
        }
    }

    pub fn scaled(mut self, c: Complex64) -> Operator {
        for t in &mut self.terms {
            t.0 *= c;
        }
        self
    }

    pub fn plus(mut self, other: Operator) -> Operator {
        self.terms.extend(other.terms);
        self
    }

    pub fn minus(self, other: Operator) -> Operator {
        self.plus(other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Operator product self · other.
    pub fn times(&self, other: &Operator) -> Operator {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, wa) in &self.terms {
            for (b, wb) in &other.terms {
                terms.push((a * b, wa.then(wb)));
            }
        }
        Operator { terms }
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            terms: self
                .terms
                .iter()
                .map(|(c, w)| (c.conj(), adjoint_word(w)))
                .collect(),
        }
    }

    pub fn support(&self) -> BTreeSet<Edge> {
        let mut out = BTreeSet::new();
        for (_, w) in &self.terms {
            out.extend(w.support());
        }
        out
    }
}

/// All factors are unitary, so the adjoint of a word is its inverse.
fn adjoint_word(w: &Word) -> Word {
    w.inverse()
}

impl From<Word> for Operator {
    fn from(w: Word) -> Operator {
        Operator::from_word(w)
    }
}
