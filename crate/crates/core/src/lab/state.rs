//! Dense states over a handful of qutrit⊗qubit edges.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::operator::{omega_pow, Edge, Exponent, Factor, Operator, Word};
use super::LabError;

pub const LOCAL_DIM: usize = 6;
pub const MAX_EDGES: usize = 8;

/// Basis configuration: qutrit levels per slot and qubit bits as a mask.
#[derive(Clone, Copy)]
struct Config {
    qutrit: [u8; MAX_EDGES],
    qubits: u8,
}

impl Config {
    fn decode(mut i: usize, n: usize) -> Config {
        let mut c = Config {
            qutrit: [0; MAX_EDGES],
            qubits: 0,
        };
        for k in 0..n {
            let d = i % LOCAL_DIM;
            i /= LOCAL_DIM;
            c.qutrit[k] = (d / 2) as u8;
            c.qubits |= ((d % 2) as u8) << k;
        }
        c
    }

    fn encode(&self, n: usize) -> usize {
        let mut j = 0usize;
        for k in (0..n).rev() {
            j = j * LOCAL_DIM + (2 * self.qutrit[k] + ((self.qubits >> k) & 1)) as usize;
        }
        j
    }
}

#[derive(Clone, Copy)]
enum SlotExp {
    Const(i32),
    Sigma(i32, u8),
    HalfOneMinus(i32, u8),
}

impl SlotExp {
    #[inline]
    fn eval(self, qubits: u8) -> i32 {
        let prod = |mask: u8| if (qubits & mask).count_ones() % 2 == 0 { 1 } else { -1 };
        match self {
            SlotExp::Const(c) => c,
            SlotExp::Sigma(c, mask) => c * prod(mask),
            SlotExp::HalfOneMinus(c, mask) => c * (1 - prod(mask)) / 2,
        }
    }
}

#[derive(Clone, Copy)]
enum SlotFactor {
    X(usize, SlotExp),
    Z(usize, SlotExp),
    SigmaX(usize),
    SigmaZ(usize),
    K(usize),
    Omega(SlotExp),
}

/// A word with edges resolved to positions in a fixed edge list, in
/// application order.
struct ResolvedWord(Vec<SlotFactor>);

impl ResolvedWord {
    fn new(w: &Word, edges: &[Edge]) -> Result<ResolvedWord, LabError> {
        let slot = |e: &Edge| {
            edges
                .iter()
                .position(|x| x == e)
                .ok_or(LabError::SupportMismatch(*e))
        };
        let mask = |list: &[Edge]| -> Result<u8, LabError> {
            // repeated edges cancel in a product of σ^Z
            list.iter().try_fold(0u8, |m, e| Ok(m ^ (1 << slot(e)?)))
        };
        let exp = |k: &Exponent| -> Result<SlotExp, LabError> {
            Ok(match k {
                Exponent::Const(c) => SlotExp::Const(*c),
                Exponent::Sigma { coeff, edges } => SlotExp::Sigma(*coeff, mask(edges)?),
                Exponent::HalfOneMinus { coeff, edges } => SlotExp::HalfOneMinus(*coeff, mask(edges)?),
            })
        };
        let mut out = Vec::with_capacity(w.factors.len());
        for f in w.factors.iter().rev() {
            out.push(match f {
                Factor::X(e, k) => SlotFactor::X(slot(e)?, exp(k)?),
                Factor::Z(e, k) => SlotFactor::Z(slot(e)?, exp(k)?),
                Factor::SigmaX(e) => SlotFactor::SigmaX(slot(e)?),
                Factor::SigmaZ(e) => SlotFactor::SigmaZ(slot(e)?),
                Factor::K(e) => SlotFactor::K(slot(e)?),
                Factor::Omega(k) => SlotFactor::Omega(exp(k)?),
            });
        }
        Ok(ResolvedWord(out))
    }

    /// Maps the configuration in place and returns the phase as
    /// (power of ω mod 3, sign flip).
    #[inline]
    fn act_code(&self, c: &mut Config) -> (u8, bool) {
        let mut phase_exp: i32 = 0;
        let mut negative = false;
        for f in &self.0 {
            match *f {
                SlotFactor::X(s, k) => {
                    let k = k.eval(c.qubits);
                    c.qutrit[s] = ((c.qutrit[s] as i32 + k).rem_euclid(3)) as u8;
                }
                SlotFactor::Z(s, k) => phase_exp += k.eval(c.qubits) * c.qutrit[s] as i32,
                SlotFactor::SigmaX(s) => c.qubits ^= 1 << s,
                SlotFactor::SigmaZ(s) => negative ^= (c.qubits >> s) & 1 == 1,
                SlotFactor::K(s) => c.qutrit[s] = (3 - c.qutrit[s]) % 3,
                SlotFactor::Omega(k) => phase_exp += k.eval(c.qubits),
            }
        }
        (phase_exp.rem_euclid(3) as u8, negative)
    }

    #[inline]
    fn act(&self, c: &mut Config) -> Complex64 {
        let (k, negative) = self.act_code(c);
        phase_of(k, negative)
    }
}

#[inline]
fn phase_of(k: u8, negative: bool) -> Complex64 {
    let ph = omega_pow(k as i32);
    if negative {
        -ph
    } else {
        ph
    }
}

/// Residual ‖(L − R)ψ‖ for each amplitude vector in `states`, for words L
/// and R over `edges`. Uses ‖(L − R)ψ‖ = ‖(R⁻¹L − 1)ψ‖ and gathers through
/// the permutation of L⁻¹R.
pub fn word_identity_residuals(
    lhs: &Word,
    rhs: &Word,
    edges: &[Edge],
    states: &[Vec<Complex64>],
) -> Result<Vec<f64>, LabError> {
    let n = edges.len();
    let inv = ResolvedWord::new(&lhs.inverse().then(rhs), edges)?;
    let dim = LOCAL_DIM.pow(n as u32);
    let map: Vec<(u32, u8)> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut cfg = Config::decode(j, n);
            let (k, neg) = inv.act_code(&mut cfg);
            (cfg.encode(n) as u32, k | (neg as u8) << 2)
        })
        .collect();
    let table: Vec<Complex64> = (0..8u8).map(|c| phase_of(c & 3, c & 4 != 0).conj()).collect();
    Ok(states
        .iter()
        .map(|amps| {
            map.iter()
                .zip(amps)
                .map(|(&(i, code), a)| (table[code as usize] * amps[i as usize] - a).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// Dense complex vector on `edges.len()` edges, basis digit `2ℓ + m` per edge
/// with the first edge least significant.
#[derive(Clone, Debug)]
pub struct SmallState {
    edges: Vec<Edge>,
    pub amps: Vec<Complex64>,
}

impl SmallState {
    pub fn zero(edges: Vec<Edge>) -> Result<SmallState, LabError> {
        if edges.len() > MAX_EDGES {
            return Err(LabError::TooManyEdges(edges.len()));
        }
        let dim = LOCAL_DIM.pow(edges.len() as u32);
        Ok(SmallState {
            edges,
            amps: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    /// Product basis state; `levels[i] = (ℓ, m)` for `edges[i]`.
    pub fn basis(edges: Vec<Edge>, levels: &[(u8, u8)]) -> Result<SmallState, LabError> {
        let mut s = SmallState::zero(edges)?;
        let idx = levels
            .iter()
            .rev()
            .fold(0usize, |acc, &(l, m)| acc * LOCAL_DIM + (2 * l + m) as usize);
        s.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn random(edges: Vec<Edge>, rng: &mut impl Rng) -> Result<SmallState, LabError> {
        let mut s = SmallState::zero(edges)?;
        for a in s.amps.iter_mut() {
            *a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        s.normalize();
        Ok(s)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
        n
    }

    pub fn inner(&self, other: &SmallState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn distance(&self, other: &SmallState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn check_support(&self, support: &BTreeSet<Edge>) -> Result<(), LabError> {
        match support.iter().find(|e| !self.edges.contains(e)) {
            Some(e) => Err(LabError::SupportMismatch(*e)),
            None => Ok(()),
        }
    }

    /// Basis permutation and phases of a word on this state's edges:
    /// `W|i⟩ = phase[i] |target[i]⟩`.
    pub fn word_map(&self, w: &Word) -> Result<Vec<(u32, Complex64)>, LabError> {
        word_map(w, &self.edges)
    }

    pub fn apply_word(&self, w: &Word) -> Result<SmallState, LabError> {
        self.apply(&Operator::from_word(w.clone()))
    }

    /// `W|i⟩ = ph|π(i)⟩` gives `(Wψ)[j] = conj(ph') ψ[π⁻¹(j)]` where
    /// `W⁻¹|j⟩ = ph'|π⁻¹(j)⟩`, so words are applied by gathering without
    /// materializing the permutation.
    pub fn apply(&self, op: &Operator) -> Result<SmallState, LabError> {
        self.check_support(&op.support())?;
        let n = self.edges.len();
        let inverses = op
            .terms
            .iter()
            .map(|(c, w)| Ok((*c, ResolvedWord::new(&w.inverse(), &self.edges)?)))
            .collect::<Result<Vec<_>, LabError>>()?;
        let amps = (0..self.dim())
            .into_par_iter()
            .map(|j| {
                let mut total = Complex64::new(0.0, 0.0);
                for (c, inv) in &inverses {
                    let mut cfg = Config::decode(j, n);
                    let ph = inv.act(&mut cfg);
                    total += c * ph.conj() * self.amps[cfg.encode(n)];
                }
                total
            })
            .collect();
        Ok(SmallState {
            edges: self.edges.clone(),
            amps,
        })
    }

    /// Keeps only amplitudes whose qubit pattern equals `qubits` (ordered as
    /// `edges()`), i.e. projects onto that σ^Z outcome; the result is not
    /// renormalized.
    pub fn project_qubits(&self, qubits: &[u8]) -> SmallState {
        let n = self.edges.len();
        let want = qubits.iter().enumerate().fold(0u8, |m, (k, &b)| m | ((b & 1) << k));
        let amps = (0..self.dim())
            .into_par_iter()
            .map(|i| {
                if Config::decode(i, n).qubits == want {
                    self.amps[i]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        SmallState {
            edges: self.edges.clone(),
            amps,
        }
    }
}

fn word_map(w: &Word, edges: &[Edge]) -> Result<Vec<(u32, Complex64)>, LabError> {
    let n = edges.len();
    let resolved = ResolvedWord::new(w, edges)?;
    let dim = LOCAL_DIM.pow(n as u32);
    Ok((0..dim)
        .into_par_iter()
        .map(|i| {
            let mut cfg = Config::decode(i, n);
            let ph = resolved.act(&mut cfg);
            (cfg.encode(n) as u32, ph)
        })
        .collect())
}

/// Operator with every word pre-mapped onto a fixed edge ordering.
pub struct CompiledOperator {
    dim: usize,
    terms: Vec<(Complex64, Vec<(u32, Complex64)>)>,
}

impl CompiledOperator {
    pub fn new(op: &Operator, edges: &[Edge]) -> Result<CompiledOperator, LabError> {
        if edges.len() > MAX_EDGES {
            return Err(LabError::TooManyEdges(edges.len()));
        }
        let terms = op
            .terms
            .iter()
            .map(|(c, w)| Ok((*c, word_map(w, edges)?)))
            .collect::<Result<Vec<_>, LabError>>()?;
        Ok(CompiledOperator {
            dim: LOCAL_DIM.pow(edges.len() as u32),
            terms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Complex64, Vec<(u32, Complex64)>)] {
        &self.terms
    }

    pub fn apply(&self, s: &SmallState) -> SmallState {
        let mut out = vec![Complex64::new(0.0, 0.0); s.dim()];
        for (c, map) in &self.terms {
            for (i, &(j, ph)) in map.iter().enumerate() {
                out[j as usize] += c * ph * s.amps[i];
            }
        }
        SmallState {
            edges: s.edges.clone(),
            amps: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::operator::{omega, Exponent, Factor};
    use rand::SeedableRng;

    fn e0() -> Edge {
        Edge::Horizontal(0, 0)
    }

    #[test]
    fn z_phase_on_basis() {
        let s = SmallState::basis(vec![e0()], &[(1, 0)]).unwrap();
        let out = s
            .apply_word(&Word::single(Factor::Z(e0(), Exponent::Const(1))))
            .unwrap();
        let expect = SmallState::basis(vec![e0()], &[(1, 0)]).unwrap();
        assert!((expect.inner(&out) - omega()).norm() < 1e-14);
    }

    #[test]
    fn identity_word() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let s = SmallState::random(vec![e0(), Edge::Vertical(0, 0)], &mut rng).unwrap();
        let out = s.apply_word(&Word::identity()).unwrap();
        assert!(out.distance(&s) < 1e-14);
    }

    #[test]
    fn conjugated_shift_is_inverse_shift() {
        // K X K† = X† : K·X·K|0,0⟩ = |2,0⟩
        let w = Word::new(vec![
            Factor::K(e0()),
            Factor::X(e0(), Exponent::Const(1)),
            Factor::K(e0()),
        ]);
        let s = SmallState::basis(vec![e0()], &[(0, 0)]).unwrap();
        let out = s.apply_word(&w).unwrap();
        let expect = SmallState::basis(vec![e0()], &[(2, 0)]).unwrap();
        assert!(out.distance(&expect) < 1e-14);
    }

    #[test]
    fn support_mismatch_is_reported() {
        let s = SmallState::basis(vec![e0()], &[(0, 0)]).unwrap();
        let w = Word::single(Factor::SigmaX(Edge::Vertical(3, 3)));
        assert!(matches!(s.apply_word(&w), Err(LabError::SupportMismatch(_))));
    }

    #[test]
    fn pauli_relations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let s = SmallState::random(vec![e0()], &mut rng).unwrap();
        let x = Factor::X(e0(), Exponent::Const(1));
        let z = Factor::Z(e0(), Exponent::Const(1));
        // Z X = ω X Z
        let zx = s.apply_word(&Word::new(vec![z.clone(), x.clone()])).unwrap();
        let mut xz = s.apply_word(&Word::new(vec![x.clone(), z.clone()])).unwrap();
        xz.amps.iter_mut().for_each(|a| *a *= omega());
        assert!(zx.distance(&xz) < 1e-13);
        // σZ σX = −σX σZ
        let sz = Factor::SigmaZ(e0());
        let sx = Factor::SigmaX(e0());
        let a = s.apply_word(&Word::new(vec![sz.clone(), sx.clone()])).unwrap();
        let mut b = s.apply_word(&Word::new(vec![sx, sz])).unwrap();
        b.amps.iter_mut().for_each(|v| *v = -*v);
        assert!(a.distance(&b) < 1e-13);
        // X³ = 1
        let x3 = s.apply_word(&Word::single(x).pow(3)).unwrap();
        assert!(x3.distance(&s) < 1e-13);
    }
}
