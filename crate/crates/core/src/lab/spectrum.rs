//! Exact spectra of sums of monomial words.
//!
//! The matrix of such an operator is sparse with at most one entry per word
//! in every column. Its connected components (basis states linked by some
//! word) are tiny, so each block is diagonalized densely.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use petgraph::unionfind::UnionFind;

use super::operator::{Edge, Operator};
use super::state::CompiledOperator;
use super::LabError;

const MAX_BLOCK: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Distinct eigenvalues (merged within `tol`), ascending, with
    /// multiplicities.
    pub values: Vec<(f64, usize)>,
    pub trace: Complex64,
    /// Largest deviation from Hermiticity over all blocks.
    pub hermiticity_defect: f64,
}

impl Spectrum {
    pub fn distinct(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.0).collect()
    }

    pub fn matches(&self, expected: &[f64], tol: f64) -> bool {
        self.values.len() == expected.len()
            && self
                .values
                .iter()
                .zip(expected)
                .all(|((v, _), e)| (v - e).abs() < tol)
    }
}

pub fn spectrum(op: &Operator, tol: f64) -> Result<Spectrum, LabError> {
    let edges: Vec<Edge> = op.support().into_iter().collect();
    let compiled = CompiledOperator::new(op, &edges)?;
    let dim = compiled.dim();

    let mut uf = UnionFind::<u32>::new(dim);
    for (_, map) in compiled.terms() {
        for (i, &(j, _)) in map.iter().enumerate() {
            uf.union(i as u32, j);
        }
    }
    let mut blocks: HashMap<u32, Vec<u32>> = HashMap::new();
    for i in 0..dim as u32 {
        blocks.entry(uf.find(i)).or_default().push(i);
    }

    let mut eigen: Vec<f64> = Vec::with_capacity(dim);
    let mut trace = Complex64::new(0.0, 0.0);
    let mut defect: f64 = 0.0;
    for members in blocks.values() {
        let n = members.len();
        if n > MAX_BLOCK {
            return Err(LabError::BlockTooLarge(n));
        }
        let pos: HashMap<u32, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (coef, map) in compiled.terms() {
            for (col, &i) in members.iter().enumerate() {
                let (j, ph) = map[i as usize];
                m[(pos[&j], col)] += coef * ph;
            }
        }
        for k in 0..n {
            trace += m[(k, k)];
        }
        defect = (&m - m.adjoint()).iter().fold(defect, |d, z| d.max(z.norm()));
        let eig = m.symmetric_eigenvalues();
        eigen.extend(eig.iter().copied());
    }

    eigen.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let mut values: Vec<(f64, usize)> = Vec::new();
    for v in eigen {
        match values.last_mut() {
            Some((last, count)) if (v - *last).abs() < tol => *count += 1,
            _ => values.push((v, 1)),
        }
    }
    Ok(Spectrum {
        values,
        trace,
        hermiticity_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::operator::{Factor, Word};

    #[test]
    fn sigma_z_spectrum() {
        let e = Edge::Horizontal(0, 0);
        let op = Operator::from_word(Word::single(Factor::SigmaZ(e)));
        let s = spectrum(&op, 1e-10).unwrap();
        assert!(s.matches(&[-1.0, 1.0], 1e-10));
        assert_eq!(s.values, vec![(-1.0, 3), (1.0, 3)]);
        assert!(s.trace.norm() < 1e-12);
    }

    #[test]
    fn shift_plus_inverse() {
        // X + X† has eigenvalues 2cos(2πk/3) = {2, -1, -1}
        let e = Edge::Horizontal(0, 0);
        let w = Word::single(crate::lab::stabilizers::x(e, 1));
        let op = Operator::from_word(w.clone()).plus(Operator::from_word(w.inverse()));
        let s = spectrum(&op, 1e-10).unwrap();
        assert!(s.matches(&[-1.0, 2.0], 1e-10));
        assert_eq!(s.values[0].1, 4);
    }
}
