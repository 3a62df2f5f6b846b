//! Small lattices and the microscopic stabilizer words.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{Edge, Exponent, Factor, Operator, Word};
use super::LabError;

/// Either a `width × height` torus or an open patch of plaquettes
/// `[0, width) × [0, height)` whose vertices run over `[0, width] × [0, height]`.
/// Operators on an open patch keep their dangling edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabLattice {
    pub width: i32,
    pub height: i32,
    pub periodic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Site {
    Vertex(i32, i32),
    Plaquette(i32, i32),
    /// Vertex and plaquette jointly hosting a composite (F, G projectors).
    Pair { vertex: (i32, i32), plaquette: (i32, i32) },
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Vertex(x, y) => write!(f, "v({x},{y})"),
            Site::Plaquette(x, y) => write!(f, "p({x},{y})"),
            Site::Pair { vertex, plaquette } => write!(
                f,
                "v({},{})+p({},{})",
                vertex.0, vertex.1, plaquette.0, plaquette.1
            ),
        }
    }
}

impl LabLattice {
    pub fn torus(width: i32, height: i32) -> LabLattice {
        LabLattice {
            width,
            height,
            periodic: true,
        }
    }

    pub fn patch(width: i32, height: i32) -> LabLattice {
        LabLattice {
            width,
            height,
            periodic: false,
        }
    }

    fn wrap(&self, e: Edge) -> Edge {
        if !self.periodic {
            return e;
        }
        let (w, h) = (self.width, self.height);
        match e {
            Edge::Horizontal(x, y) => Edge::Horizontal(x.rem_euclid(w), y.rem_euclid(h)),
            Edge::Vertical(x, y) => Edge::Vertical(x.rem_euclid(w), y.rem_euclid(h)),
        }
    }

    pub fn vertices(&self) -> Vec<(i32, i32)> {
        let extra = if self.periodic { 0 } else { 1 };
        let mut out = Vec::new();
        for y in 0..self.height + extra {
            for x in 0..self.width + extra {
                out.push((x, y));
            }
        }
        out
    }

    pub fn plaquettes(&self) -> Vec<(i32, i32)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                out.push((x, y));
            }
        }
        out
    }

    /// Edges of the lattice: all 2wh edges of a torus, or the boundary edges
    /// of every plaquette of a patch.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = std::collections::BTreeSet::new();
        for p in self.plaquettes() {
            out.extend(self.plaquette_edges(p));
        }
        out.into_iter().collect()
    }

    pub fn contains(&self, site: Site) -> bool {
        let v_ok = |(x, y): (i32, i32)| {
            let extra = if self.periodic { 0 } else { 1 };
            (0..self.width + extra).contains(&x) && (0..self.height + extra).contains(&y)
        };
        let p_ok = |(x, y): (i32, i32)| (0..self.width).contains(&x) && (0..self.height).contains(&y);
        match site {
            Site::Vertex(x, y) => v_ok((x, y)),
            Site::Plaquette(x, y) => p_ok((x, y)),
            Site::Pair { vertex, plaquette } => v_ok(vertex) && p_ok(plaquette),
        }
    }

    /// Incident edges of a vertex, ordered N, E, S, W.
    pub fn vertex_edges(&self, (x, y): (i32, i32)) -> [Edge; 4] {
        [
            self.wrap(Edge::Vertical(x, y)),
            self.wrap(Edge::Horizontal(x, y)),
            self.wrap(Edge::Vertical(x, y - 1)),
            self.wrap(Edge::Horizontal(x - 1, y)),
        ]
    }

    /// Boundary edges of a plaquette, ordered N, E, S, W. Its south-west
    /// corner is the vertex with the same coordinates.
    pub fn plaquette_edges(&self, (x, y): (i32, i32)) -> [Edge; 4] {
        [
            self.wrap(Edge::Horizontal(x, y + 1)),
            self.wrap(Edge::Vertical(x + 1, y)),
            self.wrap(Edge::Horizontal(x, y)),
            self.wrap(Edge::Vertical(x, y)),
        ]
    }

    pub fn is_south_west_corner(&self, v: (i32, i32), p: (i32, i32)) -> bool {
        if self.periodic {
            v.0.rem_euclid(self.width) == p.0.rem_euclid(self.width)
                && v.1.rem_euclid(self.height) == p.1.rem_euclid(self.height)
        } else {
            v == p
        }
    }
}

impl FromStr for LabLattice {
    type Err = LabError;

    /// `2x2` (torus) or `3x3-patch`.
    fn from_str(s: &str) -> Result<LabLattice, LabError> {
        let (dims, periodic) = match s.strip_suffix("-patch") {
            Some(d) => (d, false),
            None => (s, true),
        };
        let bad = || LabError::BadLattice(s.to_string());
        let (w, h) = dims.split_once('x').ok_or_else(bad)?;
        let w: i32 = w.parse().map_err(|_| bad())?;
        let h: i32 = h.parse().map_err(|_| bad())?;
        if w < 1 || h < 1 {
            return Err(bad());
        }
        Ok(LabLattice {
            width: w,
            height: h,
            periodic,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizerKind {
    Alpha,
    Beta,
    A,
    B,
    SV,
    SP,
    AZ3,
    BZ3,
    /// Literal parafermion operators (1 − A†B − AB†)/2 and (1 − AB − A†B†)/2.
    F,
    G,
    /// Idempotent versions (2 − A†B − AB†)/3 and (2 − AB − A†B†)/3.
    FProjector,
    GProjector,
}

impl StabilizerKind {
    pub const ALL: [StabilizerKind; 12] = [
        StabilizerKind::Alpha,
        StabilizerKind::Beta,
        StabilizerKind::A,
        StabilizerKind::B,
        StabilizerKind::SV,
        StabilizerKind::SP,
        StabilizerKind::AZ3,
        StabilizerKind::BZ3,
        StabilizerKind::F,
        StabilizerKind::G,
        StabilizerKind::FProjector,
        StabilizerKind::GProjector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StabilizerKind::Alpha => "alpha",
            StabilizerKind::Beta => "beta",
            StabilizerKind::A => "A",
            StabilizerKind::B => "B",
            StabilizerKind::SV => "S_v",
            StabilizerKind::SP => "S_p",
            StabilizerKind::AZ3 => "A_Z3",
            StabilizerKind::BZ3 => "B_Z3",
            StabilizerKind::F => "F",
            StabilizerKind::G => "G",
            StabilizerKind::FProjector => "F_proj",
            StabilizerKind::GProjector => "G_proj",
        }
    }
}

impl FromStr for StabilizerKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<StabilizerKind, LabError> {
        StabilizerKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| LabError::UnknownKind(s.to_string()))
    }
}

pub fn x(e: Edge, k: i32) -> Factor {
    Factor::X(e, Exponent::Const(k))
}

pub fn z(e: Edge, k: i32) -> Factor {
    Factor::Z(e, Exponent::Const(k))
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn alpha(lat: &LabLattice, v: (i32, i32)) -> Word {
    let [n, e, s, w] = lat.vertex_edges(v);
    Word::new(vec![
        Factor::K(n),
        Factor::SigmaX(n),
        Factor::K(e),
        Factor::SigmaX(e),
        Factor::SigmaX(s),
        Factor::SigmaX(w),
    ])
}

pub fn beta(lat: &LabLattice, p: (i32, i32)) -> Word {
    Word::new(lat.plaquette_edges(p).into_iter().map(Factor::SigmaZ).collect())
}

pub fn a_vertex(lat: &LabLattice, v: (i32, i32)) -> Word {
    let [n, e, s, w] = lat.vertex_edges(v);
    Word::new(vec![
        x(n, 1),
        x(e, 1),
        Factor::X(s, Exponent::sigma(-1, &[s])),
        Factor::X(w, Exponent::sigma(-1, &[w])),
    ])
}

/// Plaquette word; `kappa_via_beta` selects the σ^Z_S·β_p spelling of κ.
pub fn b_plaquette_with(lat: &LabLattice, p: (i32, i32), kappa_via_beta: bool) -> Word {
    let [n, e, s, w] = lat.plaquette_edges(p);
    let kappa = if kappa_via_beta {
        Exponent::sigma(-1, &[s, n, e, s, w])
    } else {
        Exponent::sigma(-1, &[w, n, e])
    };
    Word::new(vec![
        Factor::Z(n, Exponent::sigma(1, &[w])),
        Factor::Z(e, kappa),
        Factor::Z(s, Exponent::sigma(-1, &[n, e, s, w])),
        z(w, 1),
    ])
}

pub fn b_plaquette(lat: &LabLattice, p: (i32, i32)) -> Word {
    b_plaquette_with(lat, p, false)
}

pub fn a_z3(lat: &LabLattice, v: (i32, i32)) -> Word {
    let [n, e, s, w] = lat.vertex_edges(v);
    Word::new(vec![x(n, 1), x(e, 1), x(s, -1), x(w, -1)])
}

pub fn b_z3(lat: &LabLattice, p: (i32, i32)) -> Word {
    let [n, e, s, w] = lat.plaquette_edges(p);
    Word::new(vec![z(n, -1), z(e, 1), z(s, 1), z(w, -1)])
}

/// (W + W†)/2
pub fn hermitian_part(w: &Word) -> Operator {
    Operator::from_word(w.clone())
        .plus(Operator::from_word(w.inverse()))
        .scaled(c(0.5))
}

/// (1 + W + W²)/3, the projector onto W = 1 for W³ = 1.
pub fn trivial_projector(w: &Word) -> Operator {
    Operator::identity()
        .plus(Operator::from_word(w.clone()))
        .plus(Operator::from_word(w.inverse()))
        .scaled(c(1.0 / 3.0))
}

/// (1 + W)/2 for an involution W.
pub fn plus_projector(w: &Word) -> Operator {
    Operator::identity()
        .plus(Operator::from_word(w.clone()))
        .scaled(c(0.5))
}

fn parafermion(a: &Word, b: &Word, conj_a: bool, literal: bool) -> Operator {
    let first = if conj_a { a.inverse() } else { a.clone() }.then(b);
    let pair = Operator::from_word(first.clone()).plus(Operator::from_word(first.inverse()));
    if literal {
        Operator::identity().minus(pair).scaled(c(0.5))
    } else {
        Operator::identity().scaled(c(2.0)).minus(pair).scaled(c(1.0 / 3.0))
    }
}

pub fn build_stabilizer(kind: StabilizerKind, site: Site, lat: &LabLattice) -> Result<Operator, LabError> {
    if !lat.contains(site) {
        return Err(LabError::SiteOutside(site));
    }
    let wrong = || LabError::WrongSite(kind, site);
    let op = match (kind, site) {
        (StabilizerKind::Alpha, Site::Vertex(x, y)) => alpha(lat, (x, y)).into(),
        (StabilizerKind::A, Site::Vertex(x, y)) => a_vertex(lat, (x, y)).into(),
        (StabilizerKind::AZ3, Site::Vertex(x, y)) => a_z3(lat, (x, y)).into(),
        (StabilizerKind::SV, Site::Vertex(x, y)) => hermitian_part(&a_vertex(lat, (x, y))),
        (StabilizerKind::Beta, Site::Plaquette(x, y)) => beta(lat, (x, y)).into(),
        (StabilizerKind::B, Site::Plaquette(x, y)) => b_plaquette(lat, (x, y)).into(),
        (StabilizerKind::BZ3, Site::Plaquette(x, y)) => b_z3(lat, (x, y)).into(),
        (StabilizerKind::SP, Site::Plaquette(x, y)) => hermitian_part(&b_plaquette(lat, (x, y))),
        (
            StabilizerKind::F | StabilizerKind::G | StabilizerKind::FProjector | StabilizerKind::GProjector,
            Site::Pair { vertex, plaquette },
        ) => {
            let a = a_vertex(lat, vertex);
            let b = b_plaquette(lat, plaquette);
            match kind {
                StabilizerKind::F => parafermion(&a, &b, true, true),
                StabilizerKind::G => parafermion(&a, &b, false, true),
                StabilizerKind::FProjector => parafermion(&a, &b, true, false),
                _ => parafermion(&a, &b, false, false),
            }
        }
        _ => return Err(wrong()),
    };
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::state::SmallState;
    use rand::SeedableRng;

    #[test]
    fn beta_is_four_sigma_z() {
        let lat = LabLattice::patch(3, 3);
        let op = build_stabilizer(StabilizerKind::Beta, Site::Plaquette(1, 1), &lat).unwrap();
        let w = &op.terms[0].1;
        let expect: Vec<Factor> = [
            Edge::Horizontal(1, 2),
            Edge::Vertical(2, 1),
            Edge::Horizontal(1, 1),
            Edge::Vertical(1, 1),
        ]
        .into_iter()
        .map(Factor::SigmaZ)
        .collect();
        assert_eq!(w.factors, expect);
    }

    #[test]
    fn z3_vertex_word() {
        let lat = LabLattice::patch(3, 3);
        let w = a_z3(&lat, (1, 1));
        assert_eq!(
            w.factors,
            vec![
                x(Edge::Vertical(1, 1), 1),
                x(Edge::Horizontal(1, 1), 1),
                x(Edge::Vertical(1, 0), -1),
                x(Edge::Horizontal(0, 1), -1),
            ]
        );
    }

    #[test]
    fn alpha_squares_to_identity() {
        let lat = LabLattice::patch(3, 3);
        let a = alpha(&lat, (1, 1));
        let edges: Vec<Edge> = a.support().into_iter().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s = SmallState::random(edges, &mut rng).unwrap();
        let out = s.apply_word(&a.pow(2)).unwrap();
        assert!(out.distance(&s) < 1e-10);
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn torus_wraps_edges() {
        let lat = LabLattice::torus(2, 2);
        assert_eq!(lat.edges().len(), 8);
        assert_eq!(lat.vertex_edges((0, 0))[2], Edge::Vertical(0, 1));
        assert_eq!(lat.plaquette_edges((1, 1))[0], Edge::Horizontal(1, 0));
    }

    #[test]
    fn errors() {
        let lat = LabLattice::patch(3, 3);
        assert!(matches!(
            build_stabilizer(StabilizerKind::A, Site::Vertex(9, 0), &lat),
            Err(LabError::SiteOutside(_))
        ));
        assert!(matches!(
            build_stabilizer(StabilizerKind::A, Site::Plaquette(0, 0), &lat),
            Err(LabError::WrongSite(..))
        ));
        assert!(matches!("Q".parse::<StabilizerKind>(), Err(LabError::UnknownKind(_))));
        assert_eq!("3x3-patch".parse::<LabLattice>().unwrap(), LabLattice::patch(3, 3));
        assert_eq!("2x2".parse::<LabLattice>().unwrap(), LabLattice::torus(2, 2));
    }
}
