//! Square-lattice torus geometry and the L∞ spacetime metric.
//!
//! Vertices, plaquettes and edges are addressed by integer base coordinates
//! (x, y). Plaquette (x, y) has vertex (x, y) as its south-west corner; edge
//! `Horizontal(x, y)` joins vertices (x, y) and (x+1, y), `Vertical(x, y)`
//! joins (x, y) and (x, y+1). Distances between lattice objects use their
//! base coordinates.

use std::fmt;

use serde::{Deserialize, Serialize};

pub type Coord = (i32, i32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Edge {
    Horizontal(i32, i32),
    Vertical(i32, i32),
}

impl Edge {
    pub fn base(self) -> Coord {
        match self {
            Edge::Horizontal(x, y) | Edge::Vertical(x, y) => (x, y),
        }
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Edge::Horizontal(..))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edge::Horizontal(x, y) => write!(f, "h({x},{y})"),
            Edge::Vertical(x, y) => write!(f, "v({x},{y})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub x: i32,
    pub y: i32,
    pub t: i32,
}

impl SpacetimePoint {
    pub fn new(x: i32, y: i32, t: i32) -> SpacetimePoint {
        SpacetimePoint { x, y, t }
    }

    pub fn site(self) -> Coord {
        (self.x, self.y)
    }
}

/// L × L periodic lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Torus {
    pub l: i32,
}

impl Torus {
    pub fn new(l: i32) -> Torus {
        assert!(l >= 2, "torus needs L >= 2");
        Torus { l }
    }

    pub fn sites(&self) -> usize {
        (self.l * self.l) as usize
    }

    pub fn edges(&self) -> usize {
        2 * self.sites()
    }

    pub fn wrap(&self, v: i32) -> i32 {
        v.rem_euclid(self.l)
    }

    pub fn wrap2(&self, (x, y): Coord) -> Coord {
        (self.wrap(x), self.wrap(y))
    }

    pub fn index(&self, c: Coord) -> usize {
        let (x, y) = self.wrap2(c);
        (y * self.l + x) as usize
    }

    pub fn coord(&self, i: usize) -> Coord {
        let i = i as i32;
        (i % self.l, i / self.l)
    }

    pub fn wrap_edge(&self, e: Edge) -> Edge {
        match e {
            Edge::Horizontal(x, y) => Edge::Horizontal(self.wrap(x), self.wrap(y)),
            Edge::Vertical(x, y) => Edge::Vertical(self.wrap(x), self.wrap(y)),
        }
    }

    pub fn edge_index(&self, e: Edge) -> usize {
        match e {
            Edge::Horizontal(x, y) => 2 * self.index((x, y)),
            Edge::Vertical(x, y) => 2 * self.index((x, y)) + 1,
        }
    }

    pub fn edge(&self, i: usize) -> Edge {
        let (x, y) = self.coord(i / 2);
        if i % 2 == 0 {
            Edge::Horizontal(x, y)
        } else {
            Edge::Vertical(x, y)
        }
    }

    /// Incident edges ordered N, E, S, W.
    pub fn vertex_edges(&self, (x, y): Coord) -> [Edge; 4] {
        [
            Edge::Vertical(x, y),
            Edge::Horizontal(x, y),
            Edge::Vertical(x, y - 1),
            Edge::Horizontal(x - 1, y),
        ]
        .map(|e| self.wrap_edge(e))
    }

    /// Boundary edges ordered N, E, S, W.
    pub fn plaquette_edges(&self, (x, y): Coord) -> [Edge; 4] {
        [
            Edge::Horizontal(x, y + 1),
            Edge::Vertical(x + 1, y),
            Edge::Horizontal(x, y),
            Edge::Vertical(x, y),
        ]
        .map(|e| self.wrap_edge(e))
    }

    /// Endpoints: base vertex first.
    pub fn edge_vertices(&self, e: Edge) -> [Coord; 2] {
        match e {
            Edge::Horizontal(x, y) => [self.wrap2((x, y)), self.wrap2((x + 1, y))],
            Edge::Vertical(x, y) => [self.wrap2((x, y)), self.wrap2((x, y + 1))],
        }
    }

    /// Adjacent plaquettes: the one whose S (resp. W) edge this is first.
    pub fn edge_plaquettes(&self, e: Edge) -> [Coord; 2] {
        match e {
            Edge::Horizontal(x, y) => [self.wrap2((x, y)), self.wrap2((x, y - 1))],
            Edge::Vertical(x, y) => [self.wrap2((x, y)), self.wrap2((x - 1, y))],
        }
    }

    /// Corners ordered SW, SE, NE, NW.
    pub fn plaquette_corners(&self, (x, y): Coord) -> [Coord; 4] {
        [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)].map(|c| self.wrap2(c))
    }

    /// Plaquettes around a vertex ordered NE, NW, SW, SE.
    pub fn vertex_plaquettes(&self, (x, y): Coord) -> [Coord; 4] {
        [(x, y), (x - 1, y), (x - 1, y - 1), (x, y - 1)].map(|c| self.wrap2(c))
    }

    /// Periodic distance along one axis.
    pub fn axis_distance(&self, a: i32, b: i32) -> i32 {
        let d = (a - b).rem_euclid(self.l);
        d.min(self.l - d)
    }

    /// Signed shortest displacement from `a` to `b` along one axis.
    pub fn axis_delta(&self, a: i32, b: i32) -> i32 {
        let d = (b - a).rem_euclid(self.l);
        if d > self.l / 2 {
            d - self.l
        } else {
            d
        }
    }

    pub fn site_distance(&self, a: Coord, b: Coord) -> i32 {
        self.axis_distance(a.0, b.0).max(self.axis_distance(a.1, b.1))
    }

    pub fn distance(&self, a: SpacetimePoint, b: SpacetimePoint) -> i32 {
        self.site_distance(a.site(), b.site()).max((a.t - b.t).abs())
    }

    /// Minimum pairwise distance between two nonempty point sets.
    pub fn region_distance(&self, a: &[SpacetimePoint], b: &[SpacetimePoint]) -> i32 {
        assert!(!a.is_empty() && !b.is_empty(), "regions must be nonempty");
        a.iter()
            .flat_map(|&p| b.iter().map(move |&q| (p, q)))
            .map(|(p, q)| self.distance(p, q))
            .min()
            .expect("nonempty")
    }

    /// Maximum pairwise distance.
    pub fn diameter(&self, pts: &[SpacetimePoint]) -> i32 {
        let mut d = 0;
        for (i, &p) in pts.iter().enumerate() {
            for &q in &pts[i + 1..] {
                d = d.max(self.distance(p, q));
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_distances() {
        let t = Torus::new(8);
        let o = SpacetimePoint::new(0, 0, 0);
        assert_eq!(t.distance(o, SpacetimePoint::new(3, -2, 1)), 3);
        assert_eq!(t.distance(o, SpacetimePoint::new(7, 0, 0)), 1);
        assert_eq!(t.distance(o, SpacetimePoint::new(0, 0, 9)), 9);
    }

    #[test]
    fn incidence_is_consistent() {
        let t = Torus::new(4);
        for i in 0..t.edges() {
            let e = t.edge(i);
            assert_eq!(t.edge_index(e), i);
            for v in t.edge_vertices(e) {
                assert!(t.vertex_edges(v).contains(&e));
            }
            for p in t.edge_plaquettes(e) {
                assert!(t.plaquette_edges(p).contains(&e));
            }
        }
        assert_eq!(t.axis_delta(0, 3), -1);
        assert_eq!(t.axis_delta(3, 0), 1);
    }

    fn point(l: i32) -> impl Strategy<Value = SpacetimePoint> {
        (0..l, 0..l, 0..10).prop_map(|(x, y, t)| SpacetimePoint::new(x, y, t))
    }

    proptest! {
        #[test]
        fn metric_axioms(a in point(7), b in point(7), c in point(7)) {
            let t = Torus::new(7);
            prop_assert_eq!(t.distance(a, b), t.distance(b, a));
            prop_assert!(t.distance(a, c) <= t.distance(a, b) + t.distance(b, c));
            prop_assert_eq!(t.distance(a, a), 0);
        }

        #[test]
        fn region_distance_matches_brute_force(
            a in prop::collection::vec(point(6), 1..6),
            b in prop::collection::vec(point(6), 1..6),
        ) {
            let t = Torus::new(6);
            let mut best = i32::MAX;
            for p in &a {
                for q in &b {
                    // unwrapped images: try all shifts
                    for sx in -1..=1 {
                        for sy in -1..=1 {
                            let d = (p.x - q.x + 6 * sx).abs().max((p.y - q.y + 6 * sy).abs()).max((p.t - q.t).abs());
                            best = best.min(d);
                        }
                    }
                }
            }
            prop_assert_eq!(t.region_distance(&a, &b), best);
        }
    }
}
