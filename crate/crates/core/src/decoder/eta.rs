//! Offline matching of η events, run once at the end of a memory run.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::geometry::{Coord, Edge, SpacetimePoint};
use crate::sim::FrameState;
use crate::spacetime::{DetectorEvent, FaultKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EtaOutcome {
    pub pairs: Vec<(SpacetimePoint, SpacetimePoint)>,
    pub correction: Vec<Edge>,
    /// η left on the lattice after the correction.
    pub residual: usize,
    /// The η strings plus correction wind around the torus.
    pub nontrivial: bool,
}

impl EtaOutcome {
    pub fn failed(&self) -> bool {
        self.residual > 0 || self.nontrivial
    }
}

/// A region returned to the S3 phase at round `t`; its emissions show at
/// `t + 1` on the boundary vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedWall {
    pub t: i32,
    pub plaquettes: BTreeSet<Coord>,
}

/// Pairs the events on each closed wall's boundary along the boundary
/// itself, so the correction closes into a contractible loop. Components
/// with an odd count are left alone.
fn match_walls(
    frame: &mut FrameState,
    pts: &[SpacetimePoint],
    walls: &[ClosedWall],
    matched: &mut [bool],
    pairs: &mut Vec<(SpacetimePoint, SpacetimePoint)>,
    correction: &mut Vec<Edge>,
) {
    let torus = frame.torus;
    for w in walls {
        // an annulus boundary is not contractible
        let xs: BTreeSet<i32> = w.plaquettes.iter().map(|p| p.0).collect();
        let ys: BTreeSet<i32> = w.plaquettes.iter().map(|p| p.1).collect();
        if xs.len() as i32 == torus.l || ys.len() as i32 == torus.l {
            continue;
        }
        let boundary: BTreeSet<Edge> = frame
            .region_edges(&w.plaquettes)
            .into_iter()
            .filter(|&e| torus.edge_plaquettes(e).iter().filter(|p| w.plaquettes.contains(p)).count() == 1)
            .collect();
        let mut adj: BTreeMap<Coord, Vec<(Edge, Coord)>> = BTreeMap::new();
        for &e in &boundary {
            let [a, b] = torus.edge_vertices(e);
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }
        let mut at: BTreeMap<Coord, usize> = BTreeMap::new();
        for (i, p) in pts.iter().enumerate() {
            if !matched[i] && p.t == w.t + 1 && adj.contains_key(&p.site()) {
                at.entry(p.site()).or_insert(i);
            }
        }
        let mut seen: BTreeSet<Coord> = BTreeSet::new();
        for &start in adj.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &(_, v) in &adj[&u] {
                    if seen.insert(v) {
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            let mut here: BTreeSet<Coord> = comp.iter().filter(|v| at.contains_key(v)).copied().collect();
            if here.len() % 2 == 1 {
                continue;
            }
            while let Some(&u) = here.iter().next() {
                here.remove(&u);
                let mut back: BTreeMap<Coord, (Edge, Coord)> = BTreeMap::new();
                let mut queue = VecDeque::from([u]);
                let mut found = None;
                while let Some(x) = queue.pop_front() {
                    if x != u && here.contains(&x) {
                        found = Some(x);
                        break;
                    }
                    for &(e, y) in &adj[&x] {
                        if y != u && !back.contains_key(&y) {
                            back.insert(y, (e, x));
                            queue.push_back(y);
                        }
                    }
                }
                let v = found.expect("component holds an even count");
                here.remove(&v);
                let mut cur = v;
                while cur != u {
                    let (e, prev) = back[&cur];
                    frame.apply(FaultKind::QubitZ(e));
                    correction.push(e);
                    cur = prev;
                }
                let (i, j) = (at[&u], at[&v]);
                matched[i] = true;
                matched[j] = true;
                pairs.push((pts[i], pts[j]));
            }
        }
    }
}

/// Vertex path from a to b: along x on horizontal edges, then along y.
fn vertex_path(frame: &FrameState, a: Coord, b: Coord) -> Vec<Edge> {
    let t = &frame.torus;
    let (dx, dy) = (t.axis_delta(a.0, b.0), t.axis_delta(a.1, b.1));
    let (mut x, mut y) = a;
    let mut out = Vec::new();
    for _ in 0..dx.abs() {
        if dx > 0 {
            out.push(Edge::Horizontal(x, y));
            x += 1;
        } else {
            out.push(Edge::Horizontal(x - 1, y));
            x -= 1;
        }
    }
    for _ in 0..dy.abs() {
        if dy > 0 {
            out.push(Edge::Vertical(x, y));
            y += 1;
        } else {
            out.push(Edge::Vertical(x, y - 1));
            y -= 1;
        }
    }
    out.into_iter().map(|e| t.wrap_edge(e)).collect()
}

/// Wall emissions are paired along their walls first. Then
/// renormalization-group matching: at scale 2^j every unmatched event pairs
/// greedily with its closest unmatched partner within 2^j. The spatial path
/// of each pair is applied as σ^Z, then η and homology are checked.
pub fn global_eta_decode(frame: &mut FrameState, events: &[DetectorEvent], walls: &[ClosedWall]) -> EtaOutcome {
    let torus = frame.torus;
    let pts: Vec<SpacetimePoint> = events
        .iter()
        .map(|e| SpacetimePoint::new(e.stab.site.0, e.stab.site.1, e.time))
        .collect();
    let mut matched = vec![false; pts.len()];
    let mut pairs = Vec::new();
    let mut correction = Vec::new();
    match_walls(frame, &pts, walls, &mut matched, &mut pairs, &mut correction);
    let span = pts.iter().map(|p| p.t).max().unwrap_or(0) - pts.iter().map(|p| p.t).min().unwrap_or(0);
    let limit = torus.l.max(span + 1);
    let mut scale = 1;
    loop {
        let mut cand: Vec<(i32, usize, usize)> = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if !matched[i] && !matched[j] {
                    let d = torus.distance(pts[i], pts[j]);
                    if d <= scale {
                        cand.push((d, i, j));
                    }
                }
            }
        }
        cand.sort();
        for (_, i, j) in cand {
            if !matched[i] && !matched[j] {
                matched[i] = true;
                matched[j] = true;
                pairs.push((pts[i], pts[j]));
                for e in vertex_path(frame, pts[i].site(), pts[j].site()) {
                    frame.apply(FaultKind::QubitZ(e));
                    correction.push(e);
                }
            }
        }
        if scale >= limit {
            break;
        }
        scale *= 2;
    }
    let residual = frame.eta.iter().filter(|&&x| x).count();
    let l = torus.l;
    let h_winding = (0..l)
        .map(|y| frame.qubit_z[torus.edge_index(Edge::Horizontal(0, y))] as u32)
        .sum::<u32>()
        % 2;
    let v_winding = (0..l)
        .map(|x| frame.qubit_z[torus.edge_index(Edge::Vertical(x, 0))] as u32)
        .sum::<u32>()
        % 2;
    EtaOutcome {
        pairs,
        correction,
        residual,
        nontrivial: h_winding == 1 || v_winding == 1,
    }
}
