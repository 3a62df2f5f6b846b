//! Correction planning inside an ungauged region.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::geometry::{Coord, Edge, Torus};
use crate::sim::{CorrectionMove, FrameState};
use crate::spacetime::{Reading, RoundReadings, StabFamily, StabId};

/// Breadth-first path from `from` to the nearest target, as the list of
/// (edge, node entered) steps.
fn nearest(
    from: Coord,
    targets: &BTreeSet<Coord>,
    neighbours: impl Fn(Coord) -> Vec<(Edge, Coord)>,
) -> Option<Vec<(Edge, Coord)>> {
    let mut back: BTreeMap<Coord, (Edge, Coord)> = BTreeMap::new();
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u != from && targets.contains(&u) {
            let mut path = Vec::new();
            let mut cur = u;
            while cur != from {
                let (e, prev) = back[&cur];
                path.push((e, cur));
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        for (e, w) in neighbours(u) {
            if seen.insert(w) {
                back.insert(w, (e, u));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Cut edges whose dual component contains a μ.
fn live_cut(torus: &Torus, cut: &BTreeSet<Edge>, mu: &BTreeSet<Coord>) -> BTreeSet<Edge> {
    let mut adj: BTreeMap<Coord, Vec<(Edge, Coord)>> = BTreeMap::new();
    for &e in cut {
        let [a, b] = torus.edge_plaquettes(e);
        adj.entry(a).or_default().push((e, b));
        adj.entry(b).or_default().push((e, a));
    }
    let mut live = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for &start in mu.iter().filter(|p| adj.contains_key(p)) {
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(u) = queue.pop_front() {
            for &(e, w) in &adj[&u] {
                live.insert(e);
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    live
}

/// Moves that pair up every μ defect and every ℤ₃ charge read in the
/// region, or `None` if the readings are not neutral or cannot be paired.
///
/// μ go first; charges then avoid the branch cuts that still end on a μ
/// so nothing is conjugated on the way.
pub fn plan_correction(
    frame: &FrameState,
    plaquettes: &BTreeSet<Coord>,
    readings: &RoundReadings,
    t: i32,
) -> Option<Vec<CorrectionMove>> {
    let torus = &frame.torus;
    let edges = frame.region_edges(plaquettes);
    let inner = frame.inner_edges(plaquettes);

    let ternary = |r: Reading| match r {
        Reading::Ternary(v) => Some(v as i64),
        _ => None,
    };
    let mut e_charge: BTreeMap<Coord, i64> = BTreeMap::new();
    for v in frame.region_vertices(plaquettes) {
        let c = ternary(readings.vertex[torus.index(v)])?;
        if c != 0 {
            e_charge.insert(v, c);
        }
    }
    let mut m_charge: BTreeMap<Coord, i64> = BTreeMap::new();
    let mut defects: BTreeSet<Coord> = BTreeSet::new();
    let mut occupied: BTreeSet<Coord> = BTreeSet::new();
    for &p in plaquettes {
        let i = torus.index(p);
        let c = ternary(readings.plaquette[i])?;
        if c != 0 {
            m_charge.insert(p, c);
        }
        let beta = readings.beta[i].value()?;
        if beta == 1 {
            occupied.insert(p);
        }
        if (beta + frame.schedule.expected(StabId::new(StabFamily::Beta, p), t)) % 2 == 1 {
            defects.insert(p);
        }
    }
    if e_charge.values().sum::<i64>() % 3 != 0 || m_charge.values().sum::<i64>() % 3 != 0 || defects.len() % 2 == 1 {
        return None;
    }

    let plaquette_steps = |u: Coord, avoid: &BTreeSet<Edge>| -> Vec<(Edge, Coord)> {
        torus
            .plaquette_edges(u)
            .into_iter()
            .filter(|e| inner.contains(e) && !avoid.contains(e))
            .map(|e| {
                let [a, b] = torus.edge_plaquettes(e);
                (e, if a == u { b } else { a })
            })
            .collect()
    };

    let mut moves = Vec::new();
    let none = BTreeSet::new();
    let mut paired: Vec<(Coord, Coord)> = Vec::new();
    let mut toggled: BTreeSet<Edge> = BTreeSet::new();
    while let Some(&u) = defects.iter().next() {
        defects.remove(&u);
        // a membrane must not sweep through a μ that stays put
        let path = nearest(u, &defects, |p| {
            plaquette_steps(p, &none)
                .into_iter()
                .filter(|(_, w)| defects.contains(w) || !occupied.contains(w))
                .collect()
        })?;
        let (_, w) = *path.last().expect("nonempty path");
        defects.remove(&w);
        paired.push((u, w));
        for (e, _) in path {
            moves.push(CorrectionMove::Membrane { edge: e });
            if !toggled.remove(&e) {
                toggled.insert(e);
            }
        }
    }

    // only cut components still ending on a μ conjugate what crosses them;
    // closed loops left by the pairing are harmless
    let mut mu_after: BTreeSet<Coord> =
        (0..torus.sites()).filter(|&i| readings.beta[i] == Reading::Binary(1)).map(|i| torus.coord(i)).collect();
    for (u, w) in &paired {
        for p in [u, w] {
            if !mu_after.remove(p) {
                mu_after.insert(*p);
            }
        }
    }
    let mut global_cut: BTreeSet<Edge> = (0..2 * torus.sites())
        .filter(|&k| frame.qubit_x[k] == 1)
        .map(|k| torus.edge(k))
        .collect();
    for e in &toggled {
        if !global_cut.remove(e) {
            global_cut.insert(*e);
        }
    }
    let cut = live_cut(torus, &global_cut, &mu_after);
    let vertex_steps = |u: Coord| -> Vec<(Edge, Coord)> {
        torus
            .vertex_edges(u)
            .into_iter()
            .filter(|e| edges.contains(e) && !cut.contains(e))
            .map(|e| {
                let [a, b] = torus.edge_vertices(e);
                (e, if a == u { b } else { a })
            })
            .collect()
    };
    while let Some((&u, &c)) = e_charge.iter().next() {
        e_charge.remove(&u);
        let targets: BTreeSet<Coord> = e_charge.keys().copied().collect();
        let path = nearest(u, &targets, vertex_steps)?;
        let mut at = u;
        for &(e, next) in &path {
            let first = torus.edge_vertices(e)[0] == at;
            let a = if first { -c } else { c };
            moves.push(CorrectionMove::Electric {
                edge: e,
                a: a.rem_euclid(3) as u8,
            });
            at = next;
        }
        let entry = e_charge.entry(at).or_insert(0);
        *entry = (*entry + c).rem_euclid(3);
        if *entry == 0 {
            e_charge.remove(&at);
        }
    }

    while let Some((&u, &c)) = m_charge.iter().next() {
        m_charge.remove(&u);
        let targets: BTreeSet<Coord> = m_charge.keys().copied().collect();
        let path = nearest(u, &targets, |p| plaquette_steps(p, &cut))?;
        let mut at = u;
        for &(e, next) in &path {
            let sign = if e.is_horizontal() { 1 } else { -1 };
            let first = torus.edge_plaquettes(e)[0] == at;
            let a = if first { -c * sign } else { c * sign };
            moves.push(CorrectionMove::Magnetic {
                edge: e,
                a: a.rem_euclid(3) as u8,
            });
            at = next;
        }
        let entry = m_charge.entry(at).or_insert(0);
        *entry = (*entry + c).rem_euclid(3);
        if *entry == 0 {
            m_charge.remove(&at);
        }
    }
    Some(moves)
}
