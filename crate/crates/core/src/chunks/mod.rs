//! Hierarchical chunk decomposition of spacetime error sets.
//!
//! A level-0 chunk is one site of E. A level-n chunk is the disjoint union of
//! two level-(n−1) chunks whose union has diameter ≤ Qⁿ/2. E_n collects the
//! sites that belong to some level-n chunk, F_n = E_n \ E_{n+1}, and a
//! level-n nugget is a Qⁿ-connected component of F_n.
//!
//! Once Qⁿ/2 reaches the diameter of E the geometric condition is vacuous,
//! so every higher chunk is just a packing of disjoint lower chunks. Levels
//! below that are enumerated explicitly (chunks deduplicated by site set);
//! the packing levels are settled with maximum matchings, and an exact
//! branch and bound resolves the rare cases where the matching bounds do
//! not decide membership.

pub mod constants;
pub mod linking;

use std::collections::HashSet;

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::unionfind::UnionFind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::{SpacetimePoint, Torus};
use crate::spacetime::{sample_errors, ErrorConfiguration, FaultAlphabet};

/// Node budget of the exact packing search before giving up.
const SEARCH_BUDGET: u64 = 2_000_000;

pub(crate) fn q_pow(q: u32, n: u32) -> u128 {
    (q as u128).saturating_pow(n)
}

/// diameter ≤ Qⁿ/2
fn fits(q: u32, n: u32, d: i32) -> bool {
    2 * d as u128 <= q_pow(q, n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Nugget {
    pub level: u32,
    pub sites: Vec<SpacetimePoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChunkDecomposition {
    pub q: u32,
    pub torus: Torus,
    /// Distinct sites of E, sorted.
    pub sites: Vec<SpacetimePoint>,
    /// Highest n with the site in E_n.
    pub level_of: Vec<u32>,
    /// False if the packing search ran out of budget somewhere and a lower
    /// bound was used.
    pub exact: bool,
}

impl ChunkDecomposition {
    /// m with E_m ≠ ∅ = E_{m+1}; `None` for empty E.
    pub fn top_level(&self) -> Option<u32> {
        self.level_of.iter().copied().max()
    }

    pub fn e(&self, n: u32) -> Vec<SpacetimePoint> {
        self.select(|l| l >= n)
    }

    pub fn f(&self, n: u32) -> Vec<SpacetimePoint> {
        self.select(|l| l == n)
    }

    fn select(&self, keep: impl Fn(u32) -> bool) -> Vec<SpacetimePoint> {
        self.sites
            .iter()
            .zip(&self.level_of)
            .filter(|(_, &l)| keep(l))
            .map(|(&p, _)| p)
            .collect()
    }

    /// Qⁿ-connected components of every F_n.
    pub fn nuggets(&self) -> Vec<Nugget> {
        let mut out = Vec::new();
        let Some(top) = self.top_level() else {
            return out;
        };
        for n in 0..=top {
            let f = self.f(n);
            let reach = q_pow(self.q, n);
            let mut uf = UnionFind::<usize>::new(f.len());
            for i in 0..f.len() {
                for j in i + 1..f.len() {
                    if self.torus.distance(f[i], f[j]) as u128 <= reach {
                        uf.union(i, j);
                    }
                }
            }
            let mut groups: std::collections::BTreeMap<usize, Vec<SpacetimePoint>> = Default::default();
            for (i, &p) in f.iter().enumerate() {
                groups.entry(uf.find(i)).or_default().push(p);
            }
            out.extend(groups.into_values().map(|sites| Nugget { level: n, sites }));
        }
        out
    }
}

#[derive(Clone, Debug)]
struct Unit {
    sites: Vec<u32>,
    diam: i32,
}

struct Ctx<'a> {
    torus: &'a Torus,
    pts: &'a [SpacetimePoint],
    q: u32,
}

impl Ctx<'_> {
    fn d(&self, i: u32, j: u32) -> i32 {
        self.torus.distance(self.pts[i as usize], self.pts[j as usize])
    }

    /// Diameter of a ∪ b, or `None` when they share a site.
    fn union_diam(&self, a: &Unit, b: &Unit) -> Option<i32> {
        let mut d = a.diam.max(b.diam);
        for &i in &a.sites {
            for &j in &b.sites {
                if i == j {
                    return None;
                }
                d = d.max(self.d(i, j));
            }
        }
        Some(d)
    }

    fn merge(&self, a: &Unit, b: &Unit, diam: i32) -> Unit {
        let mut sites: Vec<u32> = a.sites.iter().chain(&b.sites).copied().collect();
        sites.sort_unstable();
        Unit { sites, diam }
    }

    /// All level-n chunks from the level-(n−1) list.
    fn combine(&self, units: &[Unit], n: u32) -> Vec<Unit> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (i, a) in units.iter().enumerate() {
            for b in &units[i + 1..] {
                if let Some(d) = self.union_diam(a, b) {
                    if fits(self.q, n, d) {
                        let u = self.merge(a, b, d);
                        if seen.insert(u.sites.clone()) {
                            out.push(u);
                        }
                    }
                }
            }
        }
        out
    }

    fn compatible(&self, a: &Unit, b: &Unit, level: u32) -> bool {
        self.union_diam(a, b).is_some_and(|d| fits(self.q, level, d))
    }

    /// Maximum number of disjoint compatible pairs among `family` (whose
    /// members must already be pairwise disjoint). Returns the pairs.
    fn pair_up(&self, family: &[&Unit], level: u32) -> Vec<(usize, usize)> {
        let mut g = UnGraph::<(), ()>::new_undirected();
        let nodes: Vec<NodeIndex> = family.iter().map(|_| g.add_node(())).collect();
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                if self.compatible(family[i], family[j], level) {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        maximum_matching(&g)
            .edges()
            .map(|(a, b)| (a.index(), b.index()))
            .collect()
    }
}

pub fn decompose_errors(torus: &Torus, e: &ErrorConfiguration, q: u32) -> ChunkDecomposition {
    decompose(torus, &e.points(), q)
}

/// Maximal chunk decomposition of the point set (duplicates collapse).
pub fn decompose(torus: &Torus, points: &[SpacetimePoint], q: u32) -> ChunkDecomposition {
    assert!(q >= 2, "Q must be at least 2");
    let mut sites: Vec<SpacetimePoint> = points.to_vec();
    sites.sort_unstable();
    sites.dedup();
    let n_sites = sites.len();
    let mut out = ChunkDecomposition {
        q,
        torus: *torus,
        sites,
        level_of: vec![0; n_sites],
        exact: true,
    };
    if n_sites < 2 {
        return out;
    }
    let ctx = Ctx {
        torus,
        pts: &out.sites,
        q,
    };
    let diameter = torus.diameter(&out.sites);
    let mut kstar = 1;
    while !fits(q, kstar, diameter) {
        kstar += 1;
    }

    if kstar == 1 {
        // any 2ⁿ distinct sites form a level-n chunk
        let top = n_sites.ilog2();
        out.level_of.iter_mut().for_each(|l| *l = top);
        return out;
    }

    let base = kstar - 2;
    let mut units: Vec<Unit> = (0..n_sites as u32).map(|i| Unit { sites: vec![i], diam: 0 }).collect();
    for n in 1..=base {
        units = ctx.combine(&units, n);
        if units.is_empty() {
            return out;
        }
        for u in &units {
            for &s in &u.sites {
                out.level_of[s as usize] = n;
            }
        }
    }
    let level = kstar - 1;
    let exact = top_levels(&ctx, &units, base, level, &mut out.level_of);
    out.exact = exact;
    out
}

/// Assigns levels ≥ `level` where a level-`level` chunk is a compatible pair
/// of `units` (level `base`) and every higher chunk is a packing of those.
fn top_levels(ctx: &Ctx, units: &[Unit], base: u32, level: u32, level_of: &mut [u32]) -> bool {
    let active: Vec<&Unit> = units
        .iter()
        .enumerate()
        .filter(|(i, u)| units.iter().enumerate().any(|(j, v)| *i != j && ctx.compatible(u, v, level)))
        .map(|(_, u)| u)
        .collect();
    if active.is_empty() {
        return true;
    }
    let mut covered_sites: Vec<u32> = active.iter().flat_map(|u| u.sites.iter().copied()).collect();
    covered_sites.sort_unstable();
    covered_sites.dedup();
    for &s in &covered_sites {
        level_of[s as usize] = level_of[s as usize].max(level);
    }

    let (family, family_exact) = unit_packing(ctx, &active, base);
    let pairs = ctx.pair_up(&family, level);
    let upper = if family_exact {
        family.len() / 2
    } else {
        covered_sites.len() >> (base + 1)
    };
    let mut exact = true;
    let mut best = pairs.len();
    // on single sites the pairing is itself a maximum matching
    let upper = if base == 0 { best } else { upper };
    // need 2^(n−level) disjoint pairs for level n
    let needed = |n: u32| 1usize << (n - level);
    let mut top = level;
    while needed(top + 1) <= upper {
        top += 1;
    }
    if needed(top) > best {
        match exact_pairs(ctx, &active, base, level, None, best) {
            Some(s) => best = s,
            None => exact = false,
        }
        while top > level && needed(top) > best {
            top -= 1;
        }
    }
    if top == level {
        return exact;
    }

    let paired: HashSet<u32> = pairs
        .iter()
        .flat_map(|&(a, b)| family[a].sites.iter().chain(&family[b].sites).copied())
        .collect();
    let level_for = |lb: usize| {
        let mut n = level;
        while n < top && needed(n + 1) <= lb {
            n += 1;
        }
        n
    };
    for &x in &covered_sites {
        let lb = if paired.contains(&x) {
            pairs.len()
        } else {
            forced_lower_bound(ctx, &active, &family, level, x, needed(top))
        };
        let mut n = level_for(lb);
        if n < top {
            match exact_pairs(ctx, &active, base, level, Some(x), lb) {
                Some(s) => n = level_for(s),
                None => exact = false,
            }
        }
        level_of[x as usize] = level_of[x as usize].max(n);
    }
    exact
}

/// A large family of pairwise disjoint units. Exact (maximum) for single
/// sites and pairs; greedy otherwise.
fn unit_packing<'a>(ctx: &Ctx, active: &[&'a Unit], base: u32) -> (Vec<&'a Unit>, bool) {
    match base {
        0 => (active.to_vec(), true),
        1 => {
            let mut g = UnGraph::<(), usize>::new_undirected();
            let nodes: Vec<NodeIndex> = (0..ctx.pts.len()).map(|_| g.add_node(())).collect();
            for (k, u) in active.iter().enumerate() {
                g.add_edge(nodes[u.sites[0] as usize], nodes[u.sites[1] as usize], k);
            }
            let m = maximum_matching(&g);
            let family = m
                .edges()
                .map(|(a, b)| {
                    let e = g.find_edge(a, b).expect("matched edge exists");
                    active[g[e]]
                })
                .collect();
            (family, true)
        }
        _ => {
            let mut used = HashSet::new();
            let mut family = Vec::new();
            for &u in active {
                if u.sites.iter().all(|s| !used.contains(s)) {
                    used.extend(u.sites.iter().copied());
                    family.push(u);
                }
            }
            (family, false)
        }
    }
}

/// Number of disjoint pairs achievable with site x covered: swap a unit
/// containing x into the family and pair up again. Stops at `target`.
fn forced_lower_bound(ctx: &Ctx, active: &[&Unit], family: &[&Unit], level: u32, x: u32, target: usize) -> usize {
    let mut best = 0;
    for &u in active.iter().filter(|u| u.sites.contains(&x)) {
        let disjoint = |w: &&Unit, from: &Unit| w.sites.iter().all(|s| !from.sites.contains(s));
        let mut swapped: Vec<&Unit> = family.iter().copied().filter(|w| disjoint(w, u)).collect();
        swapped.push(u);
        let last = swapped.len() - 1;
        let pairs = ctx.pair_up(&swapped, level);
        let covered = pairs.iter().any(|&(a, b)| a == last || b == last)
            || (0..last).any(|k| ctx.compatible(u, swapped[k], level));
        let k = if covered {
            pairs.len()
        } else {
            // u has no partner inside the family: bring one in from outside
            match active.iter().find(|v| ctx.compatible(u, v, level)) {
                Some(&v) => {
                    let rest: Vec<&Unit> = swapped[..last].iter().copied().filter(|w| disjoint(w, v)).collect();
                    1 + ctx.pair_up(&rest, level).len()
                }
                None => 0,
            }
        };
        best = best.max(k);
        if best >= target {
            break;
        }
    }
    best
}

/// Exact maximum number of disjoint compatible unit pairs, optionally
/// requiring one pair to cover `forced`. `None` if the budget runs out.
fn exact_pairs(ctx: &Ctx, active: &[&Unit], base: u32, level: u32, forced: Option<u32>, floor: usize) -> Option<usize> {
    let n = active.len();
    let partners: Vec<Vec<usize>> = (0..n)
        .map(|i| (i + 1..n).filter(|&j| ctx.compatible(active[i], active[j], level)).collect())
        .collect();
    let mut search = PairSearch {
        active,
        partners: &partners,
        used: vec![false; ctx.pts.len()],
        per_pair: 2usize << base,
        forced,
        best: if forced.is_some() { 0 } else { floor },
        nodes: 0,
    };
    let free = {
        let mut all: Vec<u32> = active.iter().flat_map(|u| u.sites.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    search.run(0, 0, free);
    (search.nodes <= SEARCH_BUDGET).then_some(search.best)
}

struct PairSearch<'a> {
    active: &'a [&'a Unit],
    partners: &'a [Vec<usize>],
    used: Vec<bool>,
    per_pair: usize,
    forced: Option<u32>,
    best: usize,
    nodes: u64,
}

impl PairSearch<'_> {
    fn free(&self, k: usize) -> bool {
        self.active[k].sites.iter().all(|&s| !self.used[s as usize])
    }

    fn set(&mut self, k: usize, v: bool) {
        for &s in &self.active[k].sites {
            self.used[s as usize] = v;
        }
    }

    fn forced_ok(&self) -> bool {
        self.forced.map_or(true, |x| self.used[x as usize])
    }

    fn run(&mut self, from: usize, count: usize, free_sites: usize) {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return;
        }
        if self.forced_ok() && count > self.best {
            self.best = count;
        }
        if count + free_sites / self.per_pair <= self.best {
            return;
        }
        let Some(u) = (from..self.active.len()).find(|&k| self.free(k)) else {
            return;
        };
        self.set(u, true);
        for idx in 0..self.partners[u].len() {
            let v = self.partners[u][idx];
            if self.free(v) {
                self.set(v, true);
                self.run(u + 1, count + 1, free_sites.saturating_sub(self.per_pair));
                self.set(v, false);
            }
        }
        self.set(u, false);
        // leave u out entirely
        let forced_lost = self.forced.is_some_and(|x| {
            !self.used[x as usize] && !self.active[u + 1..].iter().any(|w| w.sites.contains(&x))
        });
        if !forced_lost {
            self.run(u + 1, count, free_sites);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SeparationForm {
    /// A level-n nugget is ≥ Q^{n+1}/3 from nuggets of level ≥ n.
    NextLevel,
    /// |F_{n,α} − F_{m,β}| ≥ Q^{max(n,m)}/3.
    MaxLevel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationViolation {
    pub levels: (u32, u32),
    pub distance: i32,
    pub required: f64,
    pub a: SpacetimePoint,
    pub b: SpacetimePoint,
}

pub fn verify_nugget_separation(d: &ChunkDecomposition) -> Vec<SeparationViolation> {
    nugget_separation(d, SeparationForm::NextLevel)
}

pub fn nugget_separation(d: &ChunkDecomposition, form: SeparationForm) -> Vec<SeparationViolation> {
    let nuggets = d.nuggets();
    let mut out = Vec::new();
    for (i, a) in nuggets.iter().enumerate() {
        for b in &nuggets[i + 1..] {
            let exponent = match form {
                SeparationForm::NextLevel => a.level.min(b.level) + 1,
                SeparationForm::MaxLevel => a.level.max(b.level),
            };
            let (dist, pa, pb) = closest(&d.torus, &a.sites, &b.sites);
            if 3 * (dist as u128) < q_pow(d.q, exponent) {
                out.push(SeparationViolation {
                    levels: (a.level, b.level),
                    distance: dist,
                    required: q_pow(d.q, exponent) as f64 / 3.0,
                    a: pa,
                    b: pb,
                });
            }
        }
    }
    out
}

fn closest(torus: &Torus, a: &[SpacetimePoint], b: &[SpacetimePoint]) -> (i32, SpacetimePoint, SpacetimePoint) {
    let mut best = (i32::MAX, a[0], b[0]);
    for &p in a {
        for &q in b {
            let d = torus.distance(p, q);
            if d < best.0 {
                best = (d, p, q);
            }
        }
    }
    best
}

/// Direct enumeration of every chunk at every level. Exponential; for
/// small sets only.
pub fn brute_force_levels(torus: &Torus, points: &[SpacetimePoint], q: u32) -> Vec<u32> {
    let mut sites = points.to_vec();
    sites.sort_unstable();
    sites.dedup();
    let ctx = Ctx { torus, pts: &sites, q };
    let mut level_of = vec![0; sites.len()];
    let mut units: Vec<Unit> = (0..sites.len() as u32).map(|i| Unit { sites: vec![i], diam: 0 }).collect();
    let mut n = 0;
    while !units.is_empty() {
        for u in &units {
            for &s in &u.sites {
                level_of[s as usize] = n;
            }
        }
        n += 1;
        units = ctx.combine(&units, n);
    }
    level_of
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterStatistics {
    pub samples: usize,
    /// Mean number of level-n nuggets per sample, indexed by n.
    pub nuggets_per_sample: Vec<f64>,
    pub lemma_violations: usize,
    pub inexact: usize,
}

/// Monte Carlo nugget frequencies on an L × L × rounds volume.
pub fn cluster_statistics(samples: usize, p: f64, torus: &Torus, rounds: i32, q: u32, seed: u64) -> ClusterStatistics {
    let alphabet = FaultAlphabet::default();
    let mut counts: Vec<usize> = Vec::new();
    let mut lemma_violations = 0;
    let mut inexact = 0;
    for s in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let e = sample_errors(p, torus, rounds, &alphabet, &mut rng);
        let d = decompose_errors(torus, &e, q);
        inexact += usize::from(!d.exact);
        lemma_violations += verify_nugget_separation(&d).len();
        for n in d.nuggets() {
            let l = n.level as usize;
            if counts.len() <= l {
                counts.resize(l + 1, 0);
            }
            counts[l] += 1;
        }
    }
    ClusterStatistics {
        samples,
        nuggets_per_sample: counts.iter().map(|&c| c as f64 / samples.max(1) as f64).collect(),
        lemma_violations,
        inexact,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: i32, y: i32, t: i32) -> SpacetimePoint {
        SpacetimePoint::new(x, y, t)
    }

    #[test]
    fn single_site() {
        let torus = Torus::new(20);
        let d = decompose(&torus, &[pt(1, 1, 1)], 6);
        assert_eq!(d.top_level(), Some(0));
        assert_eq!(d.f(0), vec![pt(1, 1, 1)]);
        assert!(decompose(&torus, &[], 6).nuggets().is_empty());
    }

    #[test]
    fn close_pair_is_one_chunk() {
        let torus = Torus::new(20);
        let d = decompose(&torus, &[pt(0, 0, 0), pt(2, 0, 0)], 6);
        assert!(d.f(0).is_empty());
        assert_eq!(d.f(1).len(), 2);
        assert_eq!(d.nuggets().len(), 1);
        assert!(verify_nugget_separation(&d).is_empty());
    }

    #[test]
    fn distant_pair_stays_level_zero() {
        let torus = Torus::new(40);
        let d = decompose(&torus, &[pt(0, 0, 0), pt(10, 0, 0)], 6);
        assert_eq!(d.top_level(), Some(0));
        assert_eq!(d.nuggets().len(), 2);
        assert!(verify_nugget_separation(&d).is_empty());
    }

    #[test]
    fn vacuous_levels_count_sites() {
        let torus = Torus::new(4);
        let pts: Vec<_> = (0..5).map(|i| pt(i % 4, 0, i / 4)).collect();
        let d = decompose(&torus, &pts, 6);
        assert_eq!(d.level_of, vec![2; 5]);
        assert_eq!(brute_force_levels(&torus, &pts, 6), d.level_of);
    }

    fn naive_pairs(ctx: &Ctx, units: &[&Unit], level: u32, forced: Option<u32>, used: &mut Vec<u32>) -> Option<usize> {
        let mut best = forced.map_or(Some(0), |x| used.contains(&x).then_some(0));
        for i in 0..units.len() {
            for j in i + 1..units.len() {
                let (a, b) = (units[i], units[j]);
                let free = a.sites.iter().chain(&b.sites).all(|s| !used.contains(s));
                if free && ctx.compatible(a, b, level) {
                    let mark = used.len();
                    let mut add: Vec<u32> = a.sites.iter().chain(&b.sites).copied().collect();
                    add.sort_unstable();
                    used.extend(add);
                    if let Some(k) = naive_pairs(ctx, units, level, forced, used) {
                        best = Some(best.map_or(k + 1, |b: usize| b.max(k + 1)));
                    }
                    used.truncate(mark);
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn pair_search_is_exact(
            pts in prop::collection::vec((0..5i32, 0..5i32, 0..6i32).prop_map(|(x, y, t)| pt(x, y, t)), 4..11),
            forced in proptest::option::of(0u32..4),
        ) {
            let torus = Torus::new(10);
            let mut sites = pts.clone();
            sites.sort_unstable();
            sites.dedup();
            let ctx = Ctx { torus: &torus, pts: &sites, q: 3 };
            let singles: Vec<Unit> = (0..sites.len() as u32).map(|i| Unit { sites: vec![i], diam: 0 }).collect();
            let edges = ctx.combine(&singles, 1);
            let active: Vec<&Unit> = edges.iter().collect();
            let forced = forced.filter(|&x| (x as usize) < sites.len());
            let got = exact_pairs(&ctx, &active, 1, 2, forced, 0).unwrap();
            let want = naive_pairs(&ctx, &active, 2, forced, &mut Vec::new()).unwrap_or(0);
            prop_assert_eq!(got, want);
        }
    }

    fn cloud() -> impl Strategy<Value = Vec<SpacetimePoint>> {
        prop::collection::vec((0..12i32, 0..12i32, 0..12i32).prop_map(|(x, y, t)| pt(x, y, t)), 0..9)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn matches_brute_force(pts in cloud(), q in 2u32..8) {
            let torus = Torus::new(24);
            let d = decompose(&torus, &pts, q);
            prop_assert!(d.exact);
            prop_assert_eq!(&d.level_of, &brute_force_levels(&torus, &pts, q));
        }

        #[test]
        fn matches_brute_force_dense(
            pts in prop::collection::vec((0..6i32, 0..6i32, 0..8i32).prop_map(|(x, y, t)| pt(x, y, t)), 6..13),
            q in 2u32..5,
        ) {
            let torus = Torus::new(12);
            let d = decompose(&torus, &pts, q);
            prop_assert!(d.exact);
            prop_assert_eq!(&d.level_of, &brute_force_levels(&torus, &pts, q));
        }

        #[test]
        fn adding_a_fault_is_monotone(pts in cloud(), extra in (0..12i32, 0..12i32, 0..12i32)) {
            let torus = Torus::new(24);
            let d = decompose(&torus, &pts, 6);
            let mut more = pts.clone();
            more.push(pt(extra.0, extra.1, extra.2));
            let e = decompose(&torus, &more, 6);
            for (p, l) in d.sites.iter().zip(&d.level_of) {
                let k = e.sites.binary_search(p).unwrap();
                prop_assert!(e.level_of[k] >= *l);
            }
        }

        #[test]
        fn nuggets_partition_and_separate(pts in cloud()) {
            let torus = Torus::new(24);
            let d = decompose(&torus, &pts, 6);
            let total: usize = d.nuggets().iter().map(|n| n.sites.len()).sum();
            prop_assert_eq!(total, d.sites.len());
            prop_assert!(verify_nugget_separation(&d).is_empty());
        }
    }
}
