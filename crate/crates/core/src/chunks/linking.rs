//! Direct links between clusters and the linked trees they form.
//!
//! A level-n cluster is directly linked to a cluster of level ≥ n when it
//! lies within 2(Qⁿ + 2) of that cluster's absorbing region. Absorbing
//! regions are stored as a point set plus a radius.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::{q_pow, ChunkDecomposition};
use crate::geometry::{SpacetimePoint, Torus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub id: usize,
    pub level: u32,
    pub extent: Vec<SpacetimePoint>,
    pub absorbing: Vec<SpacetimePoint>,
    pub absorbing_radius: i32,
}

impl Cluster {
    fn distance_to_region(&self, torus: &Torus, other: &Cluster) -> i32 {
        (torus.region_distance(&self.extent, &other.absorbing) - other.absorbing_radius).max(0)
    }
}

/// `from` is the smaller (or equal-level) cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Link {
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkedTree {
    pub members: Vec<usize>,
    pub root: usize,
    pub max_level: u32,
    pub links: Vec<Link>,
    pub diameter: i32,
}

pub fn link_radius(q: u32, n: u32) -> u128 {
    2 * (q_pow(q, n) + 2)
}

/// 2(Q^k+2) + 8(Q^k − 1)/(Q − 1) + 16k
pub fn tree_diameter_bound(q: u32, k: u32) -> f64 {
    let qk = q_pow(q, k) as f64;
    2.0 * (qk + 2.0) + 8.0 * (qk - 1.0) / (q as f64 - 1.0) + 16.0 * k as f64
}

/// One cluster per nugget. A level-n absorbing region reaches Qⁿ + 2
/// beyond the nugget's sites.
pub fn clusters_from_decomposition(d: &ChunkDecomposition) -> Vec<Cluster> {
    d.nuggets()
        .into_iter()
        .enumerate()
        .map(|(id, n)| Cluster {
            id,
            level: n.level,
            extent: n.sites.clone(),
            absorbing: n.sites,
            absorbing_radius: (q_pow(d.q, n.level) + 2).min(i32::MAX as u128) as i32,
        })
        .collect()
}

pub fn direct_links(torus: &Torus, clusters: &[Cluster], q: u32) -> Vec<Link> {
    let mut links = Vec::new();
    for (i, a) in clusters.iter().enumerate() {
        for (j, b) in clusters.iter().enumerate() {
            if i == j || b.level < a.level || (b.level == a.level && j < i) {
                continue;
            }
            let mut d = a.distance_to_region(torus, b);
            if b.level == a.level {
                d = d.min(b.distance_to_region(torus, a));
            }
            if d as u128 <= link_radius(q, a.level) {
                links.push(Link { from: a.id, to: b.id });
            }
        }
    }
    links.sort();
    links
}

/// Connected components of the link graph; the root is the highest-level
/// member (lowest id on ties).
pub fn build_linked_trees(torus: &Torus, clusters: &[Cluster], q: u32) -> Vec<LinkedTree> {
    let links = direct_links(torus, clusters, q);
    let pos: BTreeMap<usize, usize> = clusters.iter().enumerate().map(|(k, c)| (c.id, k)).collect();
    let mut uf = UnionFind::<usize>::new(clusters.len());
    for l in &links {
        uf.union(pos[&l.from], pos[&l.to]);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..clusters.len() {
        groups.entry(uf.find(k)).or_default().push(k);
    }
    groups
        .into_values()
        .map(|ks| {
            let root = *ks
                .iter()
                .max_by_key(|&&k| (clusters[k].level, std::cmp::Reverse(clusters[k].id)))
                .expect("nonempty component");
            let points: Vec<SpacetimePoint> = ks
                .iter()
                .flat_map(|&k| clusters[k].extent.iter().copied())
                .collect();
            let members: Vec<usize> = ks.iter().map(|&k| clusters[k].id).collect();
            LinkedTree {
                root: clusters[root].id,
                max_level: clusters[root].level,
                links: links.iter().filter(|l| members.contains(&l.from)).copied().collect(),
                diameter: torus.diameter(&points),
                members,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LinkingReport {
    /// Links between clusters of the same level.
    pub equal_level_links: Vec<Link>,
    /// Clusters linked to more than one larger cluster.
    pub multiple_larger: Vec<usize>,
    /// (absorbing cluster, level) with more than one linked cluster.
    pub crowded_regions: Vec<(usize, u32)>,
    /// Trees whose maximum level is attained more than once.
    pub shared_roots: Vec<usize>,
    /// Trees over the diameter bound.
    pub oversized: Vec<(usize, i32, f64)>,
    /// Tree pairs (roots) closer than Q^{n+1}/4 − 2.
    pub close_trees: Vec<(usize, usize, i32)>,
}

impl LinkingReport {
    pub fn is_clean(&self) -> bool {
        self.equal_level_links.is_empty()
            && self.multiple_larger.is_empty()
            && self.crowded_regions.is_empty()
            && self.shared_roots.is_empty()
            && self.oversized.is_empty()
            && self.close_trees.is_empty()
    }
}

pub fn check_linking(torus: &Torus, clusters: &[Cluster], trees: &[LinkedTree], q: u32) -> LinkingReport {
    let level: BTreeMap<usize, u32> = clusters.iter().map(|c| (c.id, c.level)).collect();
    let links: Vec<Link> = trees.iter().flat_map(|t| t.links.iter().copied()).collect();
    let mut report = LinkingReport::default();

    let mut larger: BTreeMap<usize, usize> = BTreeMap::new();
    let mut per_region: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    for l in &links {
        if level[&l.from] == level[&l.to] {
            report.equal_level_links.push(*l);
            continue;
        }
        *larger.entry(l.from).or_default() += 1;
        *per_region.entry((l.to, level[&l.from])).or_default() += 1;
    }
    report.multiple_larger = larger.into_iter().filter(|&(_, c)| c > 1).map(|(id, _)| id).collect();
    report.crowded_regions = per_region.into_iter().filter(|&(_, c)| c > 1).map(|(k, _)| k).collect();

    for t in trees {
        if t.members.iter().filter(|m| level[m] == t.max_level).count() > 1 {
            report.shared_roots.push(t.root);
        }
        let bound = tree_diameter_bound(q, t.max_level);
        if t.diameter as f64 > bound {
            report.oversized.push((t.root, t.diameter, bound));
        }
    }

    let extent = |t: &LinkedTree| -> Vec<SpacetimePoint> {
        clusters
            .iter()
            .filter(|c| t.members.contains(&c.id))
            .flat_map(|c| c.extent.iter().copied())
            .collect()
    };
    for (i, a) in trees.iter().enumerate() {
        for b in &trees[i + 1..] {
            let n = a.max_level.min(b.max_level);
            let d = torus.region_distance(&extent(a), &extent(b));
            // d ≥ Q^{n+1}/4 − 2
            if 4 * (d as i128 + 2) < q_pow(q, n + 1) as i128 {
                report.close_trees.push((a.root, b.root, d));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cluster(id: usize, level: u32, pts: &[(i32, i32, i32)]) -> Cluster {
        let extent: Vec<SpacetimePoint> = pts.iter().map(|&(x, y, t)| SpacetimePoint::new(x, y, t)).collect();
        Cluster {
            id,
            level,
            absorbing: extent.clone(),
            absorbing_radius: 0,
            extent,
        }
    }

    #[test]
    fn distant_clusters_stay_apart() {
        let torus = Torus::new(100);
        let cs = [cluster(0, 0, &[(0, 0, 0)]), cluster(1, 0, &[(7, 0, 0)])];
        let trees = build_linked_trees(&torus, &cs, 6);
        assert_eq!(trees.len(), 2);
    }

    #[test]
    fn small_cluster_links_to_large_region() {
        let torus = Torus::new(100);
        let cs = [
            cluster(0, 2, &[(0, 0, 0), (10, 0, 0)]),
            cluster(1, 0, &[(16, 0, 0)]),
        ];
        let trees = build_linked_trees(&torus, &cs, 6);
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].root, 0);
        assert_eq!(trees[0].links, vec![Link { from: 1, to: 0 }]);
        assert!(check_linking(&torus, &cs, &trees, 6).equal_level_links.is_empty());
    }

    #[test]
    fn equal_level_links_are_reported() {
        let torus = Torus::new(100);
        let cs = [cluster(0, 0, &[(0, 0, 0)]), cluster(1, 0, &[(3, 0, 0)])];
        let trees = build_linked_trees(&torus, &cs, 6);
        let r = check_linking(&torus, &cs, &trees, 6);
        assert_eq!(r.equal_level_links.len(), 1);
        assert_eq!(r.shared_roots, vec![0]);
    }

    #[test]
    fn diameter_bound_values() {
        assert_eq!(tree_diameter_bound(11, 0), 6.0);
        assert!(tree_diameter_bound(11, 3) <= 3.0 * 1331.0);
    }
}
