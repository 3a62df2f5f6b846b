//! Four-μ logical qubit: two pairs whose fusion channel (vacuum or e)
//! stores one bit.

use rand::Rng;
use serde::Serialize;

use super::gauge::box_around;
use super::{FrameState, SimError};
use crate::algebra::{Charge, MicroCharge};
use crate::geometry::{Coord, Edge};
use crate::spacetime::{StabFamily, StabId, Worldline};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Designated {
    pub site: Coord,
    pub pair: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Readout {
    /// `None` when the first pair fuses to neither vacuum/η nor e.
    pub bit: Option<u8>,
    pub pair_charges: [Charge; 2],
}

impl FrameState {
    /// Dual path of edges from plaquette a to plaquette b: along x, then y.
    pub fn membrane_path(&self, a: Coord, b: Coord) -> Vec<Edge> {
        let t = &self.torus;
        let (dx, dy) = (t.axis_delta(a.0, b.0), t.axis_delta(a.1, b.1));
        let mut out = Vec::new();
        let (mut x, mut y) = a;
        for _ in 0..dx.abs() {
            if dx > 0 {
                out.push(Edge::Vertical(x + 1, y));
                x += 1;
            } else {
                out.push(Edge::Vertical(x, y));
                x -= 1;
            }
        }
        for _ in 0..dy.abs() {
            if dy > 0 {
                out.push(Edge::Horizontal(x, y + 1));
                y += 1;
            } else {
                out.push(Edge::Horizontal(x, y));
                y -= 1;
            }
        }
        out.into_iter().map(|e| t.wrap_edge(e)).collect()
    }

    /// Places pairs (0,1) and (2,3) joined by straight branch cuts. For bit
    /// 1 the first pair carries e and the second its conjugate.
    pub fn encode_logical(&mut self, positions: [Coord; 4], bit: u8, d: i32) -> Result<(), SimError> {
        let pos = positions.map(|p| self.torus.wrap2(p));
        for i in 0..4 {
            for j in i + 1..4 {
                if self.torus.site_distance(pos[i], pos[j]) < d {
                    return Err(SimError::PositionsTooClose(i, j, d));
                }
            }
        }
        for (a, b) in [(pos[0], pos[1]), (pos[2], pos[3])] {
            for e in self.membrane_path(a, b) {
                let i = self.torus.edge_index(e);
                self.qubit_x[i] ^= 1;
            }
        }
        let seeds = if bit == 1 {
            [MicroCharge::electric(1), MicroCharge::VACUUM, MicroCharge::electric(2), MicroCharge::VACUUM]
        } else {
            [MicroCharge::VACUUM; 4]
        };
        for (k, &p) in pos.iter().enumerate() {
            let i = self.torus.index(p);
            self.mu[i] = true;
            self.logical[i] = seeds[k];
            self.label[i] = Some(self.designated.len());
            self.designated.push(Designated { site: p, pair: k / 2 });
            self.schedule.worldlines.push(Worldline {
                stab: StabId::new(StabFamily::Beta, p),
                from: 0,
                to: None,
                offset: 1,
            });
        }
        for &p in &pos {
            self.settle_mu(p);
        }
        Ok(())
    }

    /// Box around the designated sites of one pair.
    pub fn pair_region(&self, pair: usize) -> std::collections::BTreeSet<Coord> {
        let sites: Vec<Coord> = self.designated.iter().filter(|d| d.pair == pair).map(|d| d.site).collect();
        box_around(&self.torus, &sites, 1)
    }

    /// Ungauges each pair's region and reads its total charge.
    pub fn readout_logical(&mut self, t: i32, rng: &mut impl Rng) -> Result<Readout, SimError> {
        let (a, b) = (self.pair_region(0), self.pair_region(1));
        if !a.is_disjoint(&b) {
            return Err(SimError::PairRegionsOverlap);
        }
        let mut charges = [Charge::Vacuum; 2];
        for (k, set) in [a, b].into_iter().enumerate() {
            let id = self.open(set, t, 0, true, rng)?.id;
            charges[k] = self.evaluate_neutrality(id)?;
        }
        let bit = match charges[0] {
            Charge::Vacuum | Charge::Eta => Some(0),
            Charge::E => Some(1),
            _ => None,
        };
        Ok(Readout { bit, pair_charges: charges })
    }
}
