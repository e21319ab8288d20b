//! Constraint-propagating enumeration of parity sectors.
//!
//! Edges are assigned from the highest index down with states in ascending
//! order, so configurations come out in ascending packed order. A vertex is
//! checked against its target parity as soon as its lowest-index incident
//! edge is assigned.

use super::{DefectPattern, EdgeConfig, EdgeState, LatticeGeometry, PackedConfig};
use crate::error::{LoopError, Result};

/// Heuristic size of one parity sector: `3^E / 4^(V-1)`.
pub fn estimated_sector_size(geom: &LatticeGeometry) -> f64 {
    let e = geom.num_edges() as f64;
    let v = geom.num_vertices() as f64;
    (e * 3f64.ln() - (v - 1.0) * 4f64.ln()).exp()
}

/// Streaming enumerator over one defect sector.
pub struct SectorEnumerator<'g> {
    geom: &'g LatticeGeometry,
    target: Vec<u8>,
    states: Vec<u8>,
    parity: Vec<u8>,
    next_state: Vec<u8>,
    completes: Vec<Vec<usize>>,
    // edge currently being assigned; -1 means a full assignment is pending
    level: isize,
    done: bool,
}

impl<'g> SectorEnumerator<'g> {
    fn new(geom: &'g LatticeGeometry, target: &DefectPattern) -> Self {
        let n = geom.num_edges();
        let mut completes = vec![Vec::new(); n];
        for v in 0..geom.num_vertices() {
            let lowest = geom.vertex_edges[v].iter().copied().min().expect("vertex has edges");
            completes[lowest].push(v);
        }
        Self {
            geom,
            target: target.bits().to_vec(),
            states: vec![0; n],
            parity: vec![0; geom.num_vertices()],
            next_state: vec![0; n],
            completes,
            level: n as isize - 1,
            done: n == 0 || !target.is_balanced(),
        }
    }

    fn toggle(&mut self, e: usize, state: u8) {
        let bits = EdgeState::from_index(state).expect("state < 3").parity_bits();
        if bits != 0 {
            let [a, b] = self.geom.edge(e).endpoints;
            self.parity[a] ^= bits;
            self.parity[b] ^= bits;
        }
    }

    fn packed(&self) -> PackedConfig {
        self.states.iter().rev().fold(0u64, |acc, &s| acc * 3 + s as u64)
    }
}

impl Iterator for SectorEnumerator<'_> {
    type Item = PackedConfig;

    fn next(&mut self) -> Option<PackedConfig> {
        let n = self.states.len() as isize;
        while !self.done {
            if self.level < 0 {
                self.level = 0;
                return Some(self.packed());
            }
            let e = self.level as usize;
            if self.next_state[e] > 0 {
                let prev = self.states[e];
                self.toggle(e, prev);
                self.states[e] = 0;
            }
            if self.next_state[e] == 3 {
                self.next_state[e] = 0;
                self.level += 1;
                if self.level == n {
                    self.done = true;
                }
                continue;
            }
            let s = self.next_state[e];
            self.next_state[e] += 1;
            self.states[e] = s;
            self.toggle(e, s);
            if self.completes[e].iter().all(|&v| self.parity[v] == self.target[v]) {
                self.level -= 1;
            }
        }
        None
    }
}

fn check_budget(geom: &LatticeGeometry, budget: u64) -> Result<()> {
    geom.check_packable()?;
    let estimate = estimated_sector_size(geom);
    if estimate > budget as f64 {
        return Err(LoopError::BudgetExceeded { estimated: estimate.ceil() as u64, budget });
    }
    Ok(())
}

/// Streams every configuration with the given defect pattern, ascending.
pub fn enumerate_sector_configs<'g>(
    geom: &'g LatticeGeometry,
    target: &DefectPattern,
    budget: u64,
) -> Result<SectorEnumerator<'g>> {
    if target.len() != geom.num_vertices() {
        return Err(LoopError::GeometryMismatch(format!(
            "defect pattern has {} vertices, geometry has {}",
            target.len(),
            geom.num_vertices()
        )));
    }
    check_budget(geom, budget)?;
    Ok(SectorEnumerator::new(geom, target))
}

/// Streams every closed bicolor loop configuration, ascending.
pub fn enumerate_closed_loop_configs(geom: &LatticeGeometry, budget: u64) -> Result<SectorEnumerator<'_>> {
    enumerate_sector_configs(geom, &DefectPattern::closed(geom.num_vertices()), budget)
}

/// Materialises a sector, failing once more than `budget` states are produced.
pub fn collect_sector_configs(
    geom: &LatticeGeometry,
    target: &DefectPattern,
    budget: u64,
) -> Result<Vec<PackedConfig>> {
    let mut out = Vec::new();
    for packed in enumerate_sector_configs(geom, target, budget)? {
        if out.len() as u64 >= budget {
            return Err(LoopError::BudgetExceeded { estimated: out.len() as u64 + 1, budget });
        }
        out.push(packed);
    }
    Ok(out)
}

pub fn collect_closed_loop_configs(geom: &LatticeGeometry, budget: u64) -> Result<Vec<PackedConfig>> {
    collect_sector_configs(geom, &DefectPattern::closed(geom.num_vertices()), budget)
}

impl EdgeConfig {
    /// Decodes a packed index for `geom`.
    pub fn from_packed(geom: &LatticeGeometry, packed: PackedConfig) -> Self {
        EdgeConfig::unpack(packed, geom.num_edges())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hex_torus, build_square_torus};

    #[test]
    fn empty_config_comes_first() {
        let g = build_square_torus(3).unwrap();
        let mut it = enumerate_closed_loop_configs(&g, 1 << 20).unwrap();
        assert_eq!(it.next(), Some(0));
    }

    #[test]
    fn strictly_increasing() {
        let g = build_hex_torus(2, 3).unwrap();
        let all = collect_closed_loop_configs(&g, 1 << 20).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for &p in &all {
            assert!(EdgeConfig::from_packed(&g, p).is_closed(&g).unwrap());
        }
    }

    #[test]
    fn budget_errors() {
        let g = build_square_torus(4).unwrap();
        match enumerate_closed_loop_configs(&g, 1000) {
            Err(LoopError::BudgetExceeded { estimated, budget }) => {
                assert_eq!(budget, 1000);
                assert!(estimated > 1_000_000);
            }
            other => panic!("expected budget error, got {:?}", other.map(|_| ())),
        }
        let g = build_square_torus(2).unwrap();
        assert!(matches!(collect_closed_loop_configs(&g, 120), Err(LoopError::BudgetExceeded { .. })));
    }

    #[test]
    fn unbalanced_target_is_empty() {
        let g = build_square_torus(2).unwrap();
        let target = DefectPattern::with_defects(4, &[(0, EdgeState::Red)]).unwrap();
        assert_eq!(enumerate_sector_configs(&g, &target, 1 << 20).unwrap().count(), 0);
    }
}
