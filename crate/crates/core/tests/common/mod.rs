#![allow(dead_code)]

use std::collections::HashMap;

use hypercube_ia::model::{partition_dimensions, DemandVector, NetworkConfig};
use hypercube_ia::placement::{needed_subfiles, place_hypercube, PlacementMap};
use hypercube_ia::scheduler::{build_schedule, delta_hcb, Schedule};
use num_bigint::BigUint;

/// Geometry `(D_T, t_T, D_R, t_R)` of the schedulability grid:
/// delta in {1, 2}, D_R in [delta+1, 5], t_R in [1, 3], D_T in [1, 3].
pub fn theorem_grid() -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for delta in 1..=2 {
        for d_r in delta + 1..=5 {
            for t_r in 1..=3 {
                for d_t in 1..=3 {
                    out.push((d_t, delta * t_r, d_r, t_r));
                }
            }
        }
    }
    out
}

pub struct Instance {
    pub cfg: NetworkConfig,
    pub pm: PlacementMap,
    pub demand: DemandVector,
}

impl Instance {
    pub fn new(d_t: usize, t_t: usize, d_r: usize, t_r: usize) -> Self {
        let cfg = NetworkConfig::from_dimensions(d_t, t_t, d_r, t_r).expect("grid geometry is valid");
        let pm = place_hypercube(&cfg, &partition_dimensions(&cfg));
        let demand = DemandVector::cyclic(&cfg);
        Self { cfg, pm, demand }
    }

    /// Packets the demand needs, counted from the placement.
    pub fn needed_packets(&self) -> usize {
        let per_rx: usize = (0..self.cfg.k_r())
            .map(|j| needed_subfiles(&self.pm, &self.demand, j).len())
            .sum();
        per_rx * delta_hcb(&self.cfg).expect("grid is schedulable")
    }

    pub fn schedule(&self) -> Schedule {
        build_schedule(&self.cfg, &partition_dimensions(&self.cfg), &self.pm, &self.demand).expect("schedule builds")
    }
}

/// Subpackets drawn per (receiver, subfile) in a schedule.
pub fn consumption(s: &Schedule) -> HashMap<(usize, String), usize> {
    let mut used = HashMap::new();
    for e in s.blocks.iter().flat_map(|b| &b.entries) {
        *used.entry((e.receiver, e.packet.subfile.to_string())).or_insert(0) += 1;
    }
    used
}

pub fn big_binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

pub fn big_factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}
