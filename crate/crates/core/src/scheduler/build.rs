use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::{delta_hcb, Block, PacketId, Schedule, ScheduleError};
use crate::combinatorics::{circular_arrangements_of, CircularArrangement};
use crate::counting::{binomial, factorial, pow};
use crate::model::{DemandVector, DimensionPartition, NetworkConfig};
use crate::placement::{needed_subfiles, product, PlacementMap, SubfileId};

/// `k`-subsets of `items` in lexicographic order.
pub(crate) fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Every block receiver set: `delta + 1` receivers from each receiver
/// dimension, grouped by dimension.
pub fn block_receiver_sets(cfg: &NetworkConfig, dims: &DimensionPartition) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for dim in &dims.rx_dims {
        let choices = combinations(dim, cfg.delta() + 1);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// Closed-form block count of the structured schedule,
/// `D_T^{t_T} * C(D_R, delta+1)^{t_R} * t_R! * ((delta+1)!)^{t_R} / ((delta+1) * t_R)`.
pub fn expected_block_count(cfg: &NetworkConfig) -> Option<BigUint> {
    if !cfg.is_schedulable() {
        return None;
    }
    let (t_r, group) = (cfg.t_r(), cfg.delta() + 1);
    let numer = pow(cfg.d_t(), cfg.t_t())
        * num_traits::pow(binomial(cfg.d_r(), group), t_r)
        * factorial(t_r)
        * num_traits::pow(factorial(group), t_r);
    Some(numer / BigUint::from(group * t_r))
}

/// Structured delivery schedule.
///
/// Blocks are enumerated as (transmitter set `T`, block receiver set `B`,
/// circular arrangement of `B`). In each block, member `a` receives a fresh
/// subpacket of `W_{d_a, T, S_a}`, where `S_a` is the set of `t_R` members
/// following `a` around the arrangement; those members cache the packet and
/// the other `t_T - 1` members are zero-forced. Subpacket indices count up
/// per subfile in enumeration order. Every needed subfile must come out
/// consumed exactly `Δ_HCB` times, otherwise the build fails.
pub fn build_schedule(
    cfg: &NetworkConfig,
    dims: &DimensionPartition,
    pm: &PlacementMap,
    demand: &DemandVector,
) -> Result<Schedule, ScheduleError> {
    let split = delta_hcb(cfg)?;
    let tx_sets = product(&dims.tx_dims);
    let arranged: Vec<Vec<CircularArrangement>> = block_receiver_sets(cfg, dims)
        .iter()
        .map(|b| circular_arrangements_of(b).expect("block dimensions are uniform"))
        .collect();
    let needed: Vec<Vec<SubfileId>> = (0..cfg.k_r()).map(|j| needed_subfiles(pm, demand, j)).collect();

    // Each subfile has one T, so per-T work is independent; collecting the
    // parallel results keeps enumeration order.
    let per_tx: Vec<Result<Vec<Block>, ScheduleError>> = tx_sets
        .par_iter()
        .map(|tx| blocks_for_tx(cfg, demand, tx, &arranged, &needed, split))
        .collect();
    let mut blocks = Vec::new();
    for part in per_tx {
        blocks.extend(part?);
    }
    Ok(Schedule {
        config: *cfg,
        demand: demand.clone(),
        delta_hcb: split,
        blocks,
    })
}

fn blocks_for_tx(
    cfg: &NetworkConfig,
    demand: &DemandVector,
    tx: &[usize],
    arranged: &[Vec<CircularArrangement>],
    needed: &[Vec<SubfileId>],
    split: usize,
) -> Result<Vec<Block>, ScheduleError> {
    let t_r = cfg.t_r();
    let mut used: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut blocks = Vec::with_capacity(arranged.iter().map(Vec::len).sum());
    for arrangement in arranged.iter().flatten() {
        let packets = (0..arrangement.len())
            .map(|pos| {
                let a = arrangement.seq[pos];
                let mut window: Vec<usize> = arrangement.successors(pos, t_r).collect();
                window.sort_unstable();
                let counter = used.entry((a, window.clone())).or_insert(0);
                let k = *counter;
                *counter += 1;
                PacketId {
                    subfile: SubfileId::new(demand.file(a), tx.to_vec(), window),
                    k,
                }
            })
            .collect();
        blocks.push(Block::from_assignments(arrangement.seq.clone(), packets));
    }

    for (j, subfiles) in needed.iter().enumerate() {
        for s in subfiles.iter().filter(|s| s.tx == tx) {
            let count = used.remove(&(j, s.rx.clone())).unwrap_or(0);
            if count != split {
                return Err(ScheduleError::ConsumptionMismatch {
                    subfile: s.to_string(),
                    used: count,
                    expected: split,
                });
            }
        }
    }
    if let Some(((j, rx), &count)) = used.iter().next() {
        let stray = SubfileId::new(demand.file(*j), tx.to_vec(), rx.clone());
        return Err(ScheduleError::ConsumptionMismatch {
            subfile: stray.to_string(),
            used: count,
            expected: 0,
        });
    }
    Ok(blocks)
}

/// Block count as a machine integer, when it fits.
#[cfg(test)]
pub(crate) fn expected_block_count_usize(cfg: &NetworkConfig) -> Option<usize> {
    expected_block_count(cfg).and_then(|v| num_traits::ToPrimitive::to_usize(&v))
}
