//! Exact-cover search for small delivery instances.
//!
//! No block can serve more than `t_T + t_R` receivers: every other packet in
//! the block must be either cached by a receiver (at most `t_R` of them) or
//! zero-forced (at most `t_T - 1` with `t_T` cooperating transmitters). So
//! `ceil(packets / (t_T + t_R))` lower-bounds `H`, and a partition into full
//! blocks, when the search finds one, attains it.
//!
//! Candidate blocks use only the physical constraints: each member decodes
//! a packet it does not cache, whose caching receivers all sit in the block.
//! Nothing about circular arrangements or windows is assumed.

use std::collections::BTreeMap;

use super::build::combinations;
use super::{delta_hcb, Block, PacketId, Schedule, ScheduleError};
use crate::model::{DemandVector, NetworkConfig};
use crate::placement::{needed_subfiles, PlacementMap, SubfileId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCap {
    /// Packets per instance.
    pub max_packets: usize,
    /// Candidate blocks generated before giving up.
    pub max_options: usize,
}

impl Default for OracleCap {
    fn default() -> Self {
        Self {
            max_packets: 64,
            max_options: 4_000_000,
        }
    }
}

pub fn build_schedule_oracle(
    cfg: &NetworkConfig,
    pm: &PlacementMap,
    demand: &DemandVector,
) -> Result<Schedule, ScheduleError> {
    build_schedule_oracle_capped(cfg, pm, demand, OracleCap::default())
}

pub fn build_schedule_oracle_capped(
    cfg: &NetworkConfig,
    pm: &PlacementMap,
    demand: &DemandVector,
    cap: OracleCap,
) -> Result<Schedule, ScheduleError> {
    let split = delta_hcb(cfg)?;
    let items: Vec<(usize, PacketId)> = (0..cfg.k_r())
        .flat_map(|j| {
            needed_subfiles(pm, demand, j).into_iter().flat_map(move |subfile| {
                (0..split).map(move |k| {
                    (
                        j,
                        PacketId {
                            subfile: subfile.clone(),
                            k,
                        },
                    )
                })
            })
        })
        .collect();
    if items.len() > cap.max_packets {
        return Err(ScheduleError::TooLarge {
            packets: items.len(),
            cap: cap.max_packets,
        });
    }
    let blocks = exact_cover_search(cfg, &items, cap.max_options)?;
    Ok(Schedule {
        config: *cfg,
        demand: demand.clone(),
        delta_hcb: split,
        blocks,
    })
}

struct Candidate {
    members: Vec<usize>,
    /// Group index per member.
    groups: Vec<usize>,
}

/// Partitions `items` (receiver, packet) into blocks of `t_T + t_R`.
///
/// Subpackets of one subfile wanted by the same receiver are
/// interchangeable, so the search works on (receiver, subfile) groups that
/// must each be covered once per subpacket, and hands out subpacket indices
/// afterwards. Returns the blocks with members in ascending order.
pub fn exact_cover_search(
    cfg: &NetworkConfig,
    items: &[(usize, PacketId)],
    max_options: usize,
) -> Result<Vec<Block>, ScheduleError> {
    let size = cfg.block_size();
    if items.is_empty() {
        return Ok(Vec::new());
    }
    if !items.len().is_multiple_of(size) {
        return Err(ScheduleError::Infeasible { block_size: size });
    }

    let mut groups: BTreeMap<(usize, &SubfileId), Vec<usize>> = BTreeMap::new();
    for (j, p) in items {
        groups.entry((*j, &p.subfile)).or_default().push(p.k);
    }
    let keys: Vec<(usize, &SubfileId)> = groups.keys().copied().collect();
    let mut need: Vec<usize> = groups.values().map(Vec::len).collect();

    let mut receivers: Vec<usize> = keys.iter().map(|(j, _)| *j).collect();
    receivers.dedup();

    let mut candidates: Vec<Candidate> = Vec::new();
    for members in combinations(&receivers, size) {
        let per_member: Vec<Vec<usize>> = members
            .iter()
            .map(|&a| {
                keys.iter()
                    .enumerate()
                    .filter(|(_, (j, s))| *j == a && !s.rx.contains(&a) && s.rx.iter().all(|r| members.contains(r)))
                    .map(|(g, _)| g)
                    .collect()
            })
            .collect();
        let combos = per_member
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
            .unwrap_or(usize::MAX);
        if combos == 0 {
            continue;
        }
        if candidates.len().saturating_add(combos) > max_options {
            return Err(ScheduleError::TooLarge {
                packets: items.len(),
                cap: max_options,
            });
        }
        let mut picks = vec![0usize; members.len()];
        'odometer: loop {
            candidates.push(Candidate {
                members: members.clone(),
                groups: picks.iter().zip(&per_member).map(|(&p, c)| c[p]).collect(),
            });
            for slot in (0..picks.len()).rev() {
                picks[slot] += 1;
                if picks[slot] < per_member[slot].len() {
                    continue 'odometer;
                }
                picks[slot] = 0;
            }
            break;
        }
    }

    let mut by_group: Vec<Vec<usize>> = vec![Vec::new(); keys.len()];
    for (c, cand) in candidates.iter().enumerate() {
        cand.groups.iter().for_each(|&g| by_group[g].push(c));
    }
    let mut search = Search {
        cands: &candidates,
        by_group: &by_group,
        floor: vec![0; keys.len()],
        chosen: Vec::new(),
    };
    if !search.run(&mut need) {
        return Err(ScheduleError::Infeasible { block_size: size });
    }

    let mut next: Vec<usize> = vec![0; keys.len()];
    let ks: Vec<&Vec<usize>> = groups.values().collect();
    Ok(search
        .chosen
        .iter()
        .map(|&c| {
            let cand = &candidates[c];
            let packets = cand
                .groups
                .iter()
                .map(|&g| {
                    let k = ks[g][next[g]];
                    next[g] += 1;
                    PacketId {
                        subfile: keys[g].1.clone(),
                        k,
                    }
                })
                .collect();
            Block::from_assignments(cand.members.clone(), packets)
        })
        .collect())
}

/// Algorithm X with multiplicities. Branches on the open group with the
/// fewest usable candidates; candidates picked for a group never decrease
/// in index, so each multiset of blocks is tried once.
struct Search<'a> {
    cands: &'a [Candidate],
    by_group: &'a [Vec<usize>],
    floor: Vec<usize>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn usable(&self, c: usize, g: usize, need: &[usize]) -> bool {
        c >= self.floor[g] && self.cands[c].groups.iter().all(|&h| need[h] > 0)
    }

    fn run(&mut self, need: &mut [usize]) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for g in (0..need.len()).filter(|&g| need[g] > 0) {
            let live = self.by_group[g].iter().filter(|&&c| self.usable(c, g, need)).count();
            if live == 0 {
                return false;
            }
            if best.is_none_or(|(_, n)| live < n) {
                best = Some((g, live));
            }
        }
        let Some((g, _)) = best else {
            return true;
        };
        for i in 0..self.by_group[g].len() {
            let c = self.by_group[g][i];
            if !self.usable(c, g, need) {
                continue;
            }
            let saved = self.floor[g];
            self.floor[g] = c;
            self.cands[c].groups.iter().for_each(|&h| need[h] -= 1);
            self.chosen.push(c);
            if self.run(need) {
                return true;
            }
            self.chosen.pop();
            self.cands[c].groups.iter().for_each(|&h| need[h] += 1);
            self.floor[g] = saved;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{derive_config, partition_dimensions, validate_demand};
    use crate::placement::place_hypercube;
    use crate::scheduler::{build_schedule, ScheduleValidator};

    #[test]
    fn example_three_oracle_matches_structured() {
        let cfg = derive_config(4, 4, 4, 2, 2).unwrap();
        let dims = partition_dimensions(&cfg);
        let pm = place_hypercube(&cfg, &dims);
        let d = validate_demand(&cfg, &[0, 1, 2, 3]).unwrap();
        let oracle = build_schedule_oracle(&cfg, &pm, &d).unwrap();
        let structured = build_schedule(&cfg, &dims, &pm, &d).unwrap();
        assert_eq!(oracle.h(), 8);
        assert_eq!(oracle.h(), structured.h());
        let report = ScheduleValidator::new(&cfg, &pm, &d)
            .require_arrangement(false)
            .validate(&oracle);
        assert!(report.is_pass(), "{:?}", report.violation);
    }

    #[test]
    fn single_dimension_blocks_pair_up() {
        // t_T = t_R = 1: every block serves two receivers that cache each
        // other's packets
        let cfg = NetworkConfig::from_dimensions(2, 1, 3, 1).unwrap();
        let dims = partition_dimensions(&cfg);
        let pm = place_hypercube(&cfg, &dims);
        let d = DemandVector::cyclic(&cfg);
        let s = build_schedule_oracle(&cfg, &pm, &d).unwrap();
        assert!(s.blocks.iter().all(|b| b.members.len() == cfg.t_r() + 1));
        assert_eq!(s.h(), build_schedule(&cfg, &dims, &pm, &d).unwrap().h());
    }

    #[test]
    fn gates_match_structured_builder() {
        let cfg = NetworkConfig::placement_only(2, 2, 2, 2, 2).unwrap();
        let dims = partition_dimensions(&cfg);
        let pm = place_hypercube(&cfg, &dims);
        let d = DemandVector::cyclic(&cfg);
        assert_eq!(
            build_schedule_oracle(&cfg, &pm, &d),
            Err(ScheduleError::NotApplicable { d_r: 1, delta: 1 })
        );

        let big = NetworkConfig::from_dimensions(3, 2, 3, 2).unwrap();
        let dims = partition_dimensions(&big);
        let pm = place_hypercube(&big, &dims);
        assert!(matches!(
            build_schedule_oracle(&big, &pm, &DemandVector::cyclic(&big)),
            Err(ScheduleError::TooLarge { .. })
        ));
    }

    #[test]
    fn too_few_receivers_is_infeasible() {
        // D_R = 2 < delta + 1 = 3: blocks of 3 need three receivers, only two
        // exist
        let cfg = NetworkConfig::placement_only(4, 2, 4, 2, 2).unwrap();
        assert_eq!((cfg.delta(), cfg.d_r()), (2, 2));
        let pm = place_hypercube(&cfg, &partition_dimensions(&cfg));
        let d = DemandVector::cyclic(&cfg);
        let items: Vec<(usize, PacketId)> = (0..cfg.k_r())
            .flat_map(|j| {
                needed_subfiles(&pm, &d, j)
                    .into_iter()
                    .map(move |subfile| (j, PacketId { subfile, k: 0 }))
            })
            .collect();
        assert_eq!(items.len(), 8);
        assert_eq!(
            exact_cover_search(&cfg, &items, 1 << 20),
            Err(ScheduleError::Infeasible { block_size: 3 })
        );
    }
}
