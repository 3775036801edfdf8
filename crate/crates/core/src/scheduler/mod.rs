//! Delivery scheduling.
//!
//! Each needed subfile is split into `Δ_HCB` subpackets, and the subpackets
//! are grouped into blocks of `t_T + t_R` that can be sent at once: inside a
//! block every packet is cached by `t_R` co-members and zero-forced at the
//! remaining `t_T - 1`.
//!
//! [`build_schedule`] is the structured constructor, [`validate_schedule`]
//! checks any schedule against the cache-coverage rules, and
//! [`build_schedule_oracle`] finds a partition by exact-cover search.

mod build;
mod document;
mod oracle;
mod validate;

use std::fmt;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::counting;
use crate::model::{DemandVector, NetworkConfig};
use crate::placement::SubfileId;

pub use build::{block_receiver_sets, build_schedule, expected_block_count};
pub use document::{parse_schedule, write_schedule, DocumentError};
pub use oracle::{build_schedule_oracle, build_schedule_oracle_capped, exact_cover_search, OracleCap};
pub use validate::{validate_schedule, ScheduleValidator, ValidationReport, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("scheduling needs D_R >= delta+1, got D_R = {d_r}, delta = {delta}")]
    NotApplicable { d_r: usize, delta: usize },
    #[error("instance has {packets} packets, above the cap of {cap}")]
    TooLarge { packets: usize, cap: usize },
    #[error("no partition into blocks of {block_size} exists")]
    Infeasible { block_size: usize },
    #[error("subfile {subfile} was used {used} times, expected {expected}")]
    ConsumptionMismatch {
        subfile: String,
        used: usize,
        expected: usize,
    },
}

/// Subpacket `k` of a subfile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacketId {
    pub subfile: SubfileId,
    pub k: usize,
}

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.subfile, self.k)
    }
}

/// One member's share of a block: the packet it decodes and the receivers
/// that packet is zero-forced at.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockEntry {
    pub receiver: usize,
    pub packet: PacketId,
    pub zf_targets: Vec<usize>,
}

/// Receivers served together in one resource block. `members` is a circular
/// arrangement; `entries` follows the same order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub members: Vec<usize>,
    pub entries: Vec<BlockEntry>,
}

impl Block {
    /// Builds a block from `(receiver, packet)` pairs, deriving each
    /// zero-forcing set as the members that neither decode nor cache it.
    pub fn from_assignments(members: Vec<usize>, packets: Vec<PacketId>) -> Self {
        let entries = members
            .iter()
            .zip(packets)
            .map(|(&receiver, packet)| {
                let zf_targets = zf_targets(&members, receiver, &packet.subfile.rx);
                BlockEntry {
                    receiver,
                    packet,
                    zf_targets,
                }
            })
            .collect();
        Self { members, entries }
    }

    /// Transmitter set shared by every packet, if there is one.
    pub fn common_tx(&self) -> Option<&[usize]> {
        let first = &self.entries.first()?.packet.subfile.tx;
        self.entries
            .iter()
            .all(|e| &e.packet.subfile.tx == first)
            .then_some(first.as_slice())
    }
}

/// `members \ ({receiver} ∪ cache_set)`, ascending.
pub fn zf_targets(members: &[usize], receiver: usize, cache_set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&m| m != receiver && !cache_set.contains(&m))
        .collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub config: NetworkConfig,
    pub demand: DemandVector,
    pub delta_hcb: usize,
    pub blocks: Vec<Block>,
}

impl Schedule {
    pub fn empty(config: NetworkConfig, demand: DemandVector, delta_hcb: usize) -> Self {
        Self {
            config,
            demand,
            delta_hcb,
            blocks: Vec::new(),
        }
    }

    /// Number of blocks, `H`.
    pub fn h(&self) -> usize {
        self.blocks.len()
    }

    pub fn total_packets(&self) -> usize {
        self.blocks.iter().map(|b| b.entries.len()).sum()
    }
}

/// `Δ_HCB` for a schedulable config.
pub fn delta_hcb(cfg: &NetworkConfig) -> Result<usize, ScheduleError> {
    counting::hypercube_split(cfg.d_r(), cfg.delta(), cfg.t_r())
        .filter(|_| cfg.is_schedulable())
        .map(|v| v.to_usize().expect("split factor fits in usize"))
        .ok_or(ScheduleError::NotApplicable {
            d_r: cfg.d_r(),
            delta: cfg.delta(),
        })
}

/// Packets that must be delivered for a demand:
/// `K_R * D_T^{t_T} * (D_R - 1) * D_R^{t_R - 1} * Δ_HCB`.
pub fn needed_packet_count(cfg: &NetworkConfig) -> Result<usize, ScheduleError> {
    Ok(cfg.k_r() * cfg.needed_subfiles_per_receiver() * delta_hcb(cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleStats {
    pub h: usize,
    pub total_packets: usize,
    /// `total_packets / H`; `None` for an empty schedule.
    pub dof: Option<Ratio<usize>>,
}

pub fn schedule_stats(s: &Schedule) -> ScheduleStats {
    let h = s.h();
    let total_packets = s.total_packets();
    ScheduleStats {
        h,
        total_packets,
        dof: (h > 0).then(|| Ratio::new(total_packets, h)),
    }
}
