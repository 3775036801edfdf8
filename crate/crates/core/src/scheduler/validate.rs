use std::collections::HashSet;
use std::fmt;

use super::{zf_targets, PacketId, Schedule};
use crate::model::{DemandVector, NetworkConfig};
use crate::placement::{needed_subfiles, PlacementMap};

/// First rule a schedule breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BlockSizeViolation {
        block: usize,
        expected: usize,
        actual: usize,
    },
    /// Entries do not line up one-to-one with the members.
    MemberMismatch {
        block: usize,
    },
    DuplicateMember {
        block: usize,
        receiver: usize,
    },
    MalformedPacket {
        block: usize,
        receiver: usize,
    },
    WrongFile {
        block: usize,
        receiver: usize,
        expected: usize,
        actual: usize,
    },
    /// The receiver already caches the packet it is sent.
    SelfCacheViolation {
        block: usize,
        receiver: usize,
    },
    /// Some receiver caching the packet is not a block member.
    CacheSetOutsideBlock {
        block: usize,
        receiver: usize,
    },
    ZfTargetMismatch {
        block: usize,
        receiver: usize,
    },
    DimensionImbalance {
        block: usize,
        dimension: usize,
        count: usize,
    },
    NotHypercubeArrangement {
        block: usize,
    },
    SubpacketOutOfRange {
        block: usize,
        receiver: usize,
        k: usize,
    },
    DuplicatePacket {
        receiver: usize,
        packet: PacketId,
    },
    UnneededPacket {
        receiver: usize,
        packet: PacketId,
    },
    MissingPacket {
        receiver: usize,
        packet: PacketId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BlockSizeViolation {
                block,
                expected,
                actual,
            } => {
                write!(f, "block {block}: {actual} members, expected {expected}")
            }
            Violation::MemberMismatch { block } => {
                write!(f, "block {block}: entries do not match members")
            }
            Violation::DuplicateMember { block, receiver } => {
                write!(f, "block {block}: Rx_{receiver} listed twice")
            }
            Violation::MalformedPacket { block, receiver } => {
                write!(f, "block {block}: packet for Rx_{receiver} is not a hypercube subfile")
            }
            Violation::WrongFile {
                block,
                receiver,
                expected,
                actual,
            } => write!(
                f,
                "block {block}: Rx_{receiver} requested file {expected}, got file {actual}"
            ),
            Violation::SelfCacheViolation { block, receiver } => {
                write!(f, "block {block}: Rx_{receiver} already caches its packet")
            }
            Violation::CacheSetOutsideBlock { block, receiver } => {
                write!(f, "block {block}: packet for Rx_{receiver} is cached outside the block")
            }
            Violation::ZfTargetMismatch { block, receiver } => {
                write!(f, "block {block}: zero-forcing set for Rx_{receiver}'s packet is wrong")
            }
            Violation::DimensionImbalance {
                block,
                dimension,
                count,
            } => write!(f, "block {block}: receiver dimension {dimension} has {count} members"),
            Violation::NotHypercubeArrangement { block } => {
                write!(f, "block {block}: members are not a circular hypercube arrangement")
            }
            Violation::SubpacketOutOfRange { block, receiver, k } => {
                write!(f, "block {block}: Rx_{receiver} subpacket index {k} out of range")
            }
            Violation::DuplicatePacket { receiver, packet } => {
                write!(f, "{packet} delivered to Rx_{receiver} more than once")
            }
            Violation::UnneededPacket { receiver, packet } => {
                write!(f, "{packet} is not needed by Rx_{receiver}")
            }
            Violation::MissingPacket { receiver, packet } => {
                write!(f, "{packet} is never delivered to Rx_{receiver}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
    pub blocks_checked: usize,
    pub packets_checked: usize,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// Schedule checker. By default all rules apply; the arrangement rule can be
/// switched off for schedules whose blocks are not built from circular
/// arrangements (the exact-cover oracle's, for instance).
#[derive(Debug, Clone)]
pub struct ScheduleValidator<'a> {
    cfg: &'a NetworkConfig,
    pm: &'a PlacementMap,
    demand: &'a DemandVector,
    split: usize,
    require_arrangement: bool,
}

impl<'a> ScheduleValidator<'a> {
    pub fn new(cfg: &'a NetworkConfig, pm: &'a PlacementMap, demand: &'a DemandVector) -> Self {
        Self {
            cfg,
            pm,
            demand,
            split: super::delta_hcb(cfg).unwrap_or(0),
            require_arrangement: true,
        }
    }

    pub fn require_arrangement(mut self, on: bool) -> Self {
        self.require_arrangement = on;
        self
    }

    pub fn validate(&self, s: &Schedule) -> ValidationReport {
        let mut report = ValidationReport {
            violation: None,
            blocks_checked: 0,
            packets_checked: 0,
        };
        for (idx, block) in s.blocks.iter().enumerate() {
            if let Err(v) = self.check_block(idx, block) {
                report.violation = Some(v);
                return report;
            }
            report.blocks_checked += 1;
        }
        if let Err(v) = self.check_cover(s) {
            report.violation = Some(v);
            return report;
        }
        report.packets_checked = s.total_packets();
        report
    }

    fn check_block(&self, idx: usize, block: &super::Block) -> Result<(), Violation> {
        let cfg = self.cfg;
        let size = cfg.block_size();
        if block.members.len() != size {
            return Err(Violation::BlockSizeViolation {
                block: idx,
                expected: size,
                actual: block.members.len(),
            });
        }
        if block.entries.len() != size || block.entries.iter().zip(&block.members).any(|(e, &m)| e.receiver != m) {
            return Err(Violation::MemberMismatch { block: idx });
        }
        let mut seen = HashSet::new();
        if let Some(&receiver) = block.members.iter().find(|&&m| !seen.insert(m)) {
            return Err(Violation::DuplicateMember { block: idx, receiver });
        }

        for e in &block.entries {
            let (a, sf) = (e.receiver, &e.packet.subfile);
            if a >= cfg.k_r() || !sf.is_well_formed(cfg) {
                return Err(Violation::MalformedPacket {
                    block: idx,
                    receiver: a,
                });
            }
            if sf.file != self.demand.file(a) {
                return Err(Violation::WrongFile {
                    block: idx,
                    receiver: a,
                    expected: self.demand.file(a),
                    actual: sf.file,
                });
            }
            if sf.rx.contains(&a) {
                return Err(Violation::SelfCacheViolation {
                    block: idx,
                    receiver: a,
                });
            }
            if sf.rx.iter().any(|r| !block.members.contains(r)) {
                return Err(Violation::CacheSetOutsideBlock {
                    block: idx,
                    receiver: a,
                });
            }
            if e.zf_targets != zf_targets(&block.members, a, &sf.rx) {
                return Err(Violation::ZfTargetMismatch {
                    block: idx,
                    receiver: a,
                });
            }
            debug_assert_eq!(e.zf_targets.len(), cfg.t_t() - 1);
            if e.packet.k >= self.split {
                return Err(Violation::SubpacketOutOfRange {
                    block: idx,
                    receiver: a,
                    k: e.packet.k,
                });
            }
        }

        if self.require_arrangement {
            self.check_arrangement(idx, &block.members)?;
        }
        Ok(())
    }

    fn check_arrangement(&self, idx: usize, members: &[usize]) -> Result<(), Violation> {
        let (t_r, d_r) = (self.cfg.t_r(), self.cfg.d_r());
        let mut counts = vec![0usize; t_r];
        members.iter().for_each(|&m| counts[m / d_r] += 1);
        if let Some((dimension, &count)) = counts.iter().enumerate().find(|(_, &c)| c != self.cfg.delta() + 1) {
            return Err(Violation::DimensionImbalance {
                block: idx,
                dimension,
                count,
            });
        }
        let consistent = members
            .iter()
            .enumerate()
            .all(|(p, &m)| m / d_r == members[p % t_r] / d_r);
        let distinct_residues: HashSet<usize> = members[..t_r].iter().map(|m| m / d_r).collect();
        if !consistent || distinct_residues.len() != t_r {
            return Err(Violation::NotHypercubeArrangement { block: idx });
        }
        Ok(())
    }

    fn check_cover(&self, s: &Schedule) -> Result<(), Violation> {
        let mut expected: HashSet<(usize, PacketId)> = HashSet::new();
        for j in 0..self.cfg.k_r() {
            for subfile in needed_subfiles(self.pm, self.demand, j) {
                for k in 0..self.split {
                    expected.insert((
                        j,
                        PacketId {
                            subfile: subfile.clone(),
                            k,
                        },
                    ));
                }
            }
        }
        let mut delivered = HashSet::with_capacity(expected.len());
        for e in s.blocks.iter().flat_map(|b| &b.entries) {
            let key = (e.receiver, e.packet.clone());
            if !expected.contains(&key) {
                return Err(Violation::UnneededPacket {
                    receiver: e.receiver,
                    packet: e.packet.clone(),
                });
            }
            if !delivered.insert(key) {
                return Err(Violation::DuplicatePacket {
                    receiver: e.receiver,
                    packet: e.packet.clone(),
                });
            }
        }
        if delivered.len() != expected.len() {
            let mut missing: Vec<&(usize, PacketId)> = expected.iter().filter(|k| !delivered.contains(*k)).collect();
            missing.sort();
            let (receiver, packet) = missing[0].clone();
            return Err(Violation::MissingPacket { receiver, packet });
        }
        Ok(())
    }
}

/// Checks a schedule against every rule: block size, per-member cache and
/// file constraints, zero-forcing sets, the circular arrangement of members,
/// and exact cover of the needed packets. Reports the first violation.
pub fn validate_schedule(
    cfg: &NetworkConfig,
    pm: &PlacementMap,
    demand: &DemandVector,
    s: &Schedule,
) -> ValidationReport {
    ScheduleValidator::new(cfg, pm, demand).validate(s)
}
