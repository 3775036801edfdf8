//! Line-oriented text form of a schedule.
//!
//! ```text
//! # hypercube-ia schedule v1
//! config k_t=4 k_r=4 n=4 m_t=2 m_r=2
//! demand 0,1,2,3
//! delta_hcb 1
//! blocks 8
//! block 0 members 0,2,1,3
//!   rx 0 file 0 tx 0,2 cache 1,2 sub 0 zf 3
//! end
//! ```
//!
//! Lines starting with `#` are comments; callers use them to embed run
//! metadata. Empty sets are written as `-`.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::{Block, BlockEntry, PacketId, Schedule};
use crate::model::{validate_demand, NetworkConfig};
use crate::placement::SubfileId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DocumentError {
    pub line: usize,
    pub message: String,
}

fn list(items: &[usize]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        crate::placement::join(items)
    }
}

pub fn write_schedule<W: Write>(s: &Schedule, out: &mut W) -> io::Result<()> {
    let c = &s.config;
    writeln!(out, "# hypercube-ia schedule v1")?;
    writeln!(
        out,
        "config k_t={} k_r={} n={} m_t={} m_r={}",
        c.k_t(),
        c.k_r(),
        c.n(),
        c.m_t(),
        c.m_r()
    )?;
    writeln!(out, "demand {}", list(s.demand.files()))?;
    writeln!(out, "delta_hcb {}", s.delta_hcb)?;
    writeln!(out, "blocks {}", s.h())?;
    for (i, b) in s.blocks.iter().enumerate() {
        writeln!(out, "block {i} members {}", list(&b.members))?;
        for e in &b.entries {
            let p = &e.packet;
            writeln!(
                out,
                "  rx {} file {} tx {} cache {} sub {} zf {}",
                e.receiver,
                p.subfile.file,
                list(&p.subfile.tx),
                list(&p.subfile.rx),
                p.k,
                list(&e.zf_targets)
            )?;
        }
    }
    writeln!(out, "end")
}

struct Parser {
    line: usize,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, DocumentError> {
        Err(DocumentError {
            line: self.line,
            message: message.into(),
        })
    }

    fn num(&self, tok: Option<&str>) -> Result<usize, DocumentError> {
        match tok.map(str::parse::<usize>) {
            Some(Ok(v)) => Ok(v),
            Some(Err(_)) => self.err(format!("bad number {:?}", tok.unwrap_or(""))),
            None => self.err("missing number"),
        }
    }

    fn list(&self, tok: Option<&str>) -> Result<Vec<usize>, DocumentError> {
        match tok {
            None => self.err("missing list"),
            Some("-") => Ok(Vec::new()),
            Some(t) => t
                .split(',')
                .map(|v| v.parse().or_else(|_| self.err(format!("bad list {t:?}"))))
                .collect(),
        }
    }

    fn keyed<'a>(&self, toks: &mut impl Iterator<Item = &'a str>, key: &str) -> Result<Option<&'a str>, DocumentError> {
        match toks.next() {
            Some(k) if k == key => Ok(toks.next()),
            other => self.err(format!("expected {key:?}, found {:?}", other.unwrap_or(""))),
        }
    }
}

/// Reads a schedule written by [`write_schedule`]. Only the syntax and the
/// config/demand are checked here; use the validator for the rest.
pub fn parse_schedule<R: BufRead>(input: R) -> Result<Schedule, DocumentError> {
    let mut p = Parser { line: 0 };
    let mut config: Option<NetworkConfig> = None;
    let mut demand = None;
    let mut delta_hcb = None;
    let mut declared = None;
    let mut blocks: Vec<Block> = Vec::new();
    let mut ended = false;

    for raw in input.lines() {
        p.line += 1;
        let raw = raw.map_err(|e| DocumentError {
            line: p.line,
            message: e.to_string(),
        })?;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if ended {
            return p.err("content after end");
        }
        let mut toks = text.split_whitespace();
        match toks.next() {
            Some("config") => {
                let mut vals = [0usize; 5];
                for (slot, key) in vals.iter_mut().zip(["k_t", "k_r", "n", "m_t", "m_r"]) {
                    let tok = toks.next().unwrap_or("");
                    match tok.split_once('=') {
                        Some((k, v)) if k == key => *slot = p.num(Some(v))?,
                        _ => return p.err(format!("expected {key}=<value>, found {tok:?}")),
                    }
                }
                let [k_t, k_r, n, m_t, m_r] = vals;
                config = Some(NetworkConfig::placement_only(k_t, k_r, n, m_t, m_r).or_else(|e| p.err(e.to_string()))?);
            }
            Some("demand") => {
                let Some(cfg) = &config else {
                    return p.err("demand before config");
                };
                let files = p.list(toks.next())?;
                demand = Some(validate_demand(cfg, &files).or_else(|e| p.err(e.to_string()))?);
            }
            Some("delta_hcb") => delta_hcb = Some(p.num(toks.next())?),
            Some("blocks") => declared = Some(p.num(toks.next())?),
            Some("block") => {
                let idx = p.num(toks.next())?;
                if idx != blocks.len() {
                    return p.err(format!("block {idx} out of order"));
                }
                let members = p.list(p.keyed(&mut toks, "members")?)?;
                blocks.push(Block {
                    members,
                    entries: Vec::new(),
                });
            }
            Some("rx") => {
                let receiver = p.num(toks.next())?;
                let file = p.num(p.keyed(&mut toks, "file")?)?;
                let tx = p.list(p.keyed(&mut toks, "tx")?)?;
                let rx = p.list(p.keyed(&mut toks, "cache")?)?;
                let k = p.num(p.keyed(&mut toks, "sub")?)?;
                let zf_targets = p.list(p.keyed(&mut toks, "zf")?)?;
                let Some(block) = blocks.last_mut() else {
                    return p.err("packet outside a block");
                };
                block.entries.push(BlockEntry {
                    receiver,
                    packet: PacketId {
                        subfile: SubfileId::new(file, tx, rx),
                        k,
                    },
                    zf_targets,
                });
            }
            Some("end") => ended = true,
            Some(other) => return p.err(format!("unknown record {other:?}")),
            None => unreachable!("blank lines are skipped"),
        }
        if let Some(extra) = toks.next() {
            return p.err(format!("trailing token {extra:?}"));
        }
    }

    if !ended {
        return p.err("missing end");
    }
    let (Some(config), Some(demand), Some(delta_hcb)) = (config, demand, delta_hcb) else {
        return p.err("missing config, demand or delta_hcb");
    };
    if declared != Some(blocks.len()) {
        return p.err(format!("declared {declared:?} blocks, found {}", blocks.len()));
    }
    Ok(Schedule {
        config,
        demand,
        delta_hcb,
        blocks,
    })
}
