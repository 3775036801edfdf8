use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{ChannelMatrix, PhyError, ZF_TOLERANCE};
use crate::scheduler::{Block, Schedule};

/// Cofactor null vector of `H[Z, T]`, unnormalized: component `k` is
/// `(-1)^k det(H[Z, T] without column k)`. Returns `[1]` when `|T| = 1`.
pub fn zf_vector_raw(h: &ChannelMatrix, tx: &[usize], zf: &[usize]) -> Result<Vec<Complex64>, PhyError> {
    if tx.is_empty() || zf.len() + 1 != tx.len() {
        return Err(PhyError::ShapeMismatch {
            tx: tx.len(),
            zf: zf.len(),
        });
    }
    h.check(zf, tx)?;
    if zf.is_empty() {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let sub = h.submatrix(zf, tx);
    Ok((0..tx.len())
        .map(|k| {
            let minor = sub.clone().remove_column(k).determinant();
            if k % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect())
}

/// Unit-norm zero-forcing vector for a packet sent by `tx` and nulled at `zf`.
pub fn zf_vector(h: &ChannelMatrix, tx: &[usize], zf: &[usize]) -> Result<Vec<Complex64>, PhyError> {
    let raw = zf_vector_raw(h, tx, zf)?;
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    // Hadamard: no cofactor exceeds the product of the row norms
    let scale: f64 = zf
        .iter()
        .map(|&j| tx.iter().map(|&i| h.get(j, i).norm_sqr()).sum::<f64>().sqrt())
        .product();
    if norm.is_nan() || norm <= ZF_TOLERANCE * scale {
        return Err(PhyError::DegenerateChannel {
            tx: tx.to_vec(),
            zf: zf.to_vec(),
        });
    }
    Ok(raw.into_iter().map(|c| c / norm).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockBeams {
    /// One unit-norm vector per entry, indexed like the entry's `T`.
    pub alphas: Vec<Vec<Complex64>>,
    /// Common amplitude so the busiest transmitter radiates exactly `P`.
    pub scale: f64,
}

impl BlockBeams {
    /// Gain of entry `p`'s symbol at receiver `j`, including the power scale.
    pub fn gain(&self, h: &ChannelMatrix, block: &Block, p: usize, j: usize) -> Complex64 {
        let tx = &block.entries[p].packet.subfile.tx;
        let sum: Complex64 = tx.iter().zip(&self.alphas[p]).map(|(&i, a)| h.get(j, i) * a).sum();
        sum * self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingPlan {
    pub blocks: Vec<BlockBeams>,
}

/// Transmitter set and zero-forced receivers.
type BeamKey<'a> = (&'a [usize], &'a [usize]);

/// Beamformers for every block. Each distinct `(T, Z)` pair is solved once.
pub fn plan_beams(h: &ChannelMatrix, s: &Schedule, power: f64) -> Result<BeamformingPlan, PhyError> {
    let mut keys: BTreeMap<BeamKey, usize> = BTreeMap::new();
    for e in s.blocks.iter().flat_map(|b| &b.entries) {
        let next = keys.len();
        keys.entry((&e.packet.subfile.tx, &e.zf_targets)).or_insert(next);
    }
    let mut ordered: Vec<(BeamKey, usize)> = keys.iter().map(|(k, &v)| (*k, v)).collect();
    ordered.sort_by_key(|&(_, v)| v);
    let solved: Vec<Vec<Complex64>> = ordered
        .par_iter()
        .map(|&((tx, zf), _)| zf_vector(h, tx, zf))
        .collect::<Result<_, _>>()?;

    let blocks = s
        .blocks
        .iter()
        .map(|b| {
            let alphas: Vec<Vec<Complex64>> = b
                .entries
                .iter()
                .map(|e| solved[keys[&(&e.packet.subfile.tx[..], &e.zf_targets[..])]].clone())
                .collect();
            let mut load: BTreeMap<usize, f64> = BTreeMap::new();
            for (e, a) in b.entries.iter().zip(&alphas) {
                for (&i, c) in e.packet.subfile.tx.iter().zip(a) {
                    *load.entry(i).or_insert(0.0) += c.norm_sqr();
                }
            }
            let peak = load.values().copied().fold(0.0, f64::max);
            let scale = if peak > 0.0 { (power / peak).sqrt() } else { 0.0 };
            BlockBeams { alphas, scale }
        })
        .collect();
    Ok(BeamformingPlan { blocks })
}
