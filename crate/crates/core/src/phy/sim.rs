use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{
    plan_beams, BlockBeams, ChannelMatrix, DecodeFailure, FailureReason, FailureRecord, PhyError, RESIDUAL_TOLERANCE,
};
use crate::model::NetworkConfig;
use crate::placement::PayloadSource;
use crate::scheduler::{Block, Schedule};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub noise_power: f64,
    /// Per-transmitter power budget `P`.
    pub power: f64,
    /// Symbol draws per block; ignored in payload mode.
    pub trials: usize,
    /// Drives symbols, noise and payload bytes.
    pub seed: u64,
    /// Turning this off leaves cached packets in the received signal.
    pub cancel_cached: bool,
    /// Send QPSK-modulated packet contents of this many bytes instead of
    /// random unit-modulus symbols.
    pub payload_bytes: Option<usize>,
    /// Return `Err(Decode)` on any failure instead of listing it.
    pub strict: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            noise_power: 0.0,
            power: 1.0,
            trials: 1,
            seed: 0,
            cancel_cached: true,
            payload_bytes: None,
            strict: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverOutcome {
    pub receiver: usize,
    /// `|g|` of the desired packet.
    pub desired_gain: f64,
    /// Uncancelled interference power over desired power, noise excluded.
    pub residual: f64,
    pub estimate: Complex64,
    pub error: f64,
}

/// Effective gains `g[m][p]`: entry `p`'s symbol as seen by member `m`.
fn block_gains(h: &ChannelMatrix, block: &Block, beams: &BlockBeams) -> Vec<Vec<Complex64>> {
    block
        .entries
        .iter()
        .map(|at| {
            (0..block.entries.len())
                .map(|p| beams.gain(h, block, p, at.receiver))
                .collect()
        })
        .collect()
}

fn decode(
    block: &Block,
    gains: &[Vec<Complex64>],
    symbols: &[Complex64],
    noise: &[Complex64],
    cancel_cached: bool,
) -> Vec<ReceiverOutcome> {
    block
        .entries
        .iter()
        .enumerate()
        .map(|(m, entry)| {
            let a = entry.receiver;
            let row = &gains[m];
            let mut y: Complex64 = row.iter().zip(symbols).map(|(g, x)| g * x).sum::<Complex64>() + noise[m];
            let mut leak = 0.0;
            for (p, other) in block.entries.iter().enumerate().filter(|&(p, _)| p != m) {
                if cancel_cached && other.packet.subfile.rx.contains(&a) {
                    y -= row[p] * symbols[p];
                } else {
                    leak += row[p].norm_sqr();
                }
            }
            let desired = row[m];
            let estimate = y / desired;
            ReceiverOutcome {
                receiver: a,
                desired_gain: desired.norm(),
                residual: leak / desired.norm_sqr(),
                estimate,
                error: (estimate - symbols[m]).norm(),
            }
        })
        .collect()
}

/// Sends one block: `symbols` and `noise` are indexed like `block.entries`.
pub fn simulate_block(
    h: &ChannelMatrix,
    block: &Block,
    beams: &BlockBeams,
    symbols: &[Complex64],
    noise: &[Complex64],
    cancel_cached: bool,
) -> Vec<ReceiverOutcome> {
    decode(block, &block_gains(h, block, beams), symbols, noise, cancel_cached)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockReceiverRecord {
    pub block: usize,
    pub receiver: usize,
    pub desired_gain: f64,
    pub residual: f64,
    pub mean_error: f64,
    pub max_error: f64,
    pub bit_errors: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub channel_seed: Option<u64>,
    pub noise_power: f64,
    /// Symbols per packet.
    pub symbols: usize,
    pub records: Vec<BlockReceiverRecord>,
    pub h: usize,
    pub total_packets: usize,
    pub packets_decoded: usize,
    pub max_residual: f64,
    pub min_gain: f64,
    pub mean_error: f64,
    pub max_error: f64,
    /// `packets_decoded / H`.
    pub dof_achieved: Option<Ratio<usize>>,
    /// (bit errors, bits sent) in payload mode.
    pub bit_errors: Option<(u64, u64)>,
    pub failures: Vec<FailureRecord>,
}

fn qpsk(byte: u8, slot: usize) -> Complex64 {
    let bits = byte >> (2 * slot);
    let re = if bits & 1 == 0 { 1.0 } else { -1.0 };
    let im = if bits & 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

fn qpsk_bit_errors(sent: Complex64, got: Complex64) -> u64 {
    u64::from((sent.re < 0.0) != (got.re < 0.0)) + u64::from((sent.im < 0.0) != (got.im < 0.0))
}

fn complex_gaussian<R: Rng>(rng: &mut R, power: f64) -> Complex64 {
    if power == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * (power / 2.0).sqrt()
}

fn classify(rec: &BlockReceiverRecord, noiseless: bool) -> Option<FailureReason> {
    if rec.desired_gain.is_nan() || rec.desired_gain <= RESIDUAL_TOLERANCE {
        Some(FailureReason::VanishingGain(rec.desired_gain))
    } else if rec.residual.is_nan() || rec.residual > RESIDUAL_TOLERANCE {
        Some(FailureReason::Residual(rec.residual))
    } else if noiseless && (rec.max_error.is_nan() || rec.max_error > RESIDUAL_TOLERANCE) {
        Some(FailureReason::DecodeError(rec.max_error))
    } else {
        None
    }
}

/// Runs every block of `s` over the channel `h`.
///
/// Randomness for block `b`, draw `t` comes from streams keyed by `(b, t)`,
/// so the result does not depend on how blocks are scheduled on threads.
pub fn simulate_schedule(
    cfg: &NetworkConfig,
    s: &Schedule,
    h: &ChannelMatrix,
    opts: &SimOptions,
) -> Result<SimulationReport, PhyError> {
    if s.config != *cfg {
        return Err(PhyError::ConfigMismatch {
            schedule: s.config.to_string(),
            sim: cfg.to_string(),
        });
    }
    if (h.k_r(), h.k_t()) != (cfg.k_r(), cfg.k_t()) {
        return Err(PhyError::BadChannel {
            expected: cfg.k_r() * cfg.k_t(),
            actual: h.k_r() * h.k_t(),
        });
    }
    let plan = plan_beams(h, s, opts.power)?;
    let payload = opts.payload_bytes.map(|bytes| PayloadSource::new(opts.seed, bytes));
    let draws = opts.payload_bytes.map_or(opts.trials, |bytes| 4 * bytes).max(1);

    let per_block: Vec<Vec<BlockReceiverRecord>> = s
        .blocks
        .par_iter()
        .zip(&plan.blocks)
        .enumerate()
        .map(|(b, (block, beams))| {
            let gains = block_gains(h, block, beams);
            let n = block.entries.len();
            let contents: Option<Vec<Vec<u8>>> = payload.as_ref().map(|src| {
                block
                    .entries
                    .iter()
                    .map(|e| src.packet_bytes(&e.packet.subfile, e.packet.k))
                    .collect()
            });
            let mut records: Vec<BlockReceiverRecord> = block
                .entries
                .iter()
                .map(|e| BlockReceiverRecord {
                    block: b,
                    receiver: e.receiver,
                    desired_gain: 0.0,
                    residual: 0.0,
                    mean_error: 0.0,
                    max_error: 0.0,
                    bit_errors: 0,
                })
                .collect();
            for t in 0..draws {
                let symbols: Vec<Complex64> = match &contents {
                    Some(bytes) => bytes.iter().map(|p| qpsk(p[t / 4], t % 4)).collect(),
                    None => {
                        let mut rng = seeds::rng(opts.seed, &[seeds::TAG_SYMBOLS, b as u64, t as u64]);
                        (0..n)
                            .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * TAU))
                            .collect()
                    }
                };
                let mut rng = seeds::rng(opts.seed, &[seeds::TAG_NOISE, b as u64, t as u64]);
                let noise: Vec<Complex64> = (0..n).map(|_| complex_gaussian(&mut rng, opts.noise_power)).collect();
                let outcomes = decode(block, &gains, &symbols, &noise, opts.cancel_cached);
                for (m, (rec, out)) in records.iter_mut().zip(&outcomes).enumerate() {
                    rec.desired_gain = out.desired_gain;
                    rec.residual = out.residual;
                    rec.mean_error += out.error / draws as f64;
                    rec.max_error = rec.max_error.max(out.error);
                    if contents.is_some() {
                        rec.bit_errors += qpsk_bit_errors(symbols[m], out.estimate);
                    }
                }
            }
            records
        })
        .collect();

    let records: Vec<BlockReceiverRecord> = per_block.into_iter().flatten().collect();
    let noiseless = opts.noise_power == 0.0;
    let failures: Vec<FailureRecord> = records
        .iter()
        .filter_map(|r| {
            classify(r, noiseless).map(|reason| FailureRecord {
                block: r.block,
                receiver: r.receiver,
                reason,
            })
        })
        .collect();
    if opts.strict && !failures.is_empty() {
        return Err(DecodeFailure { failures }.into());
    }

    let total_packets = s.total_packets();
    let packets_decoded = total_packets - failures.len();
    let count = records.len().max(1) as f64;
    let bits_sent = opts.payload_bytes.map(|bytes| total_packets as u64 * bytes as u64 * 8);
    Ok(SimulationReport {
        channel_seed: h.seed(),
        noise_power: opts.noise_power,
        symbols: draws,
        h: s.h(),
        total_packets,
        packets_decoded,
        max_residual: records.iter().map(|r| r.residual).fold(0.0, f64::max),
        min_gain: records.iter().map(|r| r.desired_gain).fold(f64::INFINITY, f64::min),
        mean_error: records.iter().map(|r| r.mean_error).sum::<f64>() / count,
        max_error: records.iter().map(|r| r.max_error).fold(0.0, f64::max),
        dof_achieved: (s.h() > 0).then(|| Ratio::new(packets_decoded, s.h())),
        bit_errors: bits_sent.map(|bits| (records.iter().map(|r| r.bit_errors).sum(), bits)),
        records,
        failures,
    })
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One machine-readable line: verdict, DoF and worst residual.
    pub fn verdict_line(&self) -> String {
        let dof = self.dof_achieved.map_or("-".to_string(), |d| d.to_string());
        format!(
            "verdict={} dof={} max_residual={:.6e} min_gain={:.6e} decoded={}/{}",
            if self.passed() { "pass" } else { "fail" },
            dof,
            self.max_residual,
            self.min_gain,
            self.packets_decoded,
            self.total_packets
        )
    }

    /// Per-receiver records as tab-separated rows, then the summary and
    /// verdict lines.
    pub fn write<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "block\treceiver\tdesired_gain\tresidual\tmean_error\tmax_error\tbit_errors"
        )?;
        for r in &self.records {
            writeln!(
                out,
                "{}\t{}\t{:.6e}\t{:.6e}\t{:.6e}\t{:.6e}\t{}",
                r.block, r.receiver, r.desired_gain, r.residual, r.mean_error, r.max_error, r.bit_errors
            )?;
        }
        write!(
            out,
            "# summary h={} packets={} symbols_per_packet={} noise_power={:e} mean_error={:.6e} max_error={:.6e}",
            self.h, self.total_packets, self.symbols, self.noise_power, self.mean_error, self.max_error
        )?;
        if let Some((errors, bits)) = self.bit_errors {
            write!(out, " bit_errors={errors}/{bits}")?;
        }
        writeln!(out)?;
        for f in &self.failures {
            writeln!(out, "# failure {f}")?;
        }
        writeln!(out, "# {}", self.verdict_line())
    }
}
