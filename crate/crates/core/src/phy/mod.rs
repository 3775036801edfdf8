//! One-shot linear physical layer.
//!
//! Every packet in a block is beamformed from its transmitter set with a
//! zero-forcing vector that nulls it at the receivers that neither want nor
//! cache it. Receivers subtract the packets they cache and divide by the
//! remaining desired gain.

mod channel;
mod sim;
mod zf;

use std::fmt;

use thiserror::Error;

pub use channel::{sample_channel, ChannelMatrix};
pub use sim::{simulate_block, simulate_schedule, BlockReceiverRecord, ReceiverOutcome, SimOptions, SimulationReport};
pub use zf::{plan_beams, zf_vector, zf_vector_raw, BeamformingPlan, BlockBeams};

pub use num_complex::Complex64;

/// Algebraic nulls.
pub const ZF_TOLERANCE: f64 = 1e-12;
/// End-to-end residuals and decode errors, relative to the desired signal.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhyError {
    #[error("zero-forcing needs |Z| = |T| - 1, got |T| = {tx}, |Z| = {zf}")]
    ShapeMismatch { tx: usize, zf: usize },
    #[error("node index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },
    #[error("degenerate channel: zero-forcing vector for T={tx:?}, Z={zf:?} vanishes")]
    DegenerateChannel { tx: Vec<usize>, zf: Vec<usize> },
    #[error("channel matrix needs {expected} finite gains, got {actual}")]
    BadChannel { expected: usize, actual: usize },
    #[error("schedule was built for {schedule}, simulation config is {sim}")]
    ConfigMismatch { schedule: String, sim: String },
    #[error(transparent)]
    Decode(#[from] DecodeFailure),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailureReason {
    /// Relative interference power left after cancellation.
    Residual(f64),
    /// Largest noiseless decode error.
    DecodeError(f64),
    /// Effective desired gain magnitude.
    VanishingGain(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureRecord {
    pub block: usize,
    pub receiver: usize,
    pub reason: FailureReason,
}

impl fmt::Display for FailureRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block {} Rx_{}: ", self.block, self.receiver)?;
        match self.reason {
            FailureReason::Residual(v) => write!(f, "residual {v:.3e}"),
            FailureReason::DecodeError(v) => write!(f, "decode error {v:.3e}"),
            FailureReason::VanishingGain(v) => write!(f, "desired gain {v:.3e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct DecodeFailure {
    pub failures: Vec<FailureRecord>,
}

impl fmt::Display for DecodeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} decode failure(s)", self.failures.len())?;
        if let Some(first) = self.failures.first() {
            write!(f, ", first at {first}")?;
        }
        Ok(())
    }
}
