use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::PhyError;
use crate::model::NetworkConfig;
use crate::seeds;

/// `K_R x K_T` gains; `get(j, i)` is the gain from Tx_i to Rx_j.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    k_r: usize,
    k_t: usize,
    seed: Option<u64>,
    gains: Vec<Complex64>,
}

impl ChannelMatrix {
    /// Row-major gains, one row per receiver.
    pub fn from_gains(k_r: usize, k_t: usize, gains: Vec<Complex64>) -> Result<Self, PhyError> {
        if gains.len() != k_r * k_t || gains.iter().any(|g| !g.is_finite()) {
            return Err(PhyError::BadChannel {
                expected: k_r * k_t,
                actual: gains.iter().filter(|g| g.is_finite()).count(),
            });
        }
        Ok(Self {
            k_r,
            k_t,
            seed: None,
            gains,
        })
    }

    pub fn get(&self, j: usize, i: usize) -> Complex64 {
        self.gains[j * self.k_t + i]
    }

    pub fn k_r(&self) -> usize {
        self.k_r
    }

    pub fn k_t(&self) -> usize {
        self.k_t
    }

    /// Seed it was sampled from; `None` for explicit gains.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub(crate) fn check(&self, rows: &[usize], cols: &[usize]) -> Result<(), PhyError> {
        if let Some(&index) = rows.iter().find(|&&j| j >= self.k_r) {
            return Err(PhyError::OutOfRange { index, limit: self.k_r });
        }
        if let Some(&index) = cols.iter().find(|&&i| i >= self.k_t) {
            return Err(PhyError::OutOfRange { index, limit: self.k_t });
        }
        Ok(())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]))
    }
}

/// I.i.d. `CN(0, 1)` gains from the channel stream of `seed`.
pub fn sample_channel(cfg: &NetworkConfig, seed: u64) -> ChannelMatrix {
    let mut rng = seeds::rng(seed, &[seeds::TAG_CHANNEL]);
    let n = cfg.k_r() * cfg.k_t();
    let gains = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    ChannelMatrix {
        k_r: cfg.k_r(),
        k_t: cfg.k_t(),
        seed: Some(seed),
        gains,
    }
}
