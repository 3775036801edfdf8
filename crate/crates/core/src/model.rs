//! Network parameters, dimension partitions and demand vectors.
//!
//! A [`NetworkConfig`] is built from the five system parameters
//! `(K_T, K_R, N, M_T, M_R)` and carries the derived hypercube geometry:
//! `D_T = N/M_T` points per transmitter dimension, `t_T = K_T/D_T`
//! transmitter dimensions, and likewise `D_R`, `t_R` on the receiver side.

use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("parameter {0} must be a positive integer")]
    ZeroParameter(&'static str),
    #[error("{what} is not integral ({num}/{den})")]
    NonDivisible { what: &'static str, num: usize, den: usize },
    #[error("t_T/t_R = {t_t}/{t_r} is not an integer")]
    NonIntegerDelta { t_t: usize, t_r: usize },
    #[error("transmitters cannot hold the library: K_T*M_T = {cached} < N = {n}")]
    InsufficientTxMemory { cached: usize, n: usize },
    #[error("D_R = {d_r} is smaller than delta+1 = {}", delta + 1)]
    DimensionTooSmall { d_r: usize, delta: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DemandError {
    #[error("demand has {actual} entries, expected K_R = {expected}")]
    BadLength { expected: usize, actual: usize },
    #[error("receiver {receiver} requests file {file}, library has {n} files")]
    FileIndexOutOfRange { receiver: usize, file: usize, n: usize },
}

/// Validated system parameters plus the derived hypercube geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkConfig {
    k_t: usize,
    k_r: usize,
    n: usize,
    m_t: usize,
    m_r: usize,
    d_t: usize,
    d_r: usize,
    t_t: usize,
    t_r: usize,
    delta: usize,
    schedulable: bool,
}

/// Validates `(K_T, K_R, N, M_T, M_R)` and derives the dimension geometry.
///
/// Rejects configurations with `D_R < delta + 1`; use
/// [`NetworkConfig::placement_only`] to build those for placement and
/// analytics work.
pub fn derive_config(k_t: usize, k_r: usize, n: usize, m_t: usize, m_r: usize) -> Result<NetworkConfig, ConfigError> {
    let cfg = NetworkConfig::placement_only(k_t, k_r, n, m_t, m_r)?;
    if !cfg.schedulable {
        return Err(ConfigError::DimensionTooSmall {
            d_r: cfg.d_r,
            delta: cfg.delta,
        });
    }
    Ok(cfg)
}

fn exact_div(what: &'static str, num: usize, den: usize) -> Result<usize, ConfigError> {
    if !num.is_multiple_of(den) {
        return Err(ConfigError::NonDivisible { what, num, den });
    }
    Ok(num / den)
}

impl NetworkConfig {
    /// Like [`derive_config`] but admits `D_R < delta + 1`. The result
    /// supports placement and analytics; scheduling refuses it.
    pub fn placement_only(k_t: usize, k_r: usize, n: usize, m_t: usize, m_r: usize) -> Result<Self, ConfigError> {
        for (name, v) in [("K_T", k_t), ("K_R", k_r), ("N", n), ("M_T", m_t), ("M_R", m_r)] {
            if v == 0 {
                return Err(ConfigError::ZeroParameter(name));
            }
        }
        let d_t = exact_div("N/M_T", n, m_t)?;
        let d_r = exact_div("N/M_R", n, m_r)?;
        if k_t * m_t < n {
            return Err(ConfigError::InsufficientTxMemory { cached: k_t * m_t, n });
        }
        let t_t = exact_div("K_T/D_T", k_t, d_t)?;
        let t_r = exact_div("K_R/D_R", k_r, d_r)?;
        if t_t % t_r != 0 {
            return Err(ConfigError::NonIntegerDelta { t_t, t_r });
        }
        let delta = t_t / t_r;
        debug_assert_eq!((k_t * m_t + k_r * m_r) % n, 0);
        debug_assert_eq!(t_t + t_r, (k_t * m_t + k_r * m_r) / n);
        Ok(Self {
            k_t,
            k_r,
            n,
            m_t,
            m_r,
            d_t,
            d_r,
            t_t,
            t_r,
            delta,
            schedulable: d_r > delta,
        })
    }

    /// Builds the smallest-library config with the given dimension geometry:
    /// `N = lcm(D_T, D_R)`, `M_T = N/D_T`, `M_R = N/D_R`.
    pub fn from_dimensions(d_t: usize, t_t: usize, d_r: usize, t_r: usize) -> Result<Self, ConfigError> {
        if d_t == 0 || d_r == 0 {
            return Err(ConfigError::ZeroParameter(if d_t == 0 { "D_T" } else { "D_R" }));
        }
        let n = num_integer::lcm(d_t, d_r);
        Self::placement_only(d_t * t_t, d_r * t_r, n, n / d_t, n / d_r).and_then(|cfg| {
            if cfg.schedulable {
                Ok(cfg)
            } else {
                Err(ConfigError::DimensionTooSmall {
                    d_r: cfg.d_r,
                    delta: cfg.delta,
                })
            }
        })
    }

    pub fn k_t(&self) -> usize {
        self.k_t
    }
    pub fn k_r(&self) -> usize {
        self.k_r
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m_t(&self) -> usize {
        self.m_t
    }
    pub fn m_r(&self) -> usize {
        self.m_r
    }
    pub fn d_t(&self) -> usize {
        self.d_t
    }
    pub fn d_r(&self) -> usize {
        self.d_r
    }
    pub fn t_t(&self) -> usize {
        self.t_t
    }
    pub fn t_r(&self) -> usize {
        self.t_r
    }
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Whether `D_R >= delta + 1`, i.e. the delivery scheduler applies.
    pub fn is_schedulable(&self) -> bool {
        self.schedulable
    }

    /// Number of receivers served per block, `t_T + t_R`.
    pub fn block_size(&self) -> usize {
        self.t_t + self.t_r
    }

    /// `D_T^{t_T} * D_R^{t_R}`: subfiles per library file.
    pub fn subfiles_per_file(&self) -> usize {
        self.d_t.pow(self.t_t as u32) * self.d_r.pow(self.t_r as u32)
    }

    /// Subfiles of one file that a receiver does not cache:
    /// `D_T^{t_T} * (D_R - 1) * D_R^{t_R - 1}`.
    pub fn needed_subfiles_per_receiver(&self) -> usize {
        self.d_t.pow(self.t_t as u32) * (self.d_r - 1) * self.d_r.pow(self.t_r as u32 - 1)
    }
}

impl fmt::Display for NetworkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k_t={} k_r={} n={} m_t={} m_r={}",
            self.k_t, self.k_r, self.n, self.m_t, self.m_r
        )
    }
}

/// The canonical floor-based grouping of nodes into dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionPartition {
    pub tx_dims: Vec<Vec<usize>>,
    pub rx_dims: Vec<Vec<usize>>,
    d_t: usize,
    d_r: usize,
}

pub fn partition_dimensions(cfg: &NetworkConfig) -> DimensionPartition {
    let group = |count: usize, size: usize| -> Vec<Vec<usize>> {
        (0..count).map(|i| (i * size..(i + 1) * size).collect()).collect()
    };
    DimensionPartition {
        tx_dims: group(cfg.t_t, cfg.d_t),
        rx_dims: group(cfg.t_r, cfg.d_r),
        d_t: cfg.d_t,
        d_r: cfg.d_r,
    }
}

impl DimensionPartition {
    pub fn tx_dim_of(&self, tx: usize) -> usize {
        tx / self.d_t
    }

    pub fn rx_dim_of(&self, rx: usize) -> usize {
        rx / self.d_r
    }
}

/// File requested by each receiver, validated against a config.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

pub fn validate_demand(cfg: &NetworkConfig, files: &[usize]) -> Result<DemandVector, DemandError> {
    if files.len() != cfg.k_r {
        return Err(DemandError::BadLength {
            expected: cfg.k_r,
            actual: files.len(),
        });
    }
    if let Some((receiver, &file)) = files.iter().enumerate().find(|(_, &f)| f >= cfg.n) {
        return Err(DemandError::FileIndexOutOfRange {
            receiver,
            file,
            n: cfg.n,
        });
    }
    Ok(DemandVector(files.to_vec()))
}

impl DemandVector {
    /// Receiver `j` requests file `j mod N`; all-distinct when `N >= K_R`.
    pub fn cyclic(cfg: &NetworkConfig) -> Self {
        Self((0..cfg.k_r).map(|j| j % cfg.n).collect())
    }

    /// Uniform random demand. When `N >= K_R` the files are distinct.
    pub fn random<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> Self {
        if cfg.n >= cfg.k_r {
            let picked = rand::seq::index::sample(rng, cfg.n, cfg.k_r);
            Self(picked.into_iter().collect())
        } else {
            Self((0..cfg.k_r).map(|_| rng.random_range(0..cfg.n)).collect())
        }
    }

    pub fn file(&self, receiver: usize) -> usize {
        self.0[receiver]
    }

    pub fn files(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_two_geometry() {
        let cfg = derive_config(4, 4, 4, 2, 2).unwrap();
        assert_eq!(
            (cfg.d_t(), cfg.d_r(), cfg.t_t(), cfg.t_r(), cfg.delta()),
            (2, 2, 2, 2, 1)
        );
        assert_eq!(cfg.block_size(), 4);
    }

    #[test]
    fn degenerate_dimension_is_rejected_but_placeable() {
        assert_eq!(
            derive_config(2, 2, 2, 2, 2),
            Err(ConfigError::DimensionTooSmall { d_r: 1, delta: 1 })
        );
        let cfg = NetworkConfig::placement_only(2, 2, 2, 2, 2).unwrap();
        assert_eq!(
            (cfg.d_t(), cfg.d_r(), cfg.t_t(), cfg.t_r(), cfg.delta()),
            (1, 1, 2, 2, 1)
        );
        assert!(!cfg.is_schedulable());
    }

    #[test]
    fn delta_two_geometry() {
        let cfg = derive_config(12, 6, 6, 2, 2).unwrap();
        assert_eq!(
            (cfg.d_t(), cfg.d_r(), cfg.t_t(), cfg.t_r(), cfg.delta()),
            (3, 3, 4, 2, 2)
        );
        assert_eq!(cfg.t_t() + cfg.t_r(), (12 * 2 + 6 * 2) / 6);
    }

    #[test]
    fn named_errors() {
        assert!(matches!(
            derive_config(4, 4, 4, 3, 2),
            Err(ConfigError::NonDivisible { what: "N/M_T", .. })
        ));
        assert!(matches!(
            derive_config(4, 4, 4, 2, 3),
            Err(ConfigError::NonDivisible { what: "N/M_R", .. })
        ));
        assert!(matches!(
            derive_config(5, 4, 4, 2, 2),
            Err(ConfigError::NonDivisible { what: "K_T/D_T", .. })
        ));
        assert!(matches!(
            derive_config(4, 5, 4, 2, 2),
            Err(ConfigError::NonDivisible { what: "K_R/D_R", .. })
        ));
        assert_eq!(
            derive_config(1, 4, 4, 2, 2),
            Err(ConfigError::InsufficientTxMemory { cached: 2, n: 4 })
        );
        // t_T = 2, t_R = 4
        assert_eq!(
            derive_config(4, 8, 4, 2, 2),
            Err(ConfigError::NonIntegerDelta { t_t: 2, t_r: 4 })
        );
        assert_eq!(derive_config(0, 4, 4, 2, 2), Err(ConfigError::ZeroParameter("K_T")));
    }

    #[test]
    fn floor_partition() {
        let p = partition_dimensions(&derive_config(4, 4, 4, 2, 2).unwrap());
        assert_eq!(p.tx_dims, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(p.rx_dims, vec![vec![0, 1], vec![2, 3]]);

        let p = partition_dimensions(&derive_config(12, 6, 6, 2, 2).unwrap());
        assert_eq!(p.rx_dims, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(p.tx_dims.len(), 4);
        assert_eq!(p.tx_dim_of(7), 2);

        // t_T = 1: one dimension holding every transmitter
        let p = partition_dimensions(&derive_config(3, 3, 3, 1, 1).unwrap());
        assert_eq!(p.tx_dims, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn demand_validation() {
        let cfg = derive_config(4, 4, 4, 2, 2).unwrap();
        assert!(validate_demand(&cfg, &[0, 1, 2, 3]).is_ok());
        assert!(validate_demand(&cfg, &[0, 0, 0, 0]).is_ok());
        assert_eq!(
            validate_demand(&cfg, &[0, 1, 2]),
            Err(DemandError::BadLength { expected: 4, actual: 3 })
        );
        assert_eq!(
            validate_demand(&cfg, &[0, 1, 4, 3]),
            Err(DemandError::FileIndexOutOfRange {
                receiver: 2,
                file: 4,
                n: 4
            })
        );
    }

    #[test]
    fn random_demand_is_distinct_when_possible() {
        use rand::SeedableRng;
        let cfg = derive_config(4, 4, 4, 2, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d = DemandVector::random(&cfg, &mut rng);
            let mut files = d.files().to_vec();
            files.sort_unstable();
            assert_eq!(files, vec![0, 1, 2, 3]);
        }
    }
}
