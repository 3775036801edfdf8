//! Hypercube cache placement.
//!
//! Every file is split into `D_T^{t_T} * D_R^{t_R}` subfiles, one per choice
//! of a transmitter set `T` (one transmitter from each transmitter dimension)
//! and a receiver set `R` (one receiver from each receiver dimension).
//! Transmitter `i` caches every subfile with `i ∈ T`, receiver `j` every
//! subfile with `j ∈ R`. The D2D variant places lattice coordinates on
//! users the same way with a single node class.

use std::fmt;
use std::io::{self, Write};

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::RngCore;
use thiserror::Error;

use crate::counting::binomial;
use crate::model::{DemandVector, DimensionPartition, NetworkConfig};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Tx(usize),
    Rx(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Tx(i) => write!(f, "Tx_{i}"),
            Node::Rx(j) => write!(f, "Rx_{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlacementError {
    #[error("{node} holds {load} files but its cache size is {capacity}")]
    MemoryViolation {
        node: Node,
        load: Ratio<u64>,
        capacity: u64,
    },
    #[error("{what} is not integral ({num}/{den})")]
    NonDivisible { what: &'static str, num: usize, den: usize },
}

/// A subfile `W_{file, T, R}`. `tx` and `rx` list one node per dimension in
/// dimension order, which is also ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubfileId {
    pub file: usize,
    pub tx: Vec<usize>,
    pub rx: Vec<usize>,
}

impl SubfileId {
    pub fn new(file: usize, tx: Vec<usize>, rx: Vec<usize>) -> Self {
        Self { file, tx, rx }
    }

    pub fn cached_by_rx(&self, j: usize) -> bool {
        self.rx.contains(&j)
    }

    pub fn cached_by_tx(&self, i: usize) -> bool {
        self.tx.contains(&i)
    }

    /// Whether `tx` and `rx` take exactly one node from every dimension.
    pub fn is_well_formed(&self, cfg: &NetworkConfig) -> bool {
        one_per_dimension(&self.tx, cfg.d_t(), cfg.t_t())
            && one_per_dimension(&self.rx, cfg.d_r(), cfg.t_r())
            && self.file < cfg.n()
    }
}

fn one_per_dimension(nodes: &[usize], size: usize, dims: usize) -> bool {
    nodes.len() == dims && nodes.iter().enumerate().all(|(i, &v)| v / size == i)
}

fn fmt_set(f: &mut fmt::Formatter<'_>, nodes: &[usize]) -> fmt::Result {
    for (i, v) in nodes.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for SubfileId {
    /// `W<file>[T|R]`, e.g. `W0[0,2|1,2]` for `A_{02,12}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}[", self.file)?;
        fmt_set(f, &self.tx)?;
        f.write_str("|")?;
        fmt_set(f, &self.rx)?;
        f.write_str("]")
    }
}

/// Lexicographic walk over the cartesian product of `dims`.
pub(crate) fn product(dims: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(dims.len())];
    for dim in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                dim.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

/// Result of [`place_hypercube`]. Subfiles are stored once in canonical
/// `(file, T, R)` order; node caches index into that list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementMap {
    subfiles: Vec<SubfileId>,
    tx_cache: Vec<Vec<usize>>,
    rx_cache: Vec<Vec<usize>>,
    subfiles_per_file: usize,
}

pub fn place_hypercube(cfg: &NetworkConfig, dims: &DimensionPartition) -> PlacementMap {
    let tx_sets = product(&dims.tx_dims);
    let rx_sets = product(&dims.rx_dims);
    let per_file = tx_sets.len() * rx_sets.len();
    debug_assert_eq!(per_file, cfg.subfiles_per_file());

    let mut subfiles = Vec::with_capacity(cfg.n() * per_file);
    let mut tx_cache = vec![Vec::new(); cfg.k_t()];
    let mut rx_cache = vec![Vec::new(); cfg.k_r()];
    for file in 0..cfg.n() {
        for t in &tx_sets {
            for r in &rx_sets {
                let idx = subfiles.len();
                t.iter().for_each(|&i| tx_cache[i].push(idx));
                r.iter().for_each(|&j| rx_cache[j].push(idx));
                subfiles.push(SubfileId::new(file, t.clone(), r.clone()));
            }
        }
    }
    PlacementMap {
        subfiles,
        tx_cache,
        rx_cache,
        subfiles_per_file: per_file,
    }
}

impl PlacementMap {
    pub fn subfiles_per_file(&self) -> usize {
        self.subfiles_per_file
    }

    /// All subfiles of the library in canonical order.
    pub fn subfiles(&self) -> &[SubfileId] {
        &self.subfiles
    }

    /// Canonical-order subfiles of one file.
    pub fn file_subfiles(&self, file: usize) -> &[SubfileId] {
        let start = file * self.subfiles_per_file;
        &self.subfiles[start..start + self.subfiles_per_file]
    }

    pub fn tx_cache(&self, i: usize) -> impl Iterator<Item = &SubfileId> + '_ {
        self.tx_cache[i].iter().map(move |&k| &self.subfiles[k])
    }

    pub fn rx_cache(&self, j: usize) -> impl Iterator<Item = &SubfileId> + '_ {
        self.rx_cache[j].iter().map(move |&k| &self.subfiles[k])
    }

    pub fn tx_cache_len(&self, i: usize) -> usize {
        self.tx_cache[i].len()
    }

    pub fn rx_cache_len(&self, j: usize) -> usize {
        self.rx_cache[j].len()
    }

    pub fn num_tx(&self) -> usize {
        self.tx_cache.len()
    }

    pub fn num_rx(&self) -> usize {
        self.rx_cache.len()
    }

    /// Nodes holding a subfile, found by scanning the caches.
    pub fn holders(&self, subfile: &SubfileId) -> (Vec<usize>, Vec<usize>) {
        let Ok(idx) = self.subfiles.binary_search(subfile) else {
            return (Vec::new(), Vec::new());
        };
        let scan = |caches: &[Vec<usize>]| {
            caches
                .iter()
                .enumerate()
                .filter(|(_, c)| c.binary_search(&idx).is_ok())
                .map(|(node, _)| node)
                .collect()
        };
        (scan(&self.tx_cache), scan(&self.rx_cache))
    }

    /// One tab-separated record per subfile: file, T, R, caching
    /// transmitters, caching receivers.
    pub fn write_table<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let mut tx_of = vec![Vec::new(); self.subfiles.len()];
        let mut rx_of = vec![Vec::new(); self.subfiles.len()];
        for (i, cache) in self.tx_cache.iter().enumerate() {
            cache.iter().for_each(|&k| tx_of[k].push(i));
        }
        for (j, cache) in self.rx_cache.iter().enumerate() {
            cache.iter().for_each(|&k| rx_of[k].push(j));
        }
        writeln!(out, "file\ttx_set\trx_set\tcaching_tx\tcaching_rx")?;
        for (k, s) in self.subfiles.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                s.file,
                join(&s.tx),
                join(&s.rx),
                join(&tx_of[k]),
                join(&rx_of[k])
            )?;
        }
        Ok(())
    }
}

pub(crate) fn join(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Per-node cache loads in units of files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryReport {
    pub tx_loads: Vec<Ratio<u64>>,
    pub rx_loads: Vec<Ratio<u64>>,
}

/// Checks that every transmitter holds exactly `M_T` files worth of packets
/// and every receiver `M_R`, in exact rational arithmetic.
pub fn verify_memory(cfg: &NetworkConfig, pm: &PlacementMap) -> Result<MemoryReport, PlacementError> {
    let per_file = pm.subfiles_per_file as u64;
    let check = |len: usize, capacity: usize, node: Node| {
        // subfiles * (F / per_file) packets against capacity * F packets
        let load = Ratio::new(len as u64, per_file);
        if load != Ratio::from_integer(capacity as u64) {
            return Err(PlacementError::MemoryViolation {
                node,
                load,
                capacity: capacity as u64,
            });
        }
        Ok(load)
    };
    let tx_loads = (0..pm.num_tx())
        .map(|i| check(pm.tx_cache[i].len(), cfg.m_t(), Node::Tx(i)))
        .collect::<Result<_, _>>()?;
    let rx_loads = (0..pm.num_rx())
        .map(|j| check(pm.rx_cache[j].len(), cfg.m_r(), Node::Rx(j)))
        .collect::<Result<_, _>>()?;
    Ok(MemoryReport { tx_loads, rx_loads })
}

/// Subfiles of `d_j` that receiver `j` does not cache, in canonical order.
pub fn needed_subfiles(pm: &PlacementMap, demand: &DemandVector, j: usize) -> Vec<SubfileId> {
    pm.file_subfiles(demand.file(j))
        .iter()
        .filter(|s| !s.cached_by_rx(j))
        .cloned()
        .collect()
}

/// Subfiles per file of the baseline scheme: `C(K_T, t_T) * C(K_R, t_R)`.
pub fn nma_subfile_count(cfg: &NetworkConfig) -> BigUint {
    binomial(cfg.k_t(), cfg.t_t()) * binomial(cfg.k_r(), cfg.t_r())
}

/// D2D hypercube placement: each file is split into `q^t` lattice points
/// with `q = N/M`, and user `u` caches the hyperplane `l_{u/q} = u mod q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D2dPlacementMap {
    pub users: usize,
    pub files: usize,
    /// Lattice points per edge, `N/M`.
    pub q: usize,
    /// Dimensions, `KM/N`.
    pub t: usize,
    user_coords: Vec<Vec<Vec<usize>>>,
}

pub fn place_d2d(k: usize, n: usize, m: usize) -> Result<D2dPlacementMap, PlacementError> {
    if k == 0 || n == 0 || m == 0 {
        return Err(PlacementError::NonDivisible {
            what: "K*M/N",
            num: k * m,
            den: n,
        });
    }
    if !(k * m).is_multiple_of(n) {
        return Err(PlacementError::NonDivisible {
            what: "K*M/N",
            num: k * m,
            den: n,
        });
    }
    if !n.is_multiple_of(m) {
        return Err(PlacementError::NonDivisible {
            what: "N/M",
            num: n,
            den: m,
        });
    }
    let t = k * m / n;
    let q = n / m;
    if k != t * q {
        return Err(PlacementError::NonDivisible {
            what: "K/(N/M)",
            num: k,
            den: q,
        });
    }
    let lattice = product(&vec![(0..q).collect::<Vec<_>>(); t]);
    let user_coords = (0..k)
        .map(|u| {
            let (dim, level) = (u / q, u % q);
            lattice.iter().filter(|c| c[dim] == level).cloned().collect()
        })
        .collect();
    Ok(D2dPlacementMap {
        users: k,
        files: n,
        q,
        t,
        user_coords,
    })
}

impl D2dPlacementMap {
    /// Lattice points per file, `q^t`.
    pub fn packets_per_file(&self) -> usize {
        self.q.pow(self.t as u32)
    }

    /// Coordinates user `u` caches from each file.
    pub fn user_coords(&self, u: usize) -> &[Vec<usize>] {
        &self.user_coords[u]
    }

    /// All `(file, coordinate)` pairs user `u` caches.
    pub fn user_cache(&self, u: usize) -> impl Iterator<Item = (usize, &[usize])> + '_ {
        (0..self.files).flat_map(move |f| self.user_coords[u].iter().map(move |c| (f, c.as_slice())))
    }

    /// Users caching a coordinate, one per dimension.
    pub fn caching_users(&self, coord: &[usize]) -> Vec<usize> {
        coord
            .iter()
            .enumerate()
            .map(|(dim, &level)| dim * self.q + level)
            .collect()
    }

    pub fn write_table<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "user\tdimension\tlevel\tcoordinates_per_file\tcached_subfiles")?;
        for u in 0..self.users {
            writeln!(
                out,
                "{u}\t{}\t{}\t{}\t{}",
                u / self.q,
                u % self.q,
                self.user_coords[u].len(),
                self.user_coords[u].len() * self.files
            )?;
        }
        Ok(())
    }
}

/// Deterministic pseudo-random payload bytes for packets, for end-to-end
/// bit-exact delivery checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadSource {
    pub seed: u64,
    pub bytes_per_packet: usize,
}

impl PayloadSource {
    pub fn new(seed: u64, bytes_per_packet: usize) -> Self {
        Self { seed, bytes_per_packet }
    }

    /// Bytes of subpacket `k` of `subfile`; identical for every receiver.
    pub fn packet_bytes(&self, subfile: &SubfileId, k: usize) -> Vec<u8> {
        let mut words = Vec::with_capacity(3 + subfile.tx.len() + subfile.rx.len());
        words.push(seeds::TAG_PAYLOAD);
        words.push(subfile.file as u64);
        words.extend(subfile.tx.iter().map(|&v| v as u64));
        words.push(u64::MAX);
        words.extend(subfile.rx.iter().map(|&v| v as u64));
        words.push(k as u64);
        let mut rng = seeds::rng(self.seed, &words);
        let mut buf = vec![0u8; self.bytes_per_packet];
        rng.fill_bytes(&mut buf);
        buf
    }
}
