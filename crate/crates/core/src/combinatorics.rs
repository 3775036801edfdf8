//! Hypercube permutations and their circular arrangements.
//!
//! `D*t` points are split into `t` dimensions of `D` points; with canonical
//! labels, point `u` belongs to dimension `u / D`. A sequence of all points
//! is a hypercube permutation when any two points of the same dimension sit
//! a nonzero multiple of `t` positions apart. Equivalently, the dimension of
//! the point at position `p` depends only on `p mod t`, which is the form
//! checked here. A circular arrangement is a hypercube permutation up to
//! rotation; the representative puts the smallest label at position 0.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("sequence has {actual} labels, expected {expected}")]
    BadLength { expected: usize, actual: usize },
    #[error("label {0} appears more than once")]
    DuplicateLabel(usize),
    #[error("label {label} is outside [0, {points})")]
    LabelOutOfRange { label: usize, points: usize },
    #[error("{points} points exceed the enumeration cap of {cap}")]
    TooLarge { points: usize, cap: usize },
    #[error("dimensions must be non-empty and of equal size")]
    UnevenDimensions,
    #[error("infeasible window: {0}")]
    InfeasibleWindow(String),
}

/// Limits for exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap {
    /// Largest `D*t` accepted.
    pub max_points: usize,
    /// Largest number of sequences materialized.
    pub max_sequences: u128,
}

impl Default for EnumerationCap {
    fn default() -> Self {
        Self {
            max_points: 12,
            max_sequences: 4_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HypercubePermutation {
    pub seq: Vec<usize>,
    pub d: usize,
    pub t: usize,
}

/// A rotation class of hypercube permutations, stored by its representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircularArrangement {
    pub seq: Vec<usize>,
}

impl CircularArrangement {
    /// Rotates `seq` so that its smallest label comes first.
    pub fn from_rotation(seq: &[usize]) -> Self {
        let start = seq.iter().enumerate().min_by_key(|(_, &v)| v).map_or(0, |(i, _)| i);
        let mut out = Vec::with_capacity(seq.len());
        out.extend_from_slice(&seq[start..]);
        out.extend_from_slice(&seq[..start]);
        Self { seq: out }
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn position(&self, label: usize) -> Option<usize> {
        self.seq.iter().position(|&v| v == label)
    }

    /// The `width` labels that follow position `pos`, wrapping around.
    pub fn successors(&self, pos: usize, width: usize) -> impl Iterator<Item = usize> + '_ {
        let len = self.seq.len();
        (1..=width).map(move |i| self.seq[(pos + i) % len])
    }
}

fn check_labels(seq: &[usize], points: usize) -> Result<(), PermutationError> {
    if seq.len() != points {
        return Err(PermutationError::BadLength {
            expected: points,
            actual: seq.len(),
        });
    }
    let mut seen = vec![false; points];
    for &label in seq {
        if label >= points {
            return Err(PermutationError::LabelOutOfRange { label, points });
        }
        if std::mem::replace(&mut seen[label], true) {
            return Err(PermutationError::DuplicateLabel(label));
        }
    }
    Ok(())
}

/// Checks the hypercube condition on a sequence of canonical labels.
///
/// The circular form measures distances around the table; since the length
/// `D*t` is a multiple of `t`, wrap-around distances are multiples of `t`
/// exactly when the straight ones are, so both forms reduce to the same
/// residue-class test.
pub fn is_hypercube_permutation(seq: &[usize], d: usize, t: usize, circular: bool) -> Result<bool, PermutationError> {
    let _ = circular;
    if d == 0 || t == 0 {
        return Err(PermutationError::BadLength {
            expected: d * t,
            actual: seq.len(),
        });
    }
    check_labels(seq, d * t)?;
    let mut residue_dim = vec![usize::MAX; t];
    for (p, &label) in seq.iter().enumerate() {
        let dim = label / d;
        let slot = &mut residue_dim[p % t];
        if *slot == usize::MAX {
            *slot = dim;
        } else if *slot != dim {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed-form count of linear hypercube permutations, `t! * (D!)^t`.
pub fn linear_count(d: usize, t: usize) -> u128 {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    fact(t) * fact(d).pow(t as u32)
}

/// Closed-form count of circular arrangements, `t! * (D!)^t / (D*t)`.
pub fn circular_count(d: usize, t: usize) -> u128 {
    linear_count(d, t) / (d * t) as u128
}

fn check_cap(d: usize, t: usize, count: u128, cap: EnumerationCap) -> Result<(), PermutationError> {
    let points = d * t;
    if points > cap.max_points || count > cap.max_sequences {
        return Err(PermutationError::TooLarge {
            points,
            cap: cap.max_points,
        });
    }
    Ok(())
}

struct Walker<'a, F: FnMut(&[usize])> {
    d: usize,
    t: usize,
    seq: Vec<usize>,
    used: Vec<bool>,
    residue_dim: Vec<Option<usize>>,
    dim_taken: Vec<bool>,
    visit: &'a mut F,
}

impl<F: FnMut(&[usize])> Walker<'_, F> {
    fn step(&mut self) {
        let p = self.seq.len();
        if p == self.d * self.t {
            (self.visit)(&self.seq);
            return;
        }
        let r = p % self.t;
        for label in 0..self.d * self.t {
            if self.used[label] {
                continue;
            }
            let dim = label / self.d;
            let fresh = match self.residue_dim[r] {
                Some(assigned) if assigned != dim => continue,
                Some(_) => false,
                None if self.dim_taken[dim] => continue,
                None => true,
            };
            if fresh {
                self.residue_dim[r] = Some(dim);
                self.dim_taken[dim] = true;
            }
            self.used[label] = true;
            self.seq.push(label);
            self.step();
            self.seq.pop();
            self.used[label] = false;
            if fresh {
                self.residue_dim[r] = None;
                self.dim_taken[dim] = false;
            }
        }
    }
}

/// Visits hypercube permutations in lexicographic order; with `first` set,
/// only those starting with that label.
fn walk<F: FnMut(&[usize])>(d: usize, t: usize, first: Option<usize>, visit: &mut F) {
    let mut w = Walker {
        d,
        t,
        seq: Vec::with_capacity(d * t),
        used: vec![false; d * t],
        residue_dim: vec![None; t],
        dim_taken: vec![false; t],
        visit,
    };
    match first {
        Some(label) => {
            let dim = label / d;
            w.used[label] = true;
            w.residue_dim[0] = Some(dim);
            w.dim_taken[dim] = true;
            w.seq.push(label);
            w.step();
        }
        None => w.step(),
    }
}

pub fn enumerate_hypercube_permutations(d: usize, t: usize) -> Result<Vec<HypercubePermutation>, PermutationError> {
    enumerate_hypercube_permutations_capped(d, t, EnumerationCap::default())
}

pub fn enumerate_hypercube_permutations_capped(
    d: usize,
    t: usize,
    cap: EnumerationCap,
) -> Result<Vec<HypercubePermutation>, PermutationError> {
    check_cap(d, t, linear_count(d, t), cap)?;
    let mut out = Vec::new();
    if d * t > 0 {
        walk(d, t, None, &mut |s| {
            out.push(HypercubePermutation { seq: s.to_vec(), d, t })
        });
    }
    Ok(out)
}

pub fn enumerate_circular_hcb(d: usize, t: usize) -> Result<Vec<CircularArrangement>, PermutationError> {
    enumerate_circular_hcb_capped(d, t, EnumerationCap::default())
}

pub fn enumerate_circular_hcb_capped(
    d: usize,
    t: usize,
    cap: EnumerationCap,
) -> Result<Vec<CircularArrangement>, PermutationError> {
    check_cap(d, t, circular_count(d, t), cap)?;
    let mut out = Vec::new();
    if d * t > 0 {
        walk(d, t, Some(0), &mut |s| {
            out.push(CircularArrangement { seq: s.to_vec() })
        });
    }
    Ok(out)
}

/// Circular hypercube arrangements of arbitrary labels grouped into
/// equal-size dimensions, in lexicographic order of representatives.
pub fn circular_arrangements_of(dims: &[Vec<usize>]) -> Result<Vec<CircularArrangement>, PermutationError> {
    let t = dims.len();
    let d = dims.first().map_or(0, Vec::len);
    if d == 0 || dims.iter().any(|dim| dim.len() != d) {
        return Err(PermutationError::UnevenDimensions);
    }
    let labels: Vec<usize> = dims.iter().flatten().copied().collect();
    if let Some(dup) = first_duplicate(&labels) {
        return Err(PermutationError::DuplicateLabel(dup));
    }
    let mut out: Vec<CircularArrangement> = enumerate_circular_hcb(d, t)?
        .into_iter()
        .map(|c| {
            let mapped: Vec<usize> = c.seq.iter().map(|&u| dims[u / d][u % d]).collect();
            CircularArrangement::from_rotation(&mapped)
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

fn first_duplicate(labels: &[usize]) -> Option<usize> {
    let mut seen = BTreeSet::new();
    labels.iter().copied().find(|&v| !seen.insert(v))
}

/// Circular arrangements of `dims` in which the `t` positions right after
/// `anchor` hold exactly the labels of `window`.
///
/// `window` must take one label from every dimension and must not contain
/// the anchor. The count is `(t-1)! * (delta!)^t / delta` for dimensions of
/// `delta + 1` labels.
pub fn enumerate_anchored_arrangements(
    dims: &[Vec<usize>],
    anchor: usize,
    window: &[usize],
) -> Result<Vec<CircularArrangement>, PermutationError> {
    let t = dims.len();
    let dim_of = |label: usize| dims.iter().position(|dim| dim.contains(&label));
    if dim_of(anchor).is_none() {
        return Err(PermutationError::InfeasibleWindow(format!(
            "anchor {anchor} is not a block member"
        )));
    }
    if window.contains(&anchor) {
        return Err(PermutationError::InfeasibleWindow(format!(
            "window contains the anchor {anchor}"
        )));
    }
    let mut covered = vec![false; t];
    for &w in window {
        match dim_of(w) {
            None => {
                return Err(PermutationError::InfeasibleWindow(format!(
                    "label {w} is not a block member"
                )))
            }
            Some(i) if covered[i] => {
                return Err(PermutationError::InfeasibleWindow(format!(
                    "dimension {i} appears twice"
                )))
            }
            Some(i) => covered[i] = true,
        }
    }
    if let Some(missing) = covered.iter().position(|c| !c) {
        return Err(PermutationError::InfeasibleWindow(format!(
            "dimension {missing} is missing"
        )));
    }
    let target: BTreeSet<usize> = window.iter().copied().collect();
    Ok(circular_arrangements_of(dims)?
        .into_iter()
        .filter(|arr| {
            let pos = arr.position(anchor).expect("anchor is a member");
            arr.successors(pos, t).collect::<BTreeSet<_>>() == target
        })
        .collect())
}
