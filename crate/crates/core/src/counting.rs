//! Exact big-integer combinatorial counts.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

pub fn pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

/// Per-needed-subfile split factor of the hypercube delivery:
/// `C(D_R-2, delta-1) * C(D_R-1, delta)^(t_R-1) * (delta!)^t_R / delta * (t_R-1)!`.
///
/// Returns `None` when `D_R < delta + 1` or any argument is degenerate.
pub fn hypercube_split(d_r: usize, delta: usize, t_r: usize) -> Option<BigUint> {
    if delta == 0 || t_r == 0 || d_r < delta + 1 {
        return None;
    }
    let numer = binomial(d_r - 2, delta - 1)
        * num_traits::pow(binomial(d_r - 1, delta), t_r - 1)
        * num_traits::pow(factorial(delta), t_r)
        * factorial(t_r - 1);
    debug_assert!((&numer % BigUint::from(delta)).is_zero());
    Some(numer / BigUint::from(delta))
}
