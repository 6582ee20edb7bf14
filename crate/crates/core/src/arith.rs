//! Exact big-integer primitives: floor k-th roots, perfect-power detection,
//! binomial coefficients, and small-number factorization.
//!
//! Every function here is a pure function on immutable values. These sit on
//! the hot path of the candidate sweeps, so they avoid floating point
//! entirely; a root is correct because the defining inequality
//! `m^k <= n < (m+1)^k` is enforced by exact comparison, never by rounding.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Floor of the k-th root: the unique `m` with `m^k <= n < (m+1)^k`.
///
/// Integer Newton iteration seeded from the bit length, followed by a
/// two-sided correction loop. The seed `2^ceil(bits/k)` is an upper bound on
/// the root, so the iteration descends monotonically; the correction loop
/// runs O(1) steps.
///
/// Panics if `k < 2`.
pub fn iroot(n: &BigUint, k: u32) -> BigUint {
    assert!(k >= 2, "iroot requires k >= 2, got k = {k}");
    if n.is_zero() || n.is_one() {
        return n.clone();
    }
    let bits = n.bits();
    let mut x = BigUint::one() << bits.div_ceil(u64::from(k));
    loop {
        // y = ((k-1)x + n / x^(k-1)) / k
        let y = (&x * (k - 1) + n / x.pow(k - 1)) / k;
        if y >= x {
            break;
        }
        x = y;
    }
    while x.pow(k) > *n {
        x -= 1u32;
    }
    while (&x + 1u32).pow(k) <= *n {
        x += 1u32;
    }
    x
}

/// The exact k-th root `m` with `m^k = n`, if `n` is a perfect k-th power.
///
/// Panics if `k < 2`.
pub fn perfect_power_root(n: &BigUint, k: u32) -> Option<BigUint> {
    let m = iroot(n, k);
    if m.pow(k) == *n {
        Some(m)
    } else {
        None
    }
}

/// True iff `n` is a perfect k-th power.
pub fn is_perfect_power(n: &BigUint, k: u32) -> bool {
    perfect_power_root(n, k).is_some()
}

/// Binomial coefficient C(n, i), with C(n, i) = 0 for i > n.
///
/// Multiplicative running product; each intermediate division is exact
/// because C(n, 0..=t) are integers.
pub fn binomial(n: u64, i: u64) -> BigUint {
    if i > n {
        return BigUint::zero();
    }
    let i = i.min(n - i);
    let mut acc = BigUint::one();
    for t in 1..=i {
        acc = acc * (n - i + t) / t;
    }
    acc
}

/// Prime factorization of a `u64` by trial division, as ascending
/// `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Trial-division primality for `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime_u64(n)).collect()
}
