//! Predicates, generators and brute-force search for k-th power Diophantine
//! tuples.
//!
//! A set {a_1, ..., a_m} of positive integers is a k-th power Diophantine
//! m-tuple when `a_i a_j + 1` is a perfect k-th power for every pair. A
//! verified tuple carries the witness roots of all pairwise products, so the
//! certificate can be rechecked with plain integer powers. The searches here
//! iterate over witness roots rather than raw elements: a third element `c`
//! extending a pair {x, y} must satisfy `x c + 1 = s^k`, so candidates are
//! enumerated as `c = (s^k - 1)/x`, an O(c_max^(1/k)) scan instead of
//! O(c_max).

use crate::arith::{iroot, perfect_power_root};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TupleError {
    #[error("tuple elements must be non-empty")]
    Empty,
    #[error("tuple elements must be strictly increasing positive integers")]
    NotIncreasing,
    #[error("power index must be at least 2, got {0}")]
    IndexTooSmall(u32),
    #[error("{{x, y}} is not a valid pair for k = {0}")]
    InvalidPair(u32),
}

/// A verified k-th power Diophantine tuple with its witness roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerTuple {
    elements: Vec<BigUint>,
    k: u32,
    /// Row i holds the witnesses for the pairs (i, j), j > i.
    witnesses: Vec<Vec<BigUint>>,
}

impl PowerTuple {
    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Witness root for the pair (i, j) with i < j:
    /// `witness(i, j)^k = elements[i] * elements[j] + 1`.
    pub fn witness(&self, i: usize, j: usize) -> &BigUint {
        assert!(
            i < j && j < self.elements.len(),
            "witness index out of range"
        );
        &self.witnesses[i][j - i - 1]
    }
}

/// Outcome of a tuple verification: either the witnessed tuple or the first
/// failing pair (by index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TupleCheck {
    Verified(PowerTuple),
    Failed { i: usize, j: usize },
}

impl TupleCheck {
    pub fn verified(self) -> Option<PowerTuple> {
        match self {
            TupleCheck::Verified(t) => Some(t),
            TupleCheck::Failed { .. } => None,
        }
    }
}

/// Check every pairwise product; elements must be strictly increasing.
pub fn verify_tuple(elements: &[BigUint], k: u32) -> Result<TupleCheck, TupleError> {
    if k < 2 {
        return Err(TupleError::IndexTooSmall(k));
    }
    if elements.is_empty() {
        return Err(TupleError::Empty);
    }
    if elements[0].is_zero() || elements.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TupleError::NotIncreasing);
    }
    let mut witnesses = Vec::with_capacity(elements.len());
    for i in 0..elements.len() {
        let mut row = Vec::with_capacity(elements.len() - i - 1);
        for j in i + 1..elements.len() {
            let product = &elements[i] * &elements[j] + 1u32;
            match perfect_power_root(&product, k) {
                Some(root) => row.push(root),
                None => return Ok(TupleCheck::Failed { i, j }),
            }
        }
        witnesses.push(row);
    }
    Ok(TupleCheck::Verified(PowerTuple {
        elements: elements.to_vec(),
        k,
        witnesses,
    }))
}

/// The pair construction: for a >= 2 and k >= 3,
///
/// ```text
///   b = sum_{i=0}^{k-1} C(k, i+1) a^(ik)
/// ```
///
/// satisfies `a^k b + 1 = (a^k + 1)^k` and `b > a^k`, so {a^k, b} is a k-th
/// power Diophantine pair. Returns `(a^k, b, a^k + 1)`.
pub fn canonical_pair(a: u64, k: u32) -> (BigUint, BigUint, BigUint) {
    assert!(a >= 2, "canonical pair requires a >= 2, got {a}");
    assert!(k >= 3, "canonical pair requires k >= 3, got {k}");
    let ak = BigUint::from(a).pow(k);
    let mut b = BigUint::zero();
    let mut ak_pow = BigUint::one(); // a^(ik)
    for i in 0..u64::from(k) {
        b += crate::arith::binomial(u64::from(k), i + 1) * &ak_pow;
        ak_pow *= &ak;
    }
    let r = &ak + 1u32;
    debug_assert_eq!(&ak * &b + 1u32, r.pow(k));
    (ak, b, r)
}

/// All c in (y, c_max] extending the verified pair {x, y} to a triple:
/// `x c + 1` and `y c + 1` both perfect k-th powers. Candidates are
/// enumerated through the witness root of `x c + 1`.
pub fn extend_pair(
    x: &BigUint,
    y: &BigUint,
    k: u32,
    c_max: &BigUint,
) -> Result<Vec<BigUint>, TupleError> {
    match verify_tuple(&[x.clone(), y.clone()], k)? {
        TupleCheck::Verified(_) => {}
        TupleCheck::Failed { .. } => return Err(TupleError::InvalidPair(k)),
    }
    let mut out = Vec::new();
    let mut s = iroot(&(x * y + 1u32), k);
    if s.is_zero() {
        s = BigUint::one();
    }
    let limit = x * c_max; // c <= c_max  <=>  s^k - 1 <= x c_max
    loop {
        let sk_minus_1 = s.pow(k) - 1u32;
        if sk_minus_1 > limit {
            break;
        }
        if (&sk_minus_1 % x).is_zero() {
            let c = &sk_minus_1 / x;
            if c > *y && perfect_power_root(&(y * &c + 1u32), k).is_some() {
                out.push(c);
            }
        }
        s += 1u32;
    }
    Ok(out)
}

/// All triples {x, y, c} with `x <= first_max` and `c <= c_max`, found by
/// scanning witness roots. With `restrict_to_power_form` only `x = a^k`
/// for a >= 2 with `a^k < y` is considered.
///
/// The outer loop fans out over a worker pool; results are merged and sorted
/// by (first, second, third) element, so the output is deterministic.
pub fn search_triples(
    k: u32,
    first_max: &BigUint,
    c_max: &BigUint,
    restrict_to_power_form: bool,
) -> Vec<PowerTuple> {
    assert!(k >= 2, "search requires k >= 2, got {k}");
    let first_candidates: Vec<BigUint> = if restrict_to_power_form {
        let mut v = Vec::new();
        let mut a = BigUint::from(2u32);
        loop {
            let x = a.pow(k);
            if x > *first_max {
                break;
            }
            v.push(x);
            a += 1u32;
        }
        v
    } else {
        let mut v = Vec::new();
        let mut x = BigUint::one();
        while x <= *first_max {
            v.push(x.clone());
            x += 1u32;
        }
        v
    };

    let mut found: Vec<PowerTuple> = first_candidates
        .par_iter()
        .flat_map_iter(|x| {
            let mut local = Vec::new();
            let limit = x * c_max;
            // y runs over (r^k - 1)/x for integer witness roots r
            let mut r = iroot(x, k) + 1u32;
            loop {
                let rk_minus_1 = r.pow(k) - 1u32;
                if rk_minus_1 > limit {
                    break;
                }
                if (&rk_minus_1 % x).is_zero() {
                    let y = &rk_minus_1 / x;
                    if y > *x {
                        for c in extend_pair(x, &y, k, c_max).expect("pair was constructed valid") {
                            let elements = [x.clone(), y.clone(), c];
                            let tuple = verify_tuple(&elements, k)
                                .expect("ascending by construction")
                                .verified()
                                .expect("witnessed by construction");
                            local.push(tuple);
                        }
                    }
                }
                r += 1u32;
            }
            local
        })
        .collect();
    found.sort_by(|s, t| s.elements.cmp(&t.elements));
    found
}
