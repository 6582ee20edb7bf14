//! Certified simple continued-fraction expansion of irrational k-th roots.
//!
//! For `alpha = N^(1/k)` (N not a perfect k-th power) the expansion
//! `alpha = [a_0; a_1, a_2, ...]` is computed from a dyadic enclosure
//! `A/2^s <= alpha < (A+1)/2^s` with `A = floor(N^(1/k) * 2^s)` obtained by an
//! exact integer root. Each complete quotient is the Moebius image
//!
//! ```text
//!   x_j = (q_{j-2} alpha - p_{j-2}) / (p_{j-1} - q_{j-1} alpha)
//! ```
//!
//! of alpha, so evaluating it at both endpoints of the enclosure brackets the
//! true remainder exactly (the map is monotone wherever the denominator keeps
//! one sign). A partial quotient is accepted only when the floors at both
//! endpoints agree; on disagreement the working precision is doubled and the
//! enclosure recomputed, resuming from the already-certified prefix. No
//! floating point is involved anywhere, so an accepted `a_j` is provably the
//! j-th partial quotient of the irrational.

use crate::arith::iroot;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Default hard cap on the number of partial quotients `expand_until` may
/// compute before giving up on a predicate that never fires.
pub const DEFAULT_TERM_CAP: usize = 10_000;

/// Safety ceiling on the working precision; reaching it means the radicand
/// was rational after all (which construction rules out) or a logic error.
const SCALE_CEILING: u64 = 1 << 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CfError {
    #[error("radicand must be at least 2, got {0}")]
    RadicandTooSmall(BigUint),
    #[error("root index must be at least 2, got {0}")]
    IndexTooSmall(u32),
    #[error("{n} is a perfect {k}-th power ({root}^{k}); its root has a finite expansion")]
    PerfectPower { n: BigUint, k: u32, root: BigUint },
    #[error("at least one term is required")]
    ZeroTerms,
    #[error("stop predicate did not fire within {cap} terms")]
    TermCapExceeded { cap: usize },
    #[error("convergent index {j} out of range; {len} computed")]
    ConvergentOutOfRange { j: usize, len: usize },
}

/// A certified prefix of the continued fraction of `N^(1/k)`.
///
/// Invariants, all enforced by construction and checkable exactly:
/// * `a_0 = floor(N^(1/k))` and `a_j >= 1` for `j >= 1`;
/// * `p_j = a_j p_{j-1} + p_{j-2}` and likewise for `q_j`;
/// * `p_j q_{j-1} - p_{j-1} q_j = (-1)^(j-1)` for `j >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdExpansion {
    radicand: BigUint,
    index: u32,
    quotients: Vec<BigUint>,
    convergents: Vec<(BigUint, BigUint)>,
    precision_bits: u64,
    stopped_at: Option<usize>,
}

impl SurdExpansion {
    pub fn radicand(&self) -> &BigUint {
        &self.radicand
    }

    /// The root index k of the expanded surd `N^(1/k)`.
    pub fn index(&self) -> u32 {
        self.index
    }

    /// Certified partial quotients `a_0, a_1, ...`.
    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    /// All computed convergents `(p_j, q_j)`, in lowest terms.
    pub fn convergents(&self) -> &[(BigUint, BigUint)] {
        &self.convergents
    }

    /// The j-th convergent `(p_j, q_j)`.
    pub fn convergent(&self, j: usize) -> Result<(&BigUint, &BigUint), CfError> {
        self.convergents
            .get(j)
            .map(|(p, q)| (p, q))
            .ok_or(CfError::ConvergentOutOfRange {
                j,
                len: self.convergents.len(),
            })
    }

    /// Working precision (bits) at which the last quotient was certified.
    pub fn precision_bits(&self) -> u64 {
        self.precision_bits
    }

    /// Index at which an `expand_until` predicate fired, if any.
    pub fn stopped_at(&self) -> Option<usize> {
        self.stopped_at
    }
}

/// Incremental certified expansion state.
struct Engine {
    n: BigUint,
    k: u32,
    scale: u64,
    /// floor(n^(1/k) * 2^scale); together with +1 an enclosure of alpha.
    alpha: BigInt,
    quotients: Vec<BigUint>,
    convergents: Vec<(BigUint, BigUint)>,
}

impl Engine {
    fn new(n: &BigUint, k: u32) -> Result<Self, CfError> {
        if k < 2 {
            return Err(CfError::IndexTooSmall(k));
        }
        if *n < BigUint::from(2u32) {
            return Err(CfError::RadicandTooSmall(n.clone()));
        }
        if let Some(root) = crate::arith::perfect_power_root(n, k) {
            return Err(CfError::PerfectPower {
                n: n.clone(),
                k,
                root,
            });
        }
        let scale = 2 * n.bits() + 64;
        let alpha = Self::enclose(n, k, scale);
        Ok(Engine {
            n: n.clone(),
            k,
            scale,
            alpha,
            quotients: Vec::new(),
            convergents: Vec::new(),
        })
    }

    fn enclose(n: &BigUint, k: u32, scale: u64) -> BigInt {
        BigInt::from_biguint(Sign::Plus, iroot(&(n << (u64::from(k) * scale)), k))
    }

    /// Convergents two and one steps back, with the conventional seeds
    /// p_{-1} = 1, q_{-1} = 0, p_{-2} = 0, q_{-2} = 1.
    fn tail(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let len = self.convergents.len();
        let get = |i: isize| -> (BigInt, BigInt) {
            if i >= 0 {
                let (p, q) = &self.convergents[i as usize];
                (BigInt::from(p.clone()), BigInt::from(q.clone()))
            } else if i == -1 {
                (BigInt::one(), BigInt::zero())
            } else {
                (BigInt::zero(), BigInt::one())
            }
        };
        let (pm1, qm1) = get(len as isize - 1);
        let (pm2, qm2) = get(len as isize - 2);
        (pm1, qm1, pm2, qm2)
    }

    /// Floor of the current complete quotient if both enclosure endpoints
    /// agree on it; `None` means the precision must be raised.
    fn try_floor(&self) -> Option<BigUint> {
        let (pm1, qm1, pm2, qm2) = self.tail();
        let unit = BigInt::one() << self.scale;
        let mut agreed: Option<BigInt> = None;
        for m in [self.alpha.clone(), &self.alpha + 1] {
            let mut num = &qm2 * &m - &pm2 * &unit;
            let mut den = &pm1 * &unit - &qm1 * &m;
            // Numerator and denominator share a sign that alternates with j;
            // normalize to a positive denominator.
            if den.is_negative() {
                num = -num;
                den = -den;
            }
            if den.is_zero() || num.is_negative() {
                return None;
            }
            let f = num.div_floor(&den);
            match &agreed {
                None => agreed = Some(f),
                Some(prev) if *prev == f => {}
                Some(_) => return None,
            }
        }
        let f = agreed.expect("two endpoints evaluated");
        if f < BigInt::one() {
            // a_0 >= 1 because n >= 2, and a_j >= 1 for j >= 1 always; a
            // smaller floor can only come from an enclosure that is too wide.
            return None;
        }
        f.to_biguint()
    }

    fn push_quotient(&mut self) {
        loop {
            if let Some(a) = self.try_floor() {
                let (pm1, qm1, pm2, qm2) = self.tail();
                let a_int = BigInt::from(a.clone());
                let p = (&a_int * &pm1 + &pm2).to_biguint().expect("p_j > 0");
                let q = (&a_int * &qm1 + &qm2).to_biguint().expect("q_j > 0");
                self.quotients.push(a);
                self.convergents.push((p, q));
                return;
            }
            assert!(
                self.scale < SCALE_CEILING,
                "precision ceiling reached expanding {}^(1/{})",
                self.n,
                self.k
            );
            self.scale *= 2;
            self.alpha = Self::enclose(&self.n, self.k, self.scale);
        }
    }

    fn ensure_terms(&mut self, terms: usize) {
        while self.quotients.len() < terms {
            self.push_quotient();
        }
    }

    fn into_expansion(self, terms: usize, stopped_at: Option<usize>) -> SurdExpansion {
        SurdExpansion {
            radicand: self.n,
            index: self.k,
            quotients: self.quotients[..terms].to_vec(),
            convergents: self.convergents[..terms].to_vec(),
            precision_bits: self.scale,
            stopped_at,
        }
    }
}

/// First `terms` certified partial quotients of `N^(1/k)`, with convergents.
pub fn expand(n: &BigUint, k: u32, terms: usize) -> Result<SurdExpansion, CfError> {
    if terms < 1 {
        return Err(CfError::ZeroTerms);
    }
    let mut engine = Engine::new(n, k)?;
    engine.ensure_terms(terms);
    Ok(engine.into_expansion(terms, None))
}

/// Expand until `stop(j, p_j, q_j, a_{j+1})` first returns true; the
/// triggering index is recorded in the result. The quotient `a_{j+1}` is
/// computed as a lookahead and is not part of the returned prefix.
///
/// `cap` guards non-terminating predicates (see [`DEFAULT_TERM_CAP`]).
pub fn expand_until<F>(
    n: &BigUint,
    k: u32,
    cap: usize,
    mut stop: F,
) -> Result<SurdExpansion, CfError>
where
    F: FnMut(usize, &BigUint, &BigUint, &BigUint) -> bool,
{
    let mut engine = Engine::new(n, k)?;
    for j in 0..cap {
        engine.ensure_terms(j + 2);
        let (p, q) = engine.convergents[j].clone();
        let next = engine.quotients[j + 1].clone();
        if stop(j, &p, &q, &next) {
            return Ok(engine.into_expansion(j + 1, Some(j)));
        }
    }
    Err(CfError::TermCapExceeded { cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_integer::Integer;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn quots(e: &SurdExpansion) -> Vec<u64> {
        e.quotients()
            .iter()
            .map(|a| u64::try_from(a).unwrap())
            .collect()
    }

    #[test]
    fn expand_cube_root_examples() {
        let e = expand(&big(124), 3, 6).unwrap();
        assert_eq!(quots(&e), [4, 1, 73, 1, 3, 1]);
        let e = expand(&big(999), 3, 6).unwrap();
        assert_eq!(quots(&e), [9, 1, 298, 1, 8, 1]);
    }

    #[test]
    fn expand_sqrt2_and_fourth_root() {
        let e = expand(&big(2), 2, 5).unwrap();
        assert_eq!(quots(&e), [1, 2, 2, 2, 2]);
        let e = expand(&big(624), 4, 1).unwrap();
        assert_eq!(quots(&e), [4]);
    }

    #[test]
    fn expand_rejects_bad_input() {
        assert_eq!(
            expand(&big(27), 3, 4),
            Err(CfError::PerfectPower {
                n: big(27),
                k: 3,
                root: big(3)
            })
        );
        assert_eq!(
            expand(&big(16), 2, 4).unwrap_err(),
            CfError::PerfectPower {
                n: big(16),
                k: 2,
                root: big(4)
            }
        );
        assert_eq!(
            expand(&big(1), 3, 4),
            Err(CfError::RadicandTooSmall(big(1)))
        );
        assert_eq!(expand(&big(7), 3, 0), Err(CfError::ZeroTerms));
        assert_eq!(expand(&big(7), 1, 3), Err(CfError::IndexTooSmall(1)));
    }

    #[test]
    fn convergents_of_cbrt_124() {
        let e = expand(&big(124), 3, 3).unwrap();
        let (p, q) = e.convergent(0).unwrap();
        assert_eq!((p, q), (&big(4), &big(1)));
        let (p, q) = e.convergent(1).unwrap();
        assert_eq!((p, q), (&big(5), &big(1)));
        let (p, q) = e.convergent(2).unwrap();
        assert_eq!((p, q), (&big(369), &big(74)));
        assert!(matches!(
            e.convergent(3),
            Err(CfError::ConvergentOutOfRange { j: 3, len: 3 })
        ));
    }

    #[test]
    fn expand_until_height_cutoff() {
        let million = big(1_000_000);
        let e = expand_until(&big(124), 3, DEFAULT_TERM_CAP, |_, p, _, _| *p > million).unwrap();
        assert_eq!(e.stopped_at(), Some(8));
        assert_eq!(e.quotients().len(), 9);
        assert_eq!(e.convergents()[8].0, big(111_381_743));
        // every earlier numerator is below the cutoff
        assert!(e.convergents()[..8]
            .iter()
            .all(|(p, _)| *p <= big(1_000_000)));
    }

    #[test]
    fn expand_until_index_predicates() {
        let e = expand_until(&big(999), 3, DEFAULT_TERM_CAP, |j, _, _, _| j == 0).unwrap();
        assert_eq!(quots(&e), [9]);
        assert_eq!(e.stopped_at(), Some(0));

        let e = expand_until(&big(624), 4, DEFAULT_TERM_CAP, |j, _, _, _| j == 13).unwrap();
        assert_eq!(e.quotients().len(), 14);
        assert!(e.convergents()[13].0 > BigUint::from(10u32).pow(8u32));
    }

    #[test]
    fn expand_until_cap_guards_nontermination() {
        assert_eq!(
            expand_until(&big(124), 3, 5, |_, _, _, _| false),
            Err(CfError::TermCapExceeded { cap: 5 })
        );
    }

    #[test]
    fn determinant_alternation_and_coprimality() {
        for (n, k) in [(124u64, 3u32), (999, 3), (2, 2), (624, 4), (78124, 7)] {
            let n = big(n);
            let e = expand(&n, k, 10).unwrap();
            let c = e.convergents();
            for j in 1..c.len() {
                let (pj, qj) = (&c[j].0, &c[j].1);
                let (pm, qm) = (&c[j - 1].0, &c[j - 1].1);
                let det = BigInt::from(pj.clone()) * BigInt::from(qm.clone())
                    - BigInt::from(pm.clone()) * BigInt::from(qj.clone());
                let expect = if (j - 1) % 2 == 0 { 1 } else { -1 };
                assert_eq!(det, BigInt::from(expect), "determinant at j={j}");
                assert!(pj.gcd(qj).is_one());
            }
            // p_j/q_j < alpha exactly for even j: p^k <=> n q^k
            for (j, (p, q)) in c.iter().enumerate() {
                let below = p.pow(k) < &n * q.pow(k);
                assert_eq!(below, j % 2 == 0, "alternation at j={j}");
            }
        }
    }
}
