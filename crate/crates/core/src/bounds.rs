//! Rigorous evaluators for the effective irrationality measure behind the
//! elimination pipelines, and the derived inequality thresholds.
//!
//! For integers `n >= 3` and `N >= 1` with
//!
//! ```text
//!   (sqrt(N) + sqrt(N+1))^(2(n-2)) > (n mu_n)^n,
//!   mu_n = prod_{p | n} p^(1/(p-1)),
//! ```
//!
//! every rational p/q obeys `|(1 + 1/N)^(1/n) - p/q| > (8 n mu_n N)^-1 q^-lambda`
//! with
//!
//! ```text
//!   lambda = 1 + log(n mu_n X) / log(X / (n mu_n)),   X = (sqrt(N)+sqrt(N+1))^2.
//! ```
//!
//! All quantities are carried as directed rational intervals, so a strict
//! inequality is reported as holding only when the enclosures separate.
//! Comparisons involving irrational exponents are decided in log form:
//! `A^(k-lambda) < B` becomes `(k-lambda) log A < log B`. When an enclosure
//! is too wide to decide, the working precision is doubled; an inequality
//! still undecided at the precision cap is reported as an error rather than
//! guessed.

use crate::arith::{factor_u64, is_prime_u64};
use crate::dyadic::{exp_interval, kth_root_interval, ln_interval, sqrt_pair_square};
use crate::interval::RationalInterval;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::sync::OnceLock;
use thiserror::Error;

/// Initial working precision of the decision ladder.
pub const BASE_PRECISION_BITS: u64 = 128;

/// Default precision cap; override with `KDIO_MAX_PRECISION_BITS`.
pub const DEFAULT_MAX_PRECISION_BITS: u64 = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("approximation-measure condition not certified for n = {n}, N = {big_n}")]
    ConditionNotCertified { n: u32, big_n: BigUint },
    #[error("inequality undecided at {max_bits} bits: {quantity}")]
    Undecided { quantity: String, max_bits: u64 },
    #[error("{0}")]
    InvalidArgument(String),
}

/// Precision cap in bits, from `KDIO_MAX_PRECISION_BITS` when set.
pub fn max_precision_bits() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("KDIO_MAX_PRECISION_BITS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_PRECISION_BITS)
            .max(32)
    })
}

fn scale_ladder() -> impl Iterator<Item = u64> {
    let cap = max_precision_bits();
    let start = BASE_PRECISION_BITS.min(cap);
    std::iter::successors(Some(start), move |&s| (s < cap).then(|| (s * 2).min(cap)))
}

/// Run `eval` at doubling precisions until it reaches a verdict.
fn decide<F>(quantity: &str, eval: F) -> Result<bool, BoundsError>
where
    F: Fn(u64) -> Option<bool>,
{
    for scale in scale_ladder() {
        if let Some(v) = eval(scale) {
            return Ok(v);
        }
    }
    Err(BoundsError::Undecided {
        quantity: quantity.to_string(),
        max_bits: max_precision_bits(),
    })
}

fn exact_u64(v: u64) -> RationalInterval {
    RationalInterval::exact(BigRational::from_integer(BigInt::from(v)))
}

fn exact_nat(v: &BigUint) -> RationalInterval {
    RationalInterval::exact(BigRational::from_integer(BigInt::from(v.clone())))
}

/// mu_n at a given working precision. Exact whenever mu_n is rational
/// (n a power of two).
fn mu_at(n: u32, scale: u64) -> RationalInterval {
    assert!(n >= 2, "mu is defined for n >= 2, got {n}");
    let mut acc = exact_u64(1);
    for (p, _) in factor_u64(u64::from(n)) {
        let factor = if p == 2 {
            exact_u64(2)
        } else if p <= 65 {
            // p^(1/(p-1)) as an integer root of a shifted integer
            kth_root_interval(&BigUint::from(p), (p - 1) as u32, scale)
        } else {
            // exp(ln p / (p-1)) avoids (p-1)-th roots of huge shifted values
            let ln_p = ln_interval(&exact_u64(p), scale);
            exp_interval(&ln_p.div(&exact_u64(p - 1)), scale)
        };
        acc = acc.mul(&factor);
    }
    acc
}

/// Interval enclosing mu_n, width below 2^-64 of the midpoint; exact when
/// mu_n is rational.
pub fn mu(n: u32) -> RationalInterval {
    mu_at(n, BASE_PRECISION_BITS)
}

/// lambda enclosure at one working precision; `None` when the enclosures are
/// too wide to certify `X > n mu_n` (the positivity of the denominator log).
fn lambda_at(n: u32, big_n: &BigUint, scale: u64) -> Option<RationalInterval> {
    let x = sqrt_pair_square(big_n, scale);
    let n_mu = mu_at(n, scale).scale_int(i64::from(n));
    let num = ln_interval(&x.mul(&n_mu), scale);
    let den_arg = x.div(&n_mu);
    if !den_arg.lo().is_positive() {
        return None;
    }
    let den = ln_interval(&den_arg, scale);
    if !den.lo().is_positive() {
        return None;
    }
    Some(exact_u64(1).add(&num.div(&den)))
}

/// True only when `(sqrt(N)+sqrt(N+1))^(2(n-2)) > (n mu_n)^n` is certified
/// with interval rigor; false means "not certified".
pub fn check_condition(n: u32, big_n: &BigUint) -> bool {
    assert!(n >= 3, "condition is defined for n >= 3, got {n}");
    assert!(!big_n.is_zero(), "N must be positive");
    let verdict = decide("measure condition", |scale| {
        let x = sqrt_pair_square(big_n, scale);
        let lhs = ln_interval(&x, scale).scale_int(i64::from(n) - 2);
        let n_mu = mu_at(n, scale).scale_int(i64::from(n));
        let rhs = ln_interval(&n_mu, scale).scale_int(i64::from(n));
        lhs.compare_strict_gt(&rhs)
    });
    verdict.unwrap_or(false)
}

/// Enclosure of lambda for (n, N). The `hi` endpoint is the value to use in
/// downstream strict inequalities.
pub fn lambda_exponent(n: u32, big_n: &BigUint) -> Result<RationalInterval, BoundsError> {
    if !check_condition(n, big_n) {
        return Err(BoundsError::ConditionNotCertified {
            n,
            big_n: big_n.clone(),
        });
    }
    let fine = BigRational::new(BigInt::one(), BigInt::one() << 96);
    let mut widest: Option<RationalInterval> = None;
    for scale in scale_ladder() {
        if let Some(l) = lambda_at(n, big_n, scale) {
            if l.width() <= fine {
                return Ok(l);
            }
            widest = Some(l);
        }
    }
    widest.ok_or(BoundsError::Undecided {
        quantity: format!("lambda({n}, {big_n})"),
        max_bits: max_precision_bits(),
    })
}

/// Enclosure of the approximation gap `(8 n mu_n N)^-1 q^-lambda`; the `lo`
/// endpoint is the usable rigorous lower bound.
pub fn bennett_gap(n: u32, big_n: &BigUint, q: &BigUint) -> Result<RationalInterval, BoundsError> {
    assert!(!q.is_zero(), "q must be positive");
    if !check_condition(n, big_n) {
        return Err(BoundsError::ConditionNotCertified {
            n,
            big_n: big_n.clone(),
        });
    }
    for scale in scale_ladder() {
        let Some(lambda) = lambda_at(n, big_n, scale) else {
            continue;
        };
        let base = exact_nat(big_n)
            .scale_int(8 * i64::from(n))
            .mul(&mu_at(n, scale));
        let inv = base.recip();
        let q_pow = if q.is_one() {
            exact_u64(1)
        } else {
            let ln_q = ln_interval(&exact_nat(q), scale);
            exp_interval(&lambda.mul(&ln_q).neg(), scale)
        };
        let gap = inv.mul(&q_pow);
        // The bound can sit far below one ulp of the working scale (q^-lambda
        // for large q); keep doubling until the lower endpoint is usable.
        if gap.lo().is_positive()
            && &gap.width() * BigRational::from_integer(BigInt::one() << 32) <= *gap.lo()
        {
            return Ok(gap);
        }
    }
    Err(BoundsError::Undecided {
        quantity: format!("gap({n}, {big_n}, {q})"),
        max_bits: max_precision_bits(),
    })
}

/// The condition, mu and lambda data for one (n, N) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEnvelope {
    pub n: u32,
    pub big_n: BigUint,
    pub mu: RationalInterval,
    pub lambda: Option<RationalInterval>,
    pub condition_holds: bool,
}

impl BoundEnvelope {
    pub fn evaluate(n: u32, big_n: &BigUint) -> Self {
        let condition_holds = check_condition(n, big_n);
        let lambda = if condition_holds {
            lambda_exponent(n, big_n).ok()
        } else {
            None
        };
        BoundEnvelope {
            n,
            big_n: big_n.clone(),
            mu: mu(n),
            lambda,
            condition_holds,
        }
    }
}

/// Closure of the prime case `k >= 5`: with `M = 5^k - 1` the smallest
/// admissible `a^k b`, certifies that
///
/// ```text
///   x^(k-1) > 8^(k/(k-lambda)) x^((k+lambda)/(k-lambda))   for all x >= M
/// ```
///
/// at `lambda = lambda(k, M)` taken at its upper endpoint, which contradicts
/// the two-sided bound any triple would have to satisfy. Also certifies the
/// side conditions `lambda <= k - 1/(k-1)` (so `mu_k^k <= k^(k(k-lambda))`
/// may be dropped) and a positive exponent gap (so checking at `x = M`
/// suffices).
pub fn prime_case_closed(k: u32) -> Result<bool, BoundsError> {
    if k < 5 || !is_prime_u64(u64::from(k)) {
        return Err(BoundsError::InvalidArgument(format!(
            "prime case requires a prime k >= 5, got {k}"
        )));
    }
    let m = BigUint::from(5u32).pow(k) - 1u32;
    if !check_condition(k, &m) {
        return Err(BoundsError::ConditionNotCertified { n: k, big_n: m });
    }
    decide(&format!("prime case k = {k}"), |scale| {
        let lambda = lambda_at(k, &m, scale)?;
        // lambda <= k - 1/(k-1), exact rational comparison against the hull
        let drop_bound = BigRational::new(
            BigInt::from(u64::from(k) * u64::from(k - 1) - 1),
            BigInt::from(k - 1),
        );
        let drop_ok = if lambda.hi() < &drop_bound {
            Some(true)
        } else if lambda.lo() >= &drop_bound {
            Some(false)
        } else {
            None
        };
        let kk = exact_u64(u64::from(k));
        let k_minus = kk.sub(&lambda);
        if !k_minus.lo().is_positive() {
            return None;
        }
        let gap = exact_u64(u64::from(k) - 1).sub(&kk.add(&lambda).div(&k_minus));
        let gap_pos = gap.compare_strict_gt(&exact_u64(0));
        let lhs = gap.mul(&ln_interval(&exact_nat(&m), scale));
        let rhs = kk.div(&k_minus).mul(&ln_interval(&exact_u64(8), scale));
        let margin = lhs.compare_strict_gt(&rhs);
        match (drop_ok, gap_pos, margin) {
            (Some(false), _, _) | (_, Some(false), _) | (_, _, Some(false)) => Some(false),
            (Some(true), Some(true), Some(true)) => Some(true),
            _ => None,
        }
    })
}

/// Certifies `(r^4-1)^(12-5 lambda) >= 16^lambda` (the failure of the
/// constraint any surviving candidate would satisfy), at the conservative
/// endpoint of lambda(4, r^4-1). Holds for every r >= 35.
pub fn k4_tail_closed(r: u64) -> Result<bool, BoundsError> {
    assert!(r >= 5, "k4 tail is defined for r >= 5, got {r}");
    let n4 = BigUint::from(r).pow(4) - 1u32;
    if !check_condition(4, &n4) {
        return Err(BoundsError::ConditionNotCertified { n: 4, big_n: n4 });
    }
    decide(&format!("k4 tail r = {r}"), |scale| {
        let lambda = lambda_at(4, &n4, scale)?;
        let exponent = exact_u64(12).sub(&lambda.scale_int(5));
        let lhs = exponent.mul(&ln_interval(&exact_nat(&n4), scale));
        let rhs = lambda.mul(&ln_interval(&exact_u64(16), scale));
        lhs.compare_strict_gt(&rhs)
    })
}

/// Certifies `(r^3-1)^(15-7 lambda) >= 8^3 3^(3/2) 125^(lambda-3)` at the
/// conservative endpoint of lambda(3, r^3-1). Holds for every r >= 7973.
pub fn k3_tail_closed(r: u64) -> Result<bool, BoundsError> {
    assert!(r >= 9, "k3 tail is defined for r >= 9, got {r}");
    let n3 = BigUint::from(r).pow(3) - 1u32;
    if !check_condition(3, &n3) {
        return Err(BoundsError::ConditionNotCertified { n: 3, big_n: n3 });
    }
    decide(&format!("k3 tail r = {r}"), |scale| {
        let lambda = lambda_at(3, &n3, scale)?;
        let exponent = exact_u64(15).sub(&lambda.scale_int(7));
        let lhs = exponent.mul(&ln_interval(&exact_nat(&n3), scale));
        let three_halves =
            RationalInterval::exact(BigRational::new(BigInt::from(3), BigInt::from(2)));
        let rhs = ln_interval(&exact_u64(512), scale)
            .add(&three_halves.mul(&ln_interval(&exact_u64(3), scale)))
            .add(
                &lambda
                    .sub(&exact_u64(3))
                    .mul(&ln_interval(&exact_u64(125), scale)),
            );
        lhs.compare_strict_gt(&rhs)
    })
}

/// Rigorous exclusive integer ceiling on the convergent numerators `a^2 t`:
/// every admissible numerator is strictly below the returned value, which
/// encloses `(8 mu_k (r^k-1)^2)^(1/(k-lambda))` from above at the
/// conservative endpoint of lambda.
pub fn height_bound(k: u32, r: u64) -> Result<BigUint, BoundsError> {
    assert!(
        k == 3 || k == 4,
        "height bound is defined for k in {{3, 4}}, got {k}"
    );
    let n = BigUint::from(r).pow(k) - 1u32;
    if !check_condition(k, &n) {
        return Err(BoundsError::ConditionNotCertified { n: k, big_n: n });
    }
    for scale in scale_ladder() {
        let Some(lambda) = lambda_at(k, &n, scale) else {
            continue;
        };
        let k_minus = exact_u64(u64::from(k)).sub(&lambda);
        if !k_minus.lo().is_positive() {
            continue;
        }
        let rhs = mu_at(k, scale).scale_int(8).mul(&exact_nat(&n).powi(2));
        let exponent = ln_interval(&rhs, scale).div(&k_minus);
        let enclosure = exp_interval(&exponent, scale);
        let bound = enclosure.hi().floor().to_integer() + BigInt::one();
        return Ok(bound.to_biguint().expect("height bound is positive"));
    }
    Err(BoundsError::Undecided {
        quantity: format!("height bound k = {k}, r = {r}"),
        max_bits: max_precision_bits(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn rat(s: &str) -> BigRational {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        BigRational::new(BigInt::from_str(n).unwrap(), BigInt::from_str(d).unwrap())
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn mu_exact_and_irrational_cases() {
        let m4 = mu(4);
        assert!(m4.is_exact());
        assert_eq!(m4.lo(), &rat("2"));
        assert_eq!(mu(2).lo(), &rat("2"));

        let slack = rat("1/1208925819614629174706176"); // 2^-80
        let m3 = mu(3); // sqrt 3 = 1.7320508075688772935274463415058723669...
        let sqrt3 =
            rat("17320508075688772935274463415058723669/10000000000000000000000000000000000000");
        assert!(m3.lo() > &(&sqrt3 - &slack) && m3.hi() < &(&sqrt3 + &slack));
        let m6 = mu(6); // 2 sqrt 3 = 3.4641016151377545870548926830117447339...
        let two_sqrt3 =
            rat("34641016151377545870548926830117447339/10000000000000000000000000000000000000");
        assert!(m6.lo() > &(&two_sqrt3 - &slack) && m6.hi() < &(&two_sqrt3 + &slack));
        // width <= 2^-64 of the midpoint
        for n in [3u32, 5, 6, 7, 30, 97, 210] {
            let m = mu(n);
            let rel_cap = m.midpoint() / BigRational::from_integer(BigInt::one() << 64);
            assert!(m.width() <= rel_cap, "mu({n}) too wide");
        }
    }

    #[test]
    fn condition_examples() {
        assert!(check_condition(3, &big(124)));
        assert!(check_condition(4, &big(624)));
        assert!(!check_condition(3, &big(7)));
    }

    #[test]
    fn lambda_matches_published_envelopes() {
        let l = lambda_exponent(4, &(big(35).pow(4u32) - 1u32)).unwrap();
        assert!(l.hi() < &rat("2308/1000"));
        assert!(l.lo() > &rat("2307/1000"));

        let l = lambda_exponent(7, &(big(5).pow(7u32) - 1u32)).unwrap();
        assert!(l.hi() < &rat("244/100"));

        let l = lambda_exponent(5, &(big(5).pow(5u32) - 1u32)).unwrap();
        assert!(l.hi() < &rat("255/100"));

        for (n, nn) in [
            (3u32, big(124)),
            (4, big(624)),
            (5, big(5).pow(5u32) - 1u32),
        ] {
            let l = lambda_exponent(n, &nn).unwrap();
            assert!(l.lo() > &rat("1"), "lambda({n}) > 1");
            assert!(
                l.hi() < &BigRational::from_integer(BigInt::from(n)),
                "lambda({n}) < n"
            );
        }
    }

    #[test]
    fn lambda_requires_the_condition() {
        assert_eq!(
            lambda_exponent(3, &big(7)),
            Err(BoundsError::ConditionNotCertified {
                n: 3,
                big_n: big(7)
            })
        );
    }

    #[test]
    fn lambda_monotone_over_r_and_prime_k() {
        for k in [3u32, 4, 5, 7] {
            let mut prev: Option<BigRational> = None;
            for r in [5u64, 10, 50, 100, 1000] {
                let n = BigUint::from(r).pow(k) - 1u32;
                let l = lambda_exponent(k, &n).unwrap();
                if let Some(p) = prev {
                    assert!(l.hi() <= &p, "lambda({k}, r={r}) increased");
                }
                prev = Some(l.hi().clone());
            }
        }
        // Monotone over k >= 4 at r = 5 (between k = 3 and k = 4 the value
        // in fact increases slightly, so the chain starts at 4).
        let mut prev: Option<BigRational> = None;
        for k in [4u32, 5, 7, 11, 13] {
            let n = BigUint::from(5u32).pow(k) - 1u32;
            let l = lambda_exponent(k, &n).unwrap();
            if let Some(p) = prev {
                assert!(l.hi() <= &p, "lambda(k={k}, r=5) increased");
            }
            prev = Some(l.hi().clone());
        }
    }

    #[test]
    fn gap_examples() {
        // mu_4 = 2 exactly, q = 1: the gap is the exact rational 1/39936.
        let g = bennett_gap(4, &big(624), &big(1)).unwrap();
        assert!(g.is_exact());
        assert_eq!(g.lo(), &rat("1/39936"));

        // (24 sqrt(3) 124)^-1 = 1.9400210658253553914957956...e-4
        let g = bennett_gap(3, &big(124), &big(1)).unwrap();
        let below = rat("19400210658253553914/100000000000000000000000");
        let above = rat("19400210658253553915/100000000000000000000000");
        assert!(&below < g.lo() && g.hi() < &above);

        // strictly monotone in q
        for (n, nn) in [(3u32, big(124)), (5, big(3124))] {
            let g1 = bennett_gap(n, &nn, &big(1)).unwrap();
            let g2 = bennett_gap(n, &nn, &big(2)).unwrap();
            assert!(g1.lo() > g2.hi());
        }
    }

    #[test]
    fn prime_case_closes() {
        assert_eq!(prime_case_closed(5), Ok(true));
        assert_eq!(prime_case_closed(7), Ok(true));
        assert_eq!(prime_case_closed(97), Ok(true));
        assert!(matches!(
            prime_case_closed(4),
            Err(BoundsError::InvalidArgument(_))
        ));
        assert!(matches!(
            prime_case_closed(9),
            Err(BoundsError::InvalidArgument(_))
        ));
    }

    #[test]
    fn k4_tail_threshold_is_sharp() {
        assert_eq!(k4_tail_closed(35), Ok(true));
        assert_eq!(k4_tail_closed(34), Ok(false));
        assert_eq!(k4_tail_closed(5), Ok(false));
        assert_eq!(k4_tail_closed(1000), Ok(true));
    }

    #[test]
    fn k3_tail_threshold_is_sharp() {
        assert_eq!(k3_tail_closed(7973), Ok(true));
        assert_eq!(k3_tail_closed(7972), Ok(false));
        assert_eq!(k3_tail_closed(100), Ok(false));
        assert_eq!(k3_tail_closed(1_000_000), Ok(true));
    }

    #[test]
    fn height_bound_values() {
        assert_eq!(height_bound(4, 5).unwrap(), big(211_399));
        assert_eq!(
            height_bound(3, 9).unwrap(),
            BigUint::from_str("211604603902201").unwrap()
        );
        for r in 5..=34u64 {
            assert!(
                height_bound(4, r).unwrap() < BigUint::from(10u32).pow(8u32),
                "r = {r}"
            );
        }
        // At r = 35 the k = 4 bound crosses 1e8; that candidate is closed by
        // the tail inequality instead.
        assert!(height_bound(4, 35).unwrap() > BigUint::from(10u32).pow(8u32));
    }

    #[test]
    fn gap_and_height_bound_cohere() {
        // Above the height ceiling the measure's lower bound exceeds the
        // approximation upper bound N/(k q^k) (that is the contradiction the
        // ceiling encodes); comfortably below it, it does not.
        for (k, r) in [(3u32, 9u64), (4, 5), (3, 100)] {
            let n = BigUint::from(r).pow(k) - 1u32;
            let bound = height_bound(k, r).unwrap();
            let q_hi = &bound * 2u32;
            let gap = bennett_gap(k, &n, &q_hi).unwrap();
            let upper = BigRational::new(BigInt::from(n.clone()), BigInt::from(q_hi.pow(k) * k));
            assert!(
                gap.lo() > &upper,
                "no kill above the ceiling (k={k}, r={r})"
            );

            let q_lo = &bound / 4u32;
            let gap = bennett_gap(k, &n, &q_lo).unwrap();
            let upper = BigRational::new(BigInt::from(n.clone()), BigInt::from(q_lo.pow(k) * k));
            assert!(gap.hi() < &upper, "kill below the ceiling (k={k}, r={r})");
        }
    }

    #[test]
    fn envelope_carries_condition_and_lambda() {
        let e = BoundEnvelope::evaluate(3, &big(124));
        assert!(e.condition_holds);
        let l = e.lambda.unwrap();
        assert!(l.lo() > &rat("1") && l.hi() < &rat("3"));

        let e = BoundEnvelope::evaluate(3, &big(7));
        assert!(!e.condition_holds);
        assert!(e.lambda.is_none());
    }
}
