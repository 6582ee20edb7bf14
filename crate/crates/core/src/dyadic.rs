//! Directed fixed-point kernels: square roots, k-th roots, logarithms and
//! exponentials with one-sided rounding at an explicit binary scale.
//!
//! A value is carried as an integer multiple of `2^-scale`. Every kernel
//! comes in a floor and a ceil variant whose results bracket the true real,
//! so the interval wrappers at the bottom return rigorous enclosures with
//! exact dyadic endpoints. Roots reduce to integer roots of shifted
//! integers; `ln` uses the atanh series after range reduction to `[1, 2)`;
//! `exp` uses the Taylor series after reduction by `ln 2`. Series tails are
//! absorbed by adding the first dropped term's overestimate, which dominates
//! the remainder for the reduced argument ranges used here.

use crate::arith::iroot;
use crate::interval::RationalInterval;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn pow2(scale: u64) -> BigInt {
    BigInt::one() << usize::try_from(scale).expect("scale fits usize")
}

fn pow2_rat(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

pub(crate) fn fix_to_rational(x: &BigInt, scale: u64) -> BigRational {
    BigRational::new(x.clone(), pow2(scale))
}

fn div_ceil_big(a: &BigUint, b: &BigUint) -> BigUint {
    (a + b - 1u32) / b
}

/// floor(x * 2^scale) for a rational x.
pub(crate) fn to_fix_floor(x: &BigRational, scale: u64) -> BigInt {
    (x.numer() << usize::try_from(scale).unwrap()).div_floor(x.denom())
}

/// ceil(x * 2^scale) for a rational x.
pub(crate) fn to_fix_ceil(x: &BigRational, scale: u64) -> BigInt {
    -((-(x.numer() << usize::try_from(scale).unwrap())).div_floor(x.denom()))
}

/// floor(log2 x) for a positive rational.
fn ilog2_rational(x: &BigRational) -> i64 {
    assert!(x.is_positive());
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    while pow2_rat(e) > *x {
        e -= 1;
    }
    while pow2_rat(e + 1) <= *x {
        e += 1;
    }
    e
}

/// Lower bound on atanh(t/2^scale), fixed point, for 0 <= t/2^scale < 1/2.
fn atanh_fix_floor(t: &BigUint, scale: u64) -> BigUint {
    debug_assert!(t < &(BigUint::one() << (scale - 1) as usize));
    let t2 = (t * t) >> scale as usize;
    let mut sum = t.clone();
    let mut tpow = t.clone();
    let mut j = 1u64;
    while !tpow.is_zero() && j <= 4 * scale {
        tpow = (&tpow * &t2) >> scale as usize;
        sum += &tpow / (2 * j + 1);
        j += 1;
    }
    sum
}

/// Upper bound on atanh(t/2^scale), fixed point, for 0 <= t/2^scale < 1/2.
fn atanh_fix_ceil(t: &BigUint, scale: u64) -> BigUint {
    debug_assert!(t < &(BigUint::one() << (scale - 1) as usize));
    if t.is_zero() {
        return BigUint::zero();
    }
    let t2 = div_ceil_big(&(t * t), &(BigUint::one() << scale as usize));
    let mut sum = t.clone();
    let mut tpow = t.clone();
    let mut j = 1u64;
    loop {
        tpow = div_ceil_big(&(&tpow * &t2), &(BigUint::one() << scale as usize));
        if tpow <= BigUint::from(16 * (2 * j + 1)) || j > 4 * scale {
            // The dropped tail is below tpow * (9/8)/(2j+1) <= tpow.
            sum += &tpow;
            return sum;
        }
        sum += div_ceil_big(&tpow, &BigUint::from(2 * j + 1));
        j += 1;
    }
}

fn third_floor(scale: u64) -> BigUint {
    (BigUint::one() << scale as usize) / 3u32
}

fn third_ceil(scale: u64) -> BigUint {
    div_ceil_big(&(BigUint::one() << scale as usize), &BigUint::from(3u32))
}

/// ln 2 * 2^scale, rounded down. ln 2 = 2 atanh(1/3).
fn ln2_fix_floor(scale: u64) -> BigUint {
    atanh_fix_floor(&third_floor(scale), scale) * 2u32
}

/// ln 2 * 2^scale, rounded up.
fn ln2_fix_ceil(scale: u64) -> BigUint {
    atanh_fix_ceil(&third_ceil(scale), scale) * 2u32
}

/// Lower bound on ln(x) at the given scale, for rational x > 0.
pub(crate) fn ln_fix_floor(x: &BigRational, scale: u64) -> BigInt {
    let e = ilog2_rational(x);
    // m = x / 2^e in [1, 2); round the mantissa down.
    let m_down = to_fix_floor(&(x / pow2_rat(e)), scale)
        .to_biguint()
        .expect("mantissa >= 1");
    let unit = BigUint::one() << scale as usize;
    let t_down = ((&m_down - &unit) << scale as usize) / (&m_down + &unit);
    let ln_m = BigInt::from(atanh_fix_floor(&t_down, scale) * 2u32);
    match e.cmp(&0) {
        std::cmp::Ordering::Equal => ln_m,
        std::cmp::Ordering::Greater => BigInt::from(ln2_fix_floor(scale)) * e + ln_m,
        std::cmp::Ordering::Less => BigInt::from(ln2_fix_ceil(scale)) * e + ln_m,
    }
}

/// Upper bound on ln(x) at the given scale, for rational x > 0.
pub(crate) fn ln_fix_ceil(x: &BigRational, scale: u64) -> BigInt {
    let e = ilog2_rational(x);
    let m_up = to_fix_ceil(&(x / pow2_rat(e)), scale)
        .to_biguint()
        .expect("mantissa >= 1");
    let unit = BigUint::one() << scale as usize;
    let t_up = div_ceil_big(&((&m_up - &unit) << scale as usize), &(&m_up + &unit));
    let ln_m = BigInt::from(atanh_fix_ceil(&t_up, scale) * 2u32);
    match e.cmp(&0) {
        std::cmp::Ordering::Equal => ln_m,
        std::cmp::Ordering::Greater => BigInt::from(ln2_fix_ceil(scale)) * e + ln_m,
        std::cmp::Ordering::Less => BigInt::from(ln2_fix_floor(scale)) * e + ln_m,
    }
}

/// Lower bound on exp(y/2^scale) for y >= 0, fixed point.
fn exp_series_floor(y: &BigUint, scale: u64) -> BigUint {
    let mut sum = BigUint::one() << scale as usize;
    let mut term = y.clone();
    let mut j = 1u64;
    while !term.is_zero() && j <= 4 * scale {
        sum += &term;
        j += 1;
        term = ((&term * y) >> scale as usize) / j;
    }
    sum
}

/// Upper bound on exp(y/2^scale) for 0 <= y/2^scale <= ~0.75, fixed point.
fn exp_series_ceil(y: &BigUint, scale: u64) -> BigUint {
    let unit = BigUint::one() << scale as usize;
    debug_assert!(y * 4u32 <= &unit * 3u32, "reduced argument out of range");
    let mut sum = unit.clone();
    let mut term = y.clone();
    let mut j = 1u64;
    loop {
        if term <= BigUint::from(16u32) || j > 4 * scale {
            // Geometric tail with ratio <= 3/8; 2 * term covers it.
            sum += &term * 2u32;
            return sum;
        }
        sum += &term;
        j += 1;
        term = div_ceil_big(&div_ceil_big(&(&term * y), &unit), &BigUint::from(j));
    }
}

/// Lower bound on exp(x/2^scale), any sign of x.
///
/// Each direction reduces by its own multiple of the ln 2 enclosure:
/// exp(x) = exp(x - e0 ln 2) * 2^e0 holds for any e0, so subtracting
/// e0 = floor(x / ln2_up) times the upper endpoint keeps the residual in
/// [0, ln2_up) while only ever lowering the result.
pub(crate) fn exp_fix_floor(x: &BigInt, scale: u64) -> BigUint {
    if x.is_negative() {
        let denom = exp_fix_ceil(&-x.clone(), scale);
        return (BigUint::one() << (2 * scale) as usize) / denom;
    }
    let mag = x.magnitude();
    let ln2_up = ln2_fix_ceil(scale);
    let e0 = u64::try_from(mag / &ln2_up).expect("exp argument within supported range");
    let y = mag - &ln2_up * e0;
    exp_series_floor(&y, scale) << usize::try_from(e0).unwrap()
}

/// Upper bound on exp(x/2^scale), any sign of x; the reduction subtracts
/// multiples of the lower ln 2 endpoint, so the residual stays in
/// [0, ln2_down) and the rounding only raises the result.
pub(crate) fn exp_fix_ceil(x: &BigInt, scale: u64) -> BigUint {
    if x.is_negative() {
        let denom = exp_fix_floor(&-x.clone(), scale);
        return div_ceil_big(&(BigUint::one() << (2 * scale) as usize), &denom);
    }
    let mag = x.magnitude();
    let ln2_down = ln2_fix_floor(scale);
    let e0 = u64::try_from(mag / &ln2_down).expect("exp argument within supported range");
    let y = mag - &ln2_down * e0;
    exp_series_ceil(&y, scale) << usize::try_from(e0).unwrap()
}

/// Enclosure of ln over a positive interval.
pub(crate) fn ln_interval(x: &RationalInterval, scale: u64) -> RationalInterval {
    assert!(x.lo().is_positive(), "ln requires a positive interval");
    RationalInterval::new(
        fix_to_rational(&ln_fix_floor(x.lo(), scale), scale),
        fix_to_rational(&ln_fix_ceil(x.hi(), scale), scale),
    )
}

/// Enclosure of exp over an interval.
pub(crate) fn exp_interval(x: &RationalInterval, scale: u64) -> RationalInterval {
    let lo = exp_fix_floor(&to_fix_floor(x.lo(), scale), scale);
    let hi = exp_fix_ceil(&to_fix_ceil(x.hi(), scale), scale);
    RationalInterval::new(
        fix_to_rational(&BigInt::from(lo), scale),
        fix_to_rational(&BigInt::from(hi), scale),
    )
}

/// Enclosure of n^(1/k) for an integer radicand; exact when n is a perfect
/// k-th power.
pub(crate) fn kth_root_interval(n: &BigUint, k: u32, scale: u64) -> RationalInterval {
    let shifted = n << usize::try_from(u64::from(k) * scale).unwrap();
    let lo = iroot(&shifted, k);
    let hi = if lo.pow(k) == shifted {
        lo.clone()
    } else {
        &lo + 1u32
    };
    RationalInterval::new(
        fix_to_rational(&BigInt::from(lo), scale),
        fix_to_rational(&BigInt::from(hi), scale),
    )
}

/// Enclosure of (sqrt(N) + sqrt(N+1))^2 = 2N + 1 + 2 sqrt(N(N+1)).
pub(crate) fn sqrt_pair_square(n: &BigUint, scale: u64) -> RationalInterval {
    let root = kth_root_interval(&(n * (n + 1u32)), 2, scale);
    let base = RationalInterval::exact(BigRational::from_integer(BigInt::from(n * 2u32 + 1u32)));
    base.add(&root.scale_int(2))
}
