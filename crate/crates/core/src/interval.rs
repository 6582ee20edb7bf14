//! Directed rational intervals.
//!
//! An interval `[lo, hi]` of exact rationals encloses a real quantity; the
//! field arithmetic here is exact (rational operations are closed), so width
//! only ever enters through the directed transcendental enclosures layered
//! on top.
//! A strict inequality between two enclosed reals is *certified* when the
//! intervals separate, and only then.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RationalInterval { lo, hi }
    }

    /// Degenerate interval holding a single exact rational.
    pub fn exact(v: BigRational) -> Self {
        RationalInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RationalInterval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        RationalInterval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }

    pub fn neg(&self) -> Self {
        RationalInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let candidates = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = candidates.iter().min().expect("nonempty").clone();
        let hi = candidates.iter().max().expect("nonempty").clone();
        RationalInterval { lo, hi }
    }

    /// Division; `rhs` must not contain zero.
    pub fn div(&self, rhs: &Self) -> Self {
        assert!(
            rhs.lo.is_positive() || rhs.hi.is_negative(),
            "division by an interval containing zero"
        );
        let candidates = [
            &self.lo / &rhs.lo,
            &self.lo / &rhs.hi,
            &self.hi / &rhs.lo,
            &self.hi / &rhs.hi,
        ];
        let lo = candidates.iter().min().expect("nonempty").clone();
        let hi = candidates.iter().max().expect("nonempty").clone();
        RationalInterval { lo, hi }
    }

    pub fn recip(&self) -> Self {
        Self::exact(BigRational::one()).div(self)
    }

    /// Integer power, exact, with the dependency between the factors
    /// accounted for (the square of `[-2, 1]` is `[0, 4]`).
    pub fn powi(&self, e: u32) -> Self {
        if e == 0 {
            return Self::exact(BigRational::one());
        }
        let lo_p = pow_rat(&self.lo, e);
        let hi_p = pow_rat(&self.hi, e);
        if e % 2 == 1 || !self.lo.is_negative() {
            RationalInterval { lo: lo_p, hi: hi_p }
        } else if !self.hi.is_positive() {
            RationalInterval { lo: hi_p, hi: lo_p }
        } else {
            RationalInterval {
                lo: BigRational::zero(),
                hi: lo_p.max(hi_p),
            }
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.mul(&Self::from_int(c))
    }

    /// `Some(true)` when `self > rhs` is certified, `Some(false)` when
    /// `self < rhs` is certified (equality counts as not-greater), `None`
    /// when the intervals overlap and no verdict is rigorous.
    pub fn compare_strict_gt(&self, rhs: &Self) -> Option<bool> {
        if self.lo > rhs.hi {
            Some(true)
        } else if self.hi <= rhs.lo {
            Some(false)
        } else {
            None
        }
    }
}

fn pow_rat(v: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = v.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}
