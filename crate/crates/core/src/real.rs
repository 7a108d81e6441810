//! Rigorous real approximations.
//!
//! A [`RealApprox`] is a closed interval `[lo, hi]` of MPFR floats whose endpoints
//! are always rounded outward, so the true value is guaranteed to lie inside.
//! The midpoint/radius view required by reports (`value ± error_bound`) is derived
//! on demand.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use rug::float::{Constant, Round};
use rug::integer::Order;
use rug::ops::Pow;
use rug::{Float, Integer};

/// Smallest precision accepted by the public embedding APIs.
pub const MIN_PRECISION_BITS: u32 = 32;

/// Default working precision.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

pub(crate) fn to_rug(v: &BigInt) -> Integer {
    let (sign, digits) = v.to_u64_digits();
    let mag = Integer::from_digits(&digits, Order::Lsf);
    if sign == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// An enclosure of a real number with outward-rounded endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RealApprox {
    lo: Float,
    hi: Float,
    prec: u32,
}

impl RealApprox {
    fn from_bounds(lo: Float, hi: Float, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted enclosure");
        RealApprox { lo, hi, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_bounds(Float::new(prec), Float::new(prec), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(v), prec)
    }

    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        let v = to_rug(v);
        let lo = Float::with_val_round(prec, &v, Round::Down).0;
        let hi = Float::with_val_round(prec, &v, Round::Up).0;
        Self::from_bounds(lo, hi, prec)
    }

    /// Encloses `num / den`; `den` must be nonzero.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        Self::from_int(num, prec).div(&Self::from_int(den, prec))
    }

    /// Encloses the f64 `v` exactly (every finite double is representable at >= 53 bits).
    pub fn from_f64(v: f64, prec: u32) -> Self {
        let p = prec.max(53);
        let x = Float::with_val(p, v);
        Self::from_bounds(x.clone(), x, prec)
    }

    /// Encloses `sqrt(n)` for a nonnegative integer `n`.
    pub fn sqrt_int(n: &BigInt, prec: u32) -> Self {
        assert!(n.sign() != Sign::Minus, "sqrt of a negative integer");
        let n = to_rug(n);
        let mut lo = Float::with_val_round(prec, &n, Round::Down).0;
        let mut hi = Float::with_val_round(prec, &n, Round::Up).0;
        lo.sqrt_round(Round::Down);
        hi.sqrt_round(Round::Up);
        Self::from_bounds(lo, hi, prec)
    }

    pub fn pi(prec: u32) -> Self {
        let lo = Float::with_val_round(prec, Constant::Pi, Round::Down).0;
        let hi = Float::with_val_round(prec, Constant::Pi, Round::Up).0;
        Self::from_bounds(lo, hi, prec)
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    pub fn lower(&self) -> &Float {
        &self.lo
    }

    pub fn upper(&self) -> &Float {
        &self.hi
    }

    /// Midpoint of the enclosure.
    pub fn value(&self) -> Float {
        let sum = Float::with_val(self.prec + 1, &self.lo + &self.hi);
        Float::with_val(self.prec, sum / 2u32)
    }

    /// Radius around [`value`](Self::value), rounded up.
    pub fn error_bound(&self) -> Float {
        let mid = self.value();
        let up = Float::with_val_round(self.prec, &self.hi - &mid, Round::Up).0;
        let down = Float::with_val_round(self.prec, &mid - &self.lo, Round::Up).0;
        if up > down {
            up
        } else {
            down
        }
    }

    /// Nearest f64 to the midpoint together with an upper bound on its distance
    /// to the true value.
    pub fn to_f64_with_error(&self) -> (f64, f64) {
        let v = self.value().to_f64();
        let vf = Float::with_val(64, v);
        let d1 = Float::with_val_round(self.prec.max(64), &self.hi - &vf, Round::Up).0;
        let d2 = Float::with_val_round(self.prec.max(64), &vf - &self.lo, Round::Up).0;
        let e = if d1 > d2 { d1 } else { d2 };
        (v, e.to_f64_round(Round::Up).max(0.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    pub fn width(&self) -> Float {
        Float::with_val_round(self.prec, &self.hi - &self.lo, Round::Up).0
    }

    pub fn contains(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Sign if the enclosure excludes zero (or is exactly zero).
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else if self.lo > 0 {
            Some(Ordering::Greater)
        } else if self.hi < 0 {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// `floor` of the enclosed value when both endpoints agree on it.
    pub fn floor_exact(&self) -> Option<Integer> {
        let a = self.lo.clone().floor().to_integer()?;
        let b = self.hi.clone().floor().to_integer()?;
        (a == b).then_some(a)
    }

    /// Nearest integer to the enclosure, used when deciding exact boundary cases.
    pub fn round_to_integer(&self) -> Option<Integer> {
        self.value().round().to_integer()
    }

    pub fn neg(&self) -> Self {
        Self::from_bounds(-self.hi.clone(), -self.lo.clone(), self.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        let lo = Float::with_val_round(p, &self.lo + &o.lo, Round::Down).0;
        let hi = Float::with_val_round(p, &self.hi + &o.hi, Round::Up).0;
        Self::from_bounds(lo, hi, p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec.max(o.prec);
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (x, y) in pairs {
            let d = Float::with_val_round(p, x * y, Round::Down).0;
            let u = Float::with_val_round(p, x * y, Round::Up).0;
            lo = Some(match lo {
                Some(l) if l <= d => l,
                _ => d,
            });
            hi = Some(match hi {
                Some(h) if h >= u => h,
                _ => u,
            });
        }
        Self::from_bounds(lo.unwrap(), hi.unwrap(), p)
    }

    /// Panics if `o` may be zero.
    pub fn div(&self, o: &Self) -> Self {
        assert!(
            o.sign().is_some_and(|s| s != Ordering::Equal),
            "division by an enclosure of zero"
        );
        let p = self.prec.max(o.prec);
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (x, y) in pairs {
            let d = Float::with_val_round(p, x / y, Round::Down).0;
            let u = Float::with_val_round(p, x / y, Round::Up).0;
            lo = Some(match lo {
                Some(l) if l <= d => l,
                _ => d,
            });
            hi = Some(match hi {
                Some(h) if h >= u => h,
                _ => u,
            });
        }
        Self::from_bounds(lo.unwrap(), hi.unwrap(), p)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        self.mul(&Self::from_int(k, self.prec))
    }

    /// Natural logarithm; `None` unless the enclosure is strictly positive.
    pub fn ln(&self) -> Option<Self> {
        if self.lo <= 0 {
            return None;
        }
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.ln_round(Round::Down);
        hi.ln_round(Round::Up);
        Some(Self::from_bounds(lo, hi, self.prec))
    }

    pub fn exp(&self) -> Self {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.exp_round(Round::Down);
        hi.exp_round(Round::Up);
        Self::from_bounds(lo, hi, self.prec)
    }

    pub fn atan(&self) -> Self {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo.atan_round(Round::Down);
        hi.atan_round(Round::Up);
        Self::from_bounds(lo, hi, self.prec)
    }

    /// `x^n` for a nonnegative enclosure.
    pub fn pow_nonneg(&self, n: u32) -> Self {
        assert!(self.lo >= 0, "pow_nonneg on a possibly negative enclosure");
        let lo = Float::with_val_round(self.prec, (&self.lo).pow(n), Round::Down).0;
        let hi = Float::with_val_round(self.prec, (&self.hi).pow(n), Round::Up).0;
        Self::from_bounds(lo, hi, self.prec)
    }

    pub fn abs(&self) -> Self {
        match self.sign() {
            Some(Ordering::Less) => self.neg(),
            Some(_) => self.clone(),
            None => {
                let m = if -self.lo.clone() > self.hi {
                    -self.lo.clone()
                } else {
                    self.hi.clone()
                };
                Self::from_bounds(Float::new(self.prec), m, self.prec)
            }
        }
    }

    /// Pointwise minimum of two enclosures.
    pub fn min(&self, o: &Self) -> Self {
        let lo = if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi < o.hi { self.hi.clone() } else { o.hi.clone() };
        Self::from_bounds(lo, hi, self.prec.max(o.prec))
    }

    /// Pointwise maximum of two enclosures.
    pub fn max(&self, o: &Self) -> Self {
        self.neg().min(&o.neg()).neg()
    }

    /// Shifts by an exact integer.
    pub fn add_integer(&self, k: &Integer) -> Self {
        let lo = Float::with_val_round(self.prec, &self.lo + k, Round::Down).0;
        let hi = Float::with_val_round(self.prec, &self.hi + k, Round::Up).0;
        Self::from_bounds(lo, hi, self.prec)
    }

    /// `true` when every point of `self` is strictly below every point of `o`.
    pub fn certainly_lt(&self, o: &Self) -> bool {
        self.hi < o.lo
    }
}

impl fmt::Display for RealApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (v, e) = self.to_f64_with_error();
        write!(f, "{v} ± {e:e}")
    }
}
