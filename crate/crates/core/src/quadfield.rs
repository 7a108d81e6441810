//! Exact arithmetic in the ring of integers `Z[ω]` of `Q(√d)`.
//!
//! `ω = √d` when `d ≡ 2, 3 (mod 4)` and `ω = (1 + √d)/2` when `d ≡ 1 (mod 4)`.
//! Every element is stored as its coordinate pair `(a, b)` for `a + bω` together
//! with a copy of the (small, immutable) [`FieldContext`] it belongs to.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Signature};
use crate::real::{RealApprox, MIN_PRECISION_BITS};

/// Shape of the integral basis element `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaShape {
    /// `ω = √d`, for `d ≡ 2, 3 (mod 4)`.
    SqrtD,
    /// `ω = (1 + √d)/2`, for `d ≡ 1 (mod 4)`.
    HalfPlus,
}

/// Immutable description of `K = Q(√d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldContext {
    d: i64,
    omega_shape: OmegaShape,
    trace_omega: i64,
    norm_omega: i64,
    w: u32,
    is_imaginary: bool,
}

/// Largest `|d|` accepted by [`make_context`]; keeps `norm_omega` and the
/// square-free trial division comfortably inside 64-bit arithmetic.
pub const MAX_ABS_D: i64 = 1 << 62;

/// Validates `d` and builds its field context.
pub fn make_context(d: i64) -> Result<FieldContext> {
    if d == 0 || d == 1 {
        return Err(Error::DegenerateField(d));
    }
    if d.unsigned_abs() > MAX_ABS_D as u64 {
        return Err(Error::InvalidArgument(format!(
            "|d| = {} exceeds 2^62",
            d.unsigned_abs()
        )));
    }
    if !is_square_free(d.unsigned_abs()) {
        return Err(Error::NotSquareFree(d));
    }
    let (omega_shape, trace_omega, norm_omega) = if d.rem_euclid(4) == 1 {
        (OmegaShape::HalfPlus, 1, (1 - d) / 4)
    } else {
        (OmegaShape::SqrtD, 0, -d)
    };
    let w = match d {
        -1 => 4,
        -3 => 6,
        _ => 2,
    };
    Ok(FieldContext {
        d,
        omega_shape,
        trace_omega,
        norm_omega,
        w,
        is_imaginary: d < 0,
    })
}

/// Trial division by every `p` with `p² ≤ n`.
pub fn is_square_free(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

impl FieldContext {
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn omega_shape(&self) -> OmegaShape {
        self.omega_shape
    }

    /// `ω + ω̄`.
    pub fn trace_omega(&self) -> i64 {
        self.trace_omega
    }

    /// `ω·ω̄`.
    pub fn norm_omega(&self) -> i64 {
        self.norm_omega
    }

    /// Number of roots of unity in `K`.
    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn is_imaginary(&self) -> bool {
        self.is_imaginary
    }

    pub fn is_real(&self) -> bool {
        !self.is_imaginary
    }

    pub fn signature(&self) -> Signature {
        if self.is_imaginary {
            Signature::Imaginary
        } else {
            Signature::Real
        }
    }

    pub(crate) fn require(&self, expected: Signature) -> Result<()> {
        if self.signature() == expected {
            Ok(())
        } else {
            Err(Error::WrongSignature { d: self.d, expected })
        }
    }

    /// The element `a + bω`.
    pub fn element<T: Coord>(&self, a: T, b: T) -> QuadIntOf<T> {
        QuadIntOf { a, b, field: *self }
    }

    pub fn int<T: Coord>(&self, a: i64, b: i64) -> QuadIntOf<T> {
        self.element(
            T::from_i64(a).expect("i64 coordinate"),
            T::from_i64(b).expect("i64 coordinate"),
        )
    }

    pub fn one<T: Coord>(&self) -> QuadIntOf<T> {
        self.element(T::one(), T::zero())
    }

    pub fn omega<T: Coord>(&self) -> QuadIntOf<T> {
        self.element(T::zero(), T::one())
    }

    /// `√d` as an element of the ring of integers.
    pub fn sqrt_d<T: Coord>(&self) -> QuadIntOf<T> {
        match self.omega_shape {
            OmegaShape::SqrtD => self.int(0, 1),
            OmegaShape::HalfPlus => self.int(-1, 2),
        }
    }

    /// Generator of the roots of unity (`i`, `e^{iπ/3}` or `-1`).
    pub fn root_of_unity_generator<T: Coord>(&self) -> QuadIntOf<T> {
        match self.d {
            -1 => self.int(0, 1),
            // ω = (1 + √-3)/2 = e^{iπ/3}
            -3 => self.int(0, 1),
            _ => self.int(-1, 0),
        }
    }
}

/// Integer scalar usable as a coordinate type.
pub trait Coord: Clone + fmt::Debug + Integer + Signed + FromPrimitive {}

impl<T: Clone + fmt::Debug + Integer + Signed + FromPrimitive> Coord for T {}

/// The element `a + bω` of the ring of integers of a quadratic field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadIntOf<T> {
    pub a: T,
    pub b: T,
    field: FieldContext,
}

impl<T: fmt::Debug> fmt::Debug for QuadIntOf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}ω)[d={}]", self.a, self.b, self.field.d)
    }
}

impl<T: fmt::Display> fmt::Display for QuadIntOf<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}ω", self.a, self.b)
    }
}

impl<T: Coord> QuadIntOf<T> {
    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    fn scalar(&self, v: i64) -> T {
        T::from_i64(v).expect("field constant fits the coordinate type")
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field.d == other.field.d {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.field.d,
                right: other.field.d,
            })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `N(a + bω) = a² + ab(ω + ω̄) + b²ωω̄`.
    pub fn norm(&self) -> T {
        let tr = self.scalar(self.field.trace_omega);
        let nm = self.scalar(self.field.norm_omega);
        self.a.clone() * self.a.clone() + self.a.clone() * self.b.clone() * tr + self.b.clone() * self.b.clone() * nm
    }

    /// `x + x̄ = 2a + b(ω + ω̄)`.
    pub fn trace(&self) -> T {
        let tr = self.scalar(self.field.trace_omega);
        self.a.clone() + self.a.clone() + self.b.clone() * tr
    }

    pub fn conjugate(&self) -> Self {
        let tr = self.scalar(self.field.trace_omega);
        QuadIntOf {
            a: self.a.clone() + self.b.clone() * tr,
            b: -self.b.clone(),
            field: self.field,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Uses `ω² = (ω + ω̄)ω − ωω̄`.
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let tr = self.scalar(self.field.trace_omega);
        let nm = self.scalar(self.field.norm_omega);
        let (a, b, c, e) = (&self.a, &self.b, &other.a, &other.b);
        let be = b.clone() * e.clone();
        QuadIntOf {
            a: a.clone() * c.clone() - be.clone() * nm,
            b: a.clone() * e.clone() + b.clone() * c.clone() + be * tr,
            field: self.field,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuadIntOf {
            a: self.a.clone() + other.a.clone(),
            b: self.b.clone() + other.b.clone(),
            field: self.field,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QuadIntOf {
            a: -self.a.clone(),
            b: -self.b.clone(),
            field: self.field,
        }
    }

    pub fn scalar_mul(&self, k: &T) -> Self {
        QuadIntOf {
            a: self.a.clone() * k.clone(),
            b: self.b.clone() * k.clone(),
            field: self.field,
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            n >>= 1;
        }
        acc
    }

    /// Coordinates `(p, q)` with `x = (p + q√d)/2`.
    pub fn half_coords(&self) -> (T, T) {
        let two = T::one() + T::one();
        match self.field.omega_shape {
            OmegaShape::SqrtD => (self.a.clone() * two.clone(), self.b.clone() * two),
            OmegaShape::HalfPlus => (self.a.clone() * two + self.b.clone(), self.b.clone()),
        }
    }

    /// Exact sign of `x` under the embedding `√d > 0` of a real field.
    pub fn real_sign(&self) -> Ordering {
        debug_assert!(self.field.is_real());
        let (p, q) = self.half_coords();
        sign_of_surd(&p, &q, &self.scalar(self.field.d))
    }
}

/// Sign of `p + q√d` for a positive non-square `d`.
pub fn sign_of_surd<T: Coord>(p: &T, q: &T, d: &T) -> Ordering {
    let sp = p.signum();
    let sq = q.signum();
    let zero = T::zero();
    let cmp0 = |s: &T| s.cmp(&zero);
    match (cmp0(&sp), cmp0(&sq)) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (s, t) if s == t => s,
        (s, _) => {
            // opposite signs: compare p² with q²d
            let lhs = p.clone() * p.clone();
            let rhs = q.clone() * q.clone() * d.clone();
            match lhs.cmp(&rhs) {
                Ordering::Greater => s,
                Ordering::Less => s.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

impl QuadIntOf<BigInt> {
    /// Embeds `x`: `(x, x̄)` for a real field, `(Re x, Im x)` for an imaginary one.
    pub fn embed(&self, precision_bits: u32) -> Result<(RealApprox, RealApprox)> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(Error::PrecisionTooLow(precision_bits));
        }
        let p = precision_bits;
        let root = RealApprox::sqrt_int(&BigInt::from(self.field.d.unsigned_abs()), p);
        let (hp, hq) = self.half_coords();
        let half = |v: RealApprox| v.div(&RealApprox::from_i64(2, p));
        let rational = RealApprox::from_int(&hp, p);
        let surd = root.mul_int(&hq);
        if self.field.is_real() {
            Ok((half(rational.add(&surd)), half(rational.sub(&surd))))
        } else {
            Ok((half(rational), half(surd)))
        }
    }

    /// Embedding of `x` alone (real fields).
    pub fn real_value(&self, precision_bits: u32) -> RealApprox {
        let (hp, hq) = self.half_coords();
        let p = precision_bits;
        let root = RealApprox::sqrt_int(&BigInt::from(self.field.d.unsigned_abs()), p);
        RealApprox::from_int(&hp, p)
            .add(&root.mul_int(&hq))
            .div(&RealApprox::from_i64(2, p))
    }
}

/// Arbitrary-precision element; the type used throughout the crate.
pub type QuadInt = QuadIntOf<BigInt>;
