//! Unit groups of real quadratic fields and the coordinate `φ` on the
//! circle `R / 2 log ε`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Signature};
use crate::quadfield::{FieldContext, OmegaShape, QuadInt};
use crate::real::{RealApprox, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};

/// Precision ceiling for resolving boundary cases; never reached for
/// elements of moderate size.
const MAX_ESCALATED_PRECISION: u32 = 1 << 16;

/// Fundamental unit `ε > 1` of a real quadratic field and derived constants.
#[derive(Clone, Debug)]
pub struct UnitGroupInfo {
    field: FieldContext,
    eps: QuadInt,
    eps_inv: QuadInt,
    norm_eps: i64,
    log_eps: RealApprox,
}

impl UnitGroupInfo {
    pub fn field(&self) -> &FieldContext {
        &self.field
    }

    pub fn eps(&self) -> &QuadInt {
        &self.eps
    }

    /// `ε⁻¹ = N(ε)·ε̄`, which lies in `(0, 1)`.
    pub fn eps_inverse(&self) -> &QuadInt {
        &self.eps_inv
    }

    pub fn norm_eps(&self) -> i64 {
        self.norm_eps
    }

    pub fn log_eps(&self) -> &RealApprox {
        &self.log_eps
    }

    /// Length `2 log ε` of the circle `S`.
    pub fn circle_modulus(&self) -> RealApprox {
        self.log_eps.add(&self.log_eps)
    }

    pub fn precision_bits(&self) -> u32 {
        self.log_eps.precision_bits()
    }

    /// `log ε` at the requested precision.
    pub fn log_eps_at(&self, prec: u32) -> RealApprox {
        if prec <= self.log_eps.precision_bits() {
            return self.log_eps.clone();
        }
        log_of_unit(&self.eps, prec)
    }

    /// `ε^k` for any integer `k`.
    pub fn eps_pow(&self, k: i64) -> QuadInt {
        let e = k.unsigned_abs().to_u32().expect("unit exponent fits u32");
        if k >= 0 {
            self.eps.pow(e)
        } else {
            self.eps_inv.pow(e)
        }
    }
}

fn log_of_unit(eps: &QuadInt, prec: u32) -> RealApprox {
    eps.real_value(prec).ln().expect("ε > 1")
}

/// Fundamental unit at the default precision.
pub fn fundamental_unit(ctx: &FieldContext) -> Result<UnitGroupInfo> {
    fundamental_unit_with_precision(ctx, DEFAULT_PRECISION_BITS)
}

/// Continued-fraction expansion of `ω`, stopped at the end of the first period.
pub fn fundamental_unit_with_precision(ctx: &FieldContext, precision_bits: u32) -> Result<UnitGroupInfo> {
    ctx.require(Signature::Real)?;
    if precision_bits < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(precision_bits));
    }
    let d = BigInt::from(ctx.d());
    let s = d.sqrt();
    let (p0, q0) = match ctx.omega_shape() {
        OmegaShape::SqrtD => (BigInt::zero(), BigInt::one()),
        OmegaShape::HalfPlus => (BigInt::one(), BigInt::from(2)),
    };
    let (mut big_p, mut big_q) = (p0, q0.clone());
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    loop {
        debug_assert!(big_q.is_positive());
        let a = (&big_p + &s) / &big_q;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        big_p = &a * &big_q - &big_p;
        big_q = (&d - &big_p * &big_p) / &big_q;
        if big_q == q0 {
            break;
        }
    }
    let eps = match ctx.omega_shape() {
        OmegaShape::SqrtD => ctx.element(p, q),
        // p/q ≈ ω, so p − qω̄ = (p − q) + qω is the large conjugate
        OmegaShape::HalfPlus => ctx.element(&p - &q, q),
    };
    let n = eps.norm();
    debug_assert!(n.abs().is_one(), "continued fraction produced a non-unit");
    let norm_eps = n.to_i64().expect("unit norm");
    let eps_inv = eps.conjugate().scalar_mul(&n);
    let log_eps = log_of_unit(&eps, precision_bits);
    Ok(UnitGroupInfo {
        field: *ctx,
        eps,
        eps_inv,
        norm_eps,
        log_eps,
    })
}

/// Location of a nonzero `x` relative to the unit lattice:
/// `log(x²/|N(x)|) = (k + f)·log ε²` with `0 ≤ f < 1`.
#[derive(Clone, Debug)]
pub(crate) struct StripPosition {
    pub k: i64,
    /// `None` when `f = 0` exactly.
    pub fraction: Option<RealApprox>,
}

/// `log(x²/|N(x)|)` enclosed at `prec` bits, if the enclosure of `|x|` is positive.
fn log_ratio(x: &QuadInt, prec: u32) -> Option<RealApprox> {
    let abs_x = x.real_value(prec).abs();
    let l = abs_x.ln()?;
    let n = RealApprox::from_int(&x.norm().abs(), prec).ln()?;
    Some(l.add(&l).sub(&n))
}

pub(crate) fn strip_position(x: &QuadInt, info: &UnitGroupInfo, prec: u32) -> StripPosition {
    assert!(!x.is_zero(), "strip position of zero");
    let mut p = prec.max(MIN_PRECISION_BITS);
    loop {
        assert!(
            p <= MAX_ESCALATED_PRECISION,
            "could not resolve the unit strip of {x:?}"
        );
        let Some(lr) = log_ratio(x, p) else {
            p *= 2;
            continue;
        };
        let modulus = info.log_eps_at(p);
        let modulus = modulus.add(&modulus);
        let l = lr.div(&modulus);
        if let Some(k) = l.floor_exact() {
            let k = k.to_i64().expect("unit exponent fits i64");
            let fraction = l.add_integer(&rug::Integer::from(-k));
            return StripPosition {
                k,
                fraction: Some(fraction),
            };
        }
        // the enclosure straddles an integer j: exact boundary iff x·ε^{-j} has rational square
        let j = l
            .round_to_integer()
            .expect("finite")
            .to_i64()
            .expect("unit exponent fits i64");
        let y = x.mul_unchecked(&info.eps_pow(-j));
        if y.mul_unchecked(&y).is_rational() {
            return StripPosition { k: j, fraction: None };
        }
        p *= 2;
    }
}

/// Moves `x` into the fundamental strip `1 ≤ x²/|N(x)| < ε²` with `x > 0`.
pub fn reduce_to_strip(x: &QuadInt, info: &UnitGroupInfo, prec: u32) -> QuadInt {
    let x = if x.real_sign().is_lt() { x.neg() } else { x.clone() };
    let pos = strip_position(&x, info, prec);
    if pos.k == 0 {
        x
    } else {
        x.mul_unchecked(&info.eps_pow(-pos.k))
    }
}

/// `φ(π(α)) = log(α²/|N(α)|) mod 2 log ε`, a value in `[0, 2 log ε)`.
pub fn phi(alpha: &QuadInt, info: &UnitGroupInfo, prec: u32) -> Result<RealApprox> {
    let f = xi_fraction(alpha, info, prec)?;
    let m = info.log_eps_at(prec);
    Ok(f.mul(&m.add(&m)))
}

/// `φ(π(α)) / (2 log ε)`, the coordinate of `π(α)` in `[0, 1)`.
pub fn xi_fraction(alpha: &QuadInt, info: &UnitGroupInfo, prec: u32) -> Result<RealApprox> {
    if alpha.field() != info.field() {
        return Err(Error::ContextMismatch {
            left: alpha.field().d(),
            right: info.field().d(),
        });
    }
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    if prec < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(prec));
    }
    Ok(strip_position(alpha, info, prec)
        .fraction
        .unwrap_or_else(|| RealApprox::zero(prec)))
}

/// The four sign/conjugation families of unit powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum UnitFamily {
    Power,
    NegPower,
    ConjPower,
    NegConjPower,
}

impl UnitFamily {
    pub const ALL: [UnitFamily; 4] = [Self::Power, Self::NegPower, Self::ConjPower, Self::NegConjPower];

    pub fn label(self) -> &'static str {
        match self {
            Self::Power => "eps^n",
            Self::NegPower => "-eps^n",
            Self::ConjPower => "conj(eps)^n",
            Self::NegConjPower => "-conj(eps)^n",
        }
    }
}

impl fmt::Display for UnitFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `‖u^n‖`, the distance from `±u^n` or `±ū^n` to the nearest integer, where
/// `u = ε⁻¹` is the unit in `(0, 1)`.
#[derive(Debug, Clone)]
pub struct UnitDistance {
    pub family: UnitFamily,
    pub n: u32,
    pub distance: RealApprox,
}

/// Distance from `z` to the nearest integer.
pub fn distance_to_integer(z: &RealApprox) -> RealApprox {
    let j = z.round_to_integer().expect("finite enclosure");
    let mut best: Option<RealApprox> = None;
    for shift in [-1i32, 0, 1] {
        let c = z.add_integer(&(-(j.clone() + shift))).abs();
        best = Some(match best {
            Some(b) => b.min(&c),
            None => c,
        });
    }
    best.expect("three candidates")
}

/// `‖(±u^n)‖` and `‖(±ū^n)‖` for `n = 1..=n_max`, in family-major order.
pub fn unit_fractional_parts(info: &UnitGroupInfo, n_max: u32, prec: u32) -> Result<Vec<UnitDistance>> {
    if prec < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(prec));
    }
    let small_val = info.eps_inverse().real_value(prec);
    let mut out = Vec::with_capacity(4 * n_max as usize);
    for family in UnitFamily::ALL {
        for n in 1..=n_max {
            let y = small_val.pow_nonneg(n);
            // ū^n = Tr(u^n) − u^n and the trace is an integer
            let frac = match family {
                UnitFamily::Power | UnitFamily::NegConjPower => y,
                UnitFamily::NegPower | UnitFamily::ConjPower => y.neg(),
            };
            out.push(UnitDistance {
                family,
                n,
                distance: distance_to_integer(&frac),
            });
        }
    }
    Ok(out)
}
