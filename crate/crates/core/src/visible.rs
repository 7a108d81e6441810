//! Visible lattice points `α = a + bω` (`gcd(a, b) = 1`) and their enumeration
//! by norm.
//!
//! Imaginary fields: one representative per `±`-class, `(1, 0)` or `b > 0`.
//! Real fields: one representative per class modulo the full unit group,
//! `α > 0` with `1 ≤ α²/|N(α)| < ε²`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{exact_sqrt, isqrt_u64};
use crate::error::{Error, Result, Signature};
use crate::quadfield::{FieldContext, OmegaShape, QuadInt};
use crate::real::DEFAULT_PRECISION_BITS;
use crate::units::{reduce_to_strip, UnitGroupInfo};

/// A visible, canonical lattice point with its absolute norm.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VisiblePoint {
    alpha: QuadInt,
    abs_norm: BigInt,
}

impl VisiblePoint {
    pub(crate) fn new_unchecked(alpha: QuadInt) -> Self {
        let abs_norm = alpha.norm().abs();
        VisiblePoint { alpha, abs_norm }
    }

    pub fn alpha(&self) -> &QuadInt {
        &self.alpha
    }

    pub fn abs_norm(&self) -> &BigInt {
        &self.abs_norm
    }

    /// Signed norm `N(α)`.
    pub fn norm(&self) -> BigInt {
        self.alpha.norm()
    }

    pub fn into_alpha(self) -> QuadInt {
        self.alpha
    }
}

/// Ordered by `(|N(α)|, a, b)`.
impl Ord for VisiblePoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.abs_norm
            .cmp(&other.abs_norm)
            .then_with(|| self.alpha.a.cmp(&other.alpha.a))
            .then_with(|| self.alpha.b.cmp(&other.alpha.b))
    }
}

impl PartialOrd for VisiblePoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Class representative of a real field together with its partner `α'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRep {
    pub rep: VisiblePoint,
    pub partner: VisiblePoint,
}

pub fn is_visible(x: &QuadInt) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    Ok(x.a.gcd(&x.b).is_one())
}

/// Imaginary canonical form: `(1, 0)` or `b > 0`.
pub fn is_canonical_imaginary(x: &QuadInt) -> bool {
    x.b.is_positive() || (x.b.is_zero() && x.a.is_one())
}

/// Real canonical form: `α > 0` and `1 ≤ α²/|N(α)| < ε²`.
pub fn is_canonical_real(x: &QuadInt, info: &UnitGroupInfo) -> bool {
    !x.is_zero() && &reduce_to_strip(x, info, DEFAULT_PRECISION_BITS) == x
}

fn sign_normalize(x: QuadInt) -> QuadInt {
    let flip = if x.field().is_imaginary() {
        x.b.is_negative() || (x.b.is_zero() && x.a.is_negative())
    } else {
        x.real_sign().is_lt()
    };
    if flip {
        x.neg()
    } else {
        x
    }
}

/// Writes `γ = n·α` with `n > 0` and `α` visible. In an imaginary field `α` is
/// canonical; in a real field `α > 0` (use [`canonical_real`] to reduce
/// modulo units as well).
pub fn visible_reduce(gamma: &QuadInt) -> Result<(VisiblePoint, BigInt)> {
    if gamma.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n = gamma.a.gcd(&gamma.b);
    let alpha = gamma.field().element(&gamma.a / &n, &gamma.b / &n);
    Ok((VisiblePoint::new_unchecked(sign_normalize(alpha)), n))
}

/// Canonical representative of the unit class of a visible `x` in a real field.
pub fn canonical_real(x: &QuadInt, info: &UnitGroupInfo) -> Result<VisiblePoint> {
    if x.field() != info.field() {
        return Err(Error::ContextMismatch {
            left: x.field().d(),
            right: info.field().d(),
        });
    }
    if !is_visible(x)? {
        return Err(Error::InvalidArgument(format!("{x:?} is not visible")));
    }
    Ok(VisiblePoint::new_unchecked(reduce_to_strip(
        x,
        info,
        DEFAULT_PRECISION_BITS,
    )))
}

/// Visibility is invariant under multiplication by units.
pub fn unit_multiply_stays_visible(alpha: &QuadInt, u: &QuadInt) -> Result<bool> {
    if !u.norm().abs().is_one() {
        return Err(Error::NotAUnit);
    }
    is_visible(&alpha.mul(u)?)
}

/// All canonical visible points with `N(α) ≤ t`, sorted by `(N, a, b)`.
pub fn enumerate_visible_imaginary(ctx: &FieldContext, t: u64) -> Result<Vec<VisiblePoint>> {
    ctx.require(Signature::Imaginary)?;
    let abs_d = ctx.d().unsigned_abs();
    // N = a² + ab·tr + b²·nm ≥ b²·|d|/4 in both shapes
    let b_max = isqrt_u64(t.saturating_mul(4) / abs_d) as i64;
    let mut out: Vec<VisiblePoint> = (0..=b_max)
        .into_par_iter()
        .flat_map_iter(|b| imaginary_row(ctx, t, b))
        .collect();
    out.sort();
    Ok(out)
}

/// Visible canonical points of one row `b` with `N ≤ t`.
fn imaginary_row(ctx: &FieldContext, t: u64, b: i64) -> Vec<VisiblePoint> {
    if b == 0 {
        return if t >= 1 {
            vec![VisiblePoint::new_unchecked(ctx.int(1, 0))]
        } else {
            Vec::new()
        };
    }
    let abs_d = ctx.d().unsigned_abs() as u128;
    let bb = (b as u128) * (b as u128);
    let (lo, hi) = match ctx.omega_shape() {
        OmegaShape::SqrtD => {
            let Some(rest) = (t as u128).checked_sub(abs_d * bb) else {
                return Vec::new();
            };
            let r = isqrt_u64(rest as u64) as i64;
            (-r, r)
        }
        OmegaShape::HalfPlus => {
            // (2a + b)² + |d|b² = 4N
            let Some(rest) = (4 * t as u128).checked_sub(abs_d * bb) else {
                return Vec::new();
            };
            let s = isqrt_u64(rest as u64) as i64;
            (-(s + b).div_euclid(2), (s - b).div_euclid(2))
        }
    };
    let bb = BigInt::from(b);
    (lo..=hi)
        .filter(|a| a.gcd(&b) == 1)
        .map(|a| VisiblePoint::new_unchecked(ctx.element(BigInt::from(a), bb.clone())))
        .collect()
}

/// Strict upper bound `B(n)` on `|b|` for a canonical real representative of
/// absolute norm `n`. With `α = (p + b√d)/2` (or `p/2 + b√d` when `ω = √d`),
/// `|α − ᾱ| ≤ α + |ᾱ| < (1 + ε)√n`.
fn coefficient_bound(ctx: &FieldContext, n: u64, eps_upper: f64) -> i64 {
    let scale = match ctx.omega_shape() {
        OmegaShape::SqrtD => 2.0,
        OmegaShape::HalfPlus => 1.0,
    };
    let v = (1.0 + eps_upper) * (n as f64).sqrt() / (scale * (ctx.d() as f64).sqrt());
    v.ceil() as i64 + 1
}

/// Every visible `α` with `|N(α)| = n` and `|b| ≤ B(n)`, before unit reduction.
fn real_norm_hits(ctx: &FieldContext, n: u64, b_max: i64) -> Vec<QuadInt> {
    let d = BigInt::from(ctx.d());
    let mut hits = Vec::new();
    for sign in [1i64, -1] {
        let target = BigInt::from(n) * sign;
        for b in -b_max..=b_max {
            let bb = BigInt::from(b);
            let db2 = &d * &bb * &bb;
            match ctx.omega_shape() {
                OmegaShape::SqrtD => {
                    // a² = N + d·b²
                    if let Some(r) = exact_sqrt(&(&target + &db2)) {
                        hits.push(ctx.element(r.clone(), bb.clone()));
                        if !r.is_zero() {
                            hits.push(ctx.element(-r, bb.clone()));
                        }
                    }
                }
                OmegaShape::HalfPlus => {
                    // (2a + b)² = 4N + d·b²
                    if let Some(r) = exact_sqrt(&(&target * 4 + &db2)) {
                        for s in [r.clone(), -r.clone()] {
                            let twice_a = s - &bb;
                            if twice_a.is_even() {
                                hits.push(ctx.element(twice_a / 2, bb.clone()));
                            }
                            if r.is_zero() {
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    hits.retain(|x| x.a.gcd(&x.b).is_one());
    hits
}

/// Raw hits of the per-norm scan paired with their canonical class
/// representative, for every `n` in `norms`.
pub fn real_class_hits(
    ctx: &FieldContext,
    norms: &[u64],
    info: &UnitGroupInfo,
) -> Result<Vec<(QuadInt, VisiblePoint)>> {
    ctx.require(Signature::Real)?;
    if info.field() != ctx {
        return Err(Error::ContextMismatch {
            left: ctx.d(),
            right: info.field().d(),
        });
    }
    let eps_upper = upper_f64(info);
    Ok(norms
        .par_iter()
        .flat_map_iter(|&n| {
            let b_max = coefficient_bound(ctx, n, eps_upper);
            real_norm_hits(ctx, n, b_max).into_iter().map(|x| {
                let rep = VisiblePoint::new_unchecked(reduce_to_strip(&x, info, DEFAULT_PRECISION_BITS));
                (x, rep)
            })
        })
        .collect())
}

fn upper_f64(info: &UnitGroupInfo) -> f64 {
    let (v, e) = info.eps().real_value(DEFAULT_PRECISION_BITS).to_f64_with_error();
    (v + e) * (1.0 + 1e-12)
}

/// Canonical class representatives whose absolute norm lies in `norms`, sorted
/// by `(|N|, a, b)`.
pub fn enumerate_visible_real_norms(
    ctx: &FieldContext,
    norms: &[u64],
    info: &UnitGroupInfo,
) -> Result<Vec<VisiblePoint>> {
    let mut reps: Vec<VisiblePoint> = real_class_hits(ctx, norms, info)?.into_iter().map(|(_, r)| r).collect();
    reps.sort();
    reps.dedup();
    Ok(reps)
}

/// Canonical class representatives with `|N(α)| ≤ t`.
pub fn enumerate_visible_real_classes(ctx: &FieldContext, t: u64, info: &UnitGroupInfo) -> Result<Vec<VisiblePoint>> {
    let norms: Vec<u64> = (1..=t).collect();
    enumerate_visible_real_norms(ctx, &norms, info)
}

/// Number of points per absolute norm.
pub fn norm_histogram(points: &[VisiblePoint]) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for p in points {
        *h.entry(p.abs_norm().to_u64().expect("norm fits u64")).or_insert(0) += 1;
    }
    h
}
