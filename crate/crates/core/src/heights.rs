//! The map `π(α) = α/ᾱ` onto norm-one elements, integer minimal polynomials,
//! Mahler measure and the height keys used to order the images.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result, Signature};
use crate::quadfield::{OmegaShape, QuadInt};
use crate::real::{RealApprox, MIN_PRECISION_BITS};
use crate::units::{xi_fraction, UnitGroupInfo};
use crate::visible::{canonical_real, visible_reduce, VisiblePoint};

/// `β = π(α) = α²/N(α)`, kept exactly as rational `ω`-coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormOneElement {
    alpha: QuadInt,
    beta: (BigRational, BigRational),
}

pub fn pi_map(alpha: &QuadInt) -> Result<NormOneElement> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let sq = alpha.mul_unchecked(alpha);
    let n = alpha.norm();
    let beta = (BigRational::new(sq.a, n.clone()), BigRational::new(sq.b, n));
    Ok(NormOneElement {
        alpha: alpha.clone(),
        beta,
    })
}

impl NormOneElement {
    pub fn alpha(&self) -> &QuadInt {
        &self.alpha
    }

    /// `(x, y)` with `β = x + yω`.
    pub fn beta(&self) -> &(BigRational, BigRational) {
        &self.beta
    }

    /// `N(β)`, computed from the rational coordinates; always `1`.
    pub fn beta_norm(&self) -> BigRational {
        let f = self.alpha.field();
        let (x, y) = &self.beta;
        let tr = BigRational::from_integer(f.trace_omega().into());
        let nm = BigRational::from_integer(f.norm_omega().into());
        x * x + x * y * tr + y * y * nm
    }

    /// `N(α)`, the imaginary ordering key.
    pub fn preimage_norm(&self) -> BigInt {
        self.alpha.norm()
    }

    pub fn is_rational(&self) -> bool {
        self.beta.1.is_zero()
    }

    /// Imaginary fields: `arg(β)/2π ∈ [0, 1)`.
    pub fn angle_fraction(&self, prec: u32) -> Result<RealApprox> {
        angle_fraction(&self.alpha, prec)
    }

    /// Real fields: `φ(β)/(2 log ε) ∈ [0, 1)`.
    pub fn xi_fraction(&self, info: &UnitGroupInfo, prec: u32) -> Result<RealApprox> {
        xi_fraction(&self.alpha, info, prec)
    }
}

/// `arg(α/ᾱ)/2π = arg(α)/π mod 1` for a nonzero `α` of an imaginary field.
pub fn angle_fraction(alpha: &QuadInt, prec: u32) -> Result<RealApprox> {
    alpha.field().require(Signature::Imaginary)?;
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    if prec < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(prec));
    }
    let (p, q) = alpha.half_coords();
    if q.is_zero() {
        return Ok(RealApprox::zero(prec));
    }
    if p.is_zero() {
        return Ok(RealApprox::from_ratio(&BigInt::one(), &BigInt::from(2), prec));
    }
    // α = (p + q√d)/2, arg(α) = π/2 − atan(p/(q√|d|)) mod π
    let root = RealApprox::sqrt_int(&BigInt::from(alpha.field().d().unsigned_abs()), prec);
    let ratio = RealApprox::from_int(&p, prec).div(&root.mul_int(&q));
    let pi = RealApprox::pi(prec);
    let half = RealApprox::from_ratio(&BigInt::one(), &BigInt::from(2), prec);
    Ok(half.sub(&ratio.atan().div(&pi)))
}

/// `c2·z² + c1·z + c0` with coprime coefficients and `c2 > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly2 {
    pub c2: BigInt,
    pub c1: BigInt,
    pub c0: BigInt,
}

impl IntPoly2 {
    /// Normalizes content and sign; `None` if `c2 = 0`.
    pub fn new(c2: BigInt, c1: BigInt, c0: BigInt) -> Option<Self> {
        if c2.is_zero() {
            return None;
        }
        let g = c2.gcd(&c1).gcd(&c0);
        let g = if c2.is_negative() { -g } else { g };
        Some(IntPoly2 {
            c2: c2 / &g,
            c1: c1 / &g,
            c0: c0 / &g,
        })
    }

    pub fn discriminant(&self) -> BigInt {
        &self.c1 * &self.c1 - BigInt::from(4) * &self.c2 * &self.c0
    }
}

impl fmt::Display for IntPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}z^2 + {}z + {}", self.c2, self.c1, self.c0)
    }
}

/// `(N/M)z² − (T/M)z + N/M` with `T = Tr(α²)` and `M = gcd(N, T)`.
pub fn minimal_polynomial(alpha: &QuadInt) -> Result<IntPoly2> {
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let sq = alpha.mul_unchecked(alpha);
    if sq.is_rational() {
        return Err(Error::RationalImage);
    }
    let n = alpha.norm();
    let t = sq.trace();
    Ok(IntPoly2::new(n.clone(), -t, n).expect("nonzero norm"))
}

/// `|c2|·max(1, |r1|)·max(1, |r2|)`.
pub fn mahler_measure(p: &IntPoly2, prec: u32) -> Result<RealApprox> {
    if prec < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(prec));
    }
    let disc = p.discriminant();
    if disc.is_negative() {
        // conjugate roots with |r|² = c0/c2
        return Ok(RealApprox::from_int(&p.c2.abs().max(p.c0.abs()), prec));
    }
    let root = RealApprox::sqrt_int(&disc, prec);
    let minus_c1 = RealApprox::from_int(&-&p.c1, prec);
    let two_c2 = RealApprox::from_int(&(&p.c2 * 2), prec);
    let one = RealApprox::from_i64(1, prec);
    let r1 = minus_c1.add(&root).div(&two_c2).abs().max(&one);
    let r2 = minus_c1.sub(&root).div(&two_c2).abs().max(&one);
    Ok(r1.mul(&r2).mul_int(&p.c2.abs()))
}

/// `H(π(α))² = N(α)/M` for visible `α` in an imaginary field, where
/// `M = gcd(N, 2|d|)`, or `M = gcd(N, |d|)` when `d ≡ 1 (mod 4)`.
///
/// For `d ≡ 1 (mod 8)` the two differ: 2 splits, `N` can be even, yet
/// `Tr(α²)` is then odd. Example: `d = −7`, `α = ω − 1`, `N = 2`,
/// minimal polynomial `2z² + 3z + 2`.
pub fn weil_height_sq(alpha: &QuadInt) -> Result<BigInt> {
    let f = alpha.field();
    f.require(Signature::Imaginary)?;
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n = alpha.norm();
    let m = match f.omega_shape() {
        OmegaShape::HalfPlus => f.d().unsigned_abs(),
        OmegaShape::SqrtD => 2 * f.d().unsigned_abs(),
    };
    let g = n.gcd(&BigInt::from(m));
    Ok(n / g)
}

/// The real-field invariant `M(ξ) = N₁·√d` with `N₁ = |N(α)|/gcd(N(α), d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MInvariant {
    pub n1: BigInt,
    pub d: i64,
}

impl MInvariant {
    pub fn value(&self, prec: u32) -> RealApprox {
        RealApprox::sqrt_int(&BigInt::from(self.d), prec).mul_int(&self.n1)
    }
}

pub fn m_invariant(alpha: &QuadInt) -> Result<MInvariant> {
    let f = alpha.field();
    f.require(Signature::Real)?;
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    Ok(MInvariant {
        n1: reduced_norm(&alpha.norm(), f.d()),
        d: f.d(),
    })
}

/// `|n|/gcd(n, d)`.
pub fn reduced_norm(n: &BigInt, d: i64) -> BigInt {
    let n = n.abs();
    let g = n.gcd(&BigInt::from(d));
    n / g
}

/// `√d·α` divided by its content: `bd/g + (a/g)√d` with `g = gcd(a, d)` when
/// `ω = √d`, and `(b(d−1)/2 − a + (2a + b)ω)/g` otherwise.
pub fn partner_raw(alpha: &QuadInt) -> Result<(QuadInt, BigInt)> {
    let f = alpha.field();
    f.require(Signature::Real)?;
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let d = BigInt::from(f.d());
    let (a, b) = (&alpha.a, &alpha.b);
    let x = match f.omega_shape() {
        OmegaShape::SqrtD => f.element(b * &d, a.clone()),
        OmegaShape::HalfPlus => f.element(b * (&d - 1) / 2 - a, a * 2 + b),
    };
    let (_, g) = visible_reduce(&x)?;
    Ok((f.element(&x.a / &g, &x.b / &g), g))
}

/// Canonical representative of the visible class paired with `α`: same
/// `φ∘π` image and same `N₁`, but not unit-equivalent unless `α ~ √d·α`.
pub fn partner_visible(alpha: &QuadInt, info: &UnitGroupInfo) -> Result<VisiblePoint> {
    let (x, _) = partner_raw(alpha)?;
    canonical_real(&x, info)
}
