//! Ordered samples of norm-one elements and their equidistribution statistics.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, isqrt_u64, mobius};
use crate::error::{Error, Result, Signature};
use crate::heights::{angle_fraction, partner_visible, reduced_norm, weil_height_sq};
use crate::quadfield::{FieldContext, OmegaShape, QuadInt};
use crate::real::{RealApprox, MIN_PRECISION_BITS};
use crate::units::{xi_fraction, UnitGroupInfo};
use crate::visible::{enumerate_visible_imaginary, enumerate_visible_real_norms, VisiblePoint};

/// How the norm-one elements are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOrdering {
    /// Weil height `H(β) ≤ t` (imaginary fields).
    Height,
    /// Preimage norm `N(α) ≤ t` (imaginary fields).
    NormImag,
    /// `N₁ = |N(α)|/gcd(N(α), d) ≤ t` (real fields).
    NormReal,
}

impl SampleOrdering {
    pub fn label(self) -> &'static str {
        match self {
            Self::Height => "height",
            Self::NormImag => "norm_imag",
            Self::NormReal => "norm_real",
        }
    }

    /// The norm ordering appropriate for `ctx`.
    pub fn norm_for(ctx: &FieldContext) -> Self {
        if ctx.is_imaginary() {
            Self::NormImag
        } else {
            Self::NormReal
        }
    }

    fn required_signature(self) -> Signature {
        match self {
            Self::Height | Self::NormImag => Signature::Imaginary,
            Self::NormReal => Signature::Real,
        }
    }
}

/// One element of a sample: preimage, exact key and circle coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePoint {
    pub alpha: QuadInt,
    pub key: BigInt,
    /// Coordinate in `[0, 1)`.
    pub x: f64,
    pub error_bound: f64,
}

/// All norm-one elements whose key does not exceed `key_bound`, sorted by key.
#[derive(Clone, Debug)]
pub struct OrderedSample {
    d: i64,
    ordering: SampleOrdering,
    key_bound: u64,
    points: Vec<SamplePoint>,
}

impl OrderedSample {
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn ordering(&self) -> SampleOrdering {
        self.ordering
    }

    /// Bound on the exact integer key (`t²` for heights, `t` otherwise).
    pub fn key_bound(&self) -> u64 {
        self.key_bound
    }

    pub fn points(&self) -> &[SamplePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coords(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn max_error(&self) -> f64 {
        self.points.iter().map(|p| p.error_bound).fold(0.0, f64::max)
    }

    /// The sub-sample with key at most `key_bound`.
    pub fn prefix(&self, key_bound: u64) -> OrderedSample {
        let kb = BigInt::from(key_bound.min(self.key_bound));
        let end = self.points.partition_point(|p| p.key <= kb);
        OrderedSample {
            d: self.d,
            ordering: self.ordering,
            key_bound: key_bound.min(self.key_bound),
            points: self.points[..end].to_vec(),
        }
    }
}

/// `ℋ(t)` (key `H² ≤ t²`) or `ℳ(t)` (key `≤ t`).
pub fn build_sample(
    ctx: &FieldContext,
    ordering: SampleOrdering,
    t: u64,
    info: Option<&UnitGroupInfo>,
    prec: u32,
) -> Result<OrderedSample> {
    let key_bound = match ordering {
        SampleOrdering::Height => t.checked_mul(t).ok_or(Error::BoundTooLarge(t))?,
        _ => t,
    };
    build_sample_with_key_bound(ctx, ordering, key_bound, info, prec)
}

/// Sample with the exact integer key bounded by `key_bound`.
pub fn build_sample_with_key_bound(
    ctx: &FieldContext,
    ordering: SampleOrdering,
    key_bound: u64,
    info: Option<&UnitGroupInfo>,
    prec: u32,
) -> Result<OrderedSample> {
    ctx.require(ordering.required_signature())?;
    if prec < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(prec));
    }
    let abs_d = ctx.d().unsigned_abs();
    let keyed: Vec<(BigInt, VisiblePoint)> = match ordering {
        SampleOrdering::NormImag => enumerate_visible_imaginary(ctx, key_bound)?
            .into_iter()
            .map(|p| (p.abs_norm().clone(), p))
            .collect(),
        SampleOrdering::Height => {
            // H² = N/M with M dividing 2|d|, so H² ≤ T forces N ≤ 2|d|·T
            let t = key_bound
                .checked_mul(2 * abs_d)
                .ok_or(Error::BoundTooLarge(key_bound))?;
            let kb = BigInt::from(key_bound);
            let mut v = Vec::new();
            for p in enumerate_visible_imaginary(ctx, t)? {
                let h = weil_height_sq(p.alpha())?;
                if h <= kb {
                    v.push((h, p));
                }
            }
            v
        }
        SampleOrdering::NormReal => {
            let info = info.ok_or_else(|| Error::InvalidArgument("real samples need the unit group".into()))?;
            real_norm_sample(ctx, key_bound, info)?
        }
    };
    let mut keyed = keyed;
    keyed.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let points = keyed
        .into_par_iter()
        .map(|(key, p)| {
            let r = match ordering {
                SampleOrdering::NormReal => xi_fraction(p.alpha(), info.expect("checked above"), prec)?,
                _ => angle_fraction(p.alpha(), prec)?,
            };
            let (mut x, mut e) = r.to_f64_with_error();
            if x <= 0.0 {
                x = 0.0;
            } else if x >= 1.0 {
                // a value just below 1 rounded up
                x = 1.0 - f64::EPSILON / 2.0;
                e += f64::EPSILON;
            }
            Ok(SamplePoint {
                alpha: p.into_alpha(),
                key,
                x,
                error_bound: e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderedSample {
        d: ctx.d(),
        ordering,
        key_bound,
        points,
    })
}

/// One representative per `{α, α'}` pair of classes with `N₁ ≤ t`.
fn real_norm_sample(ctx: &FieldContext, t: u64, info: &UnitGroupInfo) -> Result<Vec<(BigInt, VisiblePoint)>> {
    let d = ctx.d().unsigned_abs();
    let n_max = t.checked_mul(d).ok_or(Error::BoundTooLarge(t))?;
    let norms: Vec<u64> = (1..=n_max).filter(|&n| n / n.gcd(&d) <= t).collect();
    let reps = enumerate_visible_real_norms(ctx, &norms, info)?;
    reps.into_par_iter()
        .filter_map(|p| match partner_visible(p.alpha(), info) {
            Ok(q) if p <= q => Some(Ok((reduced_norm(&p.norm(), ctx.d()), p))),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

/// `S_m = (1/N)·Σ e^{2πi m x}` with a bound on the distance to the exact sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylSum {
    pub m: u32,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub error_bound: f64,
}

const CHUNK: usize = 1024;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// `S_0, …, S_{m_max}`. Chunks are reduced in parallel and merged in a fixed
/// order, so the result does not depend on the number of threads.
pub fn weyl_sums(sample: &OrderedSample, m_max: u32) -> Result<Vec<WeylSum>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let mean_err = sample.points.iter().map(|p| p.error_bound).sum::<f64>() / n;
    let coords = sample.coords();
    let u = f64::EPSILON;
    let mut out = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        if m == 0 {
            out.push(WeylSum {
                m,
                re: 1.0,
                im: 0.0,
                abs: 1.0,
                error_bound: 0.0,
            });
            continue;
        }
        let mf = f64::from(m);
        let partials: Vec<(Compensated, Compensated)> = coords
            .par_chunks(CHUNK)
            .map(|chunk| {
                let (mut c, mut s) = (Compensated::default(), Compensated::default());
                for &x in chunk {
                    let theta = std::f64::consts::TAU * (mf * x).fract();
                    c.add(theta.cos());
                    s.add(theta.sin());
                }
                (c, s)
            })
            .collect();
        let (mut c, mut s) = (Compensated::default(), Compensated::default());
        for (pc, ps) in partials {
            c.add(pc.value());
            s.add(ps.value());
        }
        let (re, im) = (c.value() / n, s.value() / n);
        let abs = re.hypot(im);
        // coordinate error, argument and trig rounding, summation and division
        let tau = std::f64::consts::TAU;
        let error_bound = tau * mf * mean_err + tau * (mf + 1.0) * u + 8.0 * u + abs * u;
        out.push(WeylSum {
            m,
            re,
            im,
            abs,
            error_bound,
        });
    }
    Ok(out)
}

/// `D*_N = 1/(2N) + max_i |x_(i) − (2i − 1)/(2N)|`.
pub fn star_discrepancy<F: Float>(xs: &[F]) -> Result<F> {
    if xs.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("coordinates are finite"));
    let n = F::from(xs.len()).expect("length fits the float type");
    let two = F::one() + F::one();
    let mut worst = F::zero();
    for (i, &x) in sorted.iter().enumerate() {
        let c = (two * F::from(i + 1).expect("index fits") - F::one()) / (two * n);
        worst = worst.max((x - c).abs());
    }
    Ok(F::one() / (two * n) + worst)
}

/// Star discrepancy of a sample with an error bound covering the coordinate
/// errors (`D*` is 1-Lipschitz in each coordinate) and rounding.
pub fn sample_star_discrepancy(sample: &OrderedSample) -> Result<(f64, f64)> {
    let coords = sample.coords();
    let mut sorted = coords.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    debug_assert!(
        sorted.windows(2).all(|w| w[0] < w[1]),
        "duplicate coordinates in sample"
    );
    let v = star_discrepancy(&coords)?;
    Ok((v, sample.max_error() + 4.0 * f64::EPSILON))
}

/// `|S_m| ≤ 2πm·D* + 2/N`, checked against the enclosures of both sides.
/// Only meaningful for `m ≥ 1`.
pub fn koksma_consistent(w: &WeylSum, dstar: f64, dstar_err: f64, n: usize) -> bool {
    let lhs = w.abs - w.error_bound;
    let rhs = std::f64::consts::TAU * f64::from(w.m) * (dstar + dstar_err) + 2.0 / n as f64;
    lhs <= rhs
}

/// Summary statistics of one sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistReport {
    pub d: i64,
    pub ordering: SampleOrdering,
    pub key_bound: u64,
    pub count: usize,
    pub count_over_t: f64,
    pub star_discrepancy: f64,
    pub star_discrepancy_error: f64,
    pub weyl: Vec<WeylSum>,
}

pub fn report(sample: &OrderedSample, t: u64, m_max: u32) -> Result<EquidistReport> {
    let (dstar, derr) = sample_star_discrepancy(sample)?;
    Ok(EquidistReport {
        d: sample.d,
        ordering: sample.ordering,
        key_bound: sample.key_bound,
        count: sample.len(),
        count_over_t: sample.len() as f64 / t as f64,
        star_discrepancy: dstar,
        star_discrepancy_error: derr,
        weyl: weyl_sums(sample, m_max)?,
    })
}

/// `Σ_{ℓ=1}^{w} ζ^{ℓm}` for `ζ = ξ²` and `ξ` a generator of the roots of
/// unity, summed exactly in the ring of integers.
pub fn s_chi_sum(ctx: &FieldContext, m: i64) -> Result<BigInt> {
    ctx.require(Signature::Imaginary)?;
    let xi: QuadInt = ctx.root_of_unity_generator();
    let zeta = xi.mul_unchecked(&xi);
    // ζ⁻¹ = ζ̄ on the unit circle
    let base = if m < 0 { zeta.conjugate() } else { zeta };
    let step = base.pow(m.unsigned_abs().to_u32().expect("frequency fits u32"));
    let mut power = ctx.one();
    let mut sum: QuadInt = ctx.int(0, 0);
    for _ in 0..ctx.w() {
        power = power.mul_unchecked(&step);
        sum = sum.add(&power)?;
    }
    debug_assert!(sum.is_rational());
    Ok(sum.a)
}

fn check_divisor(ctx: &FieldContext, r: u64, base: u64) -> Result<()> {
    let abs_d = ctx.d().unsigned_abs();
    if base != abs_d && base != 2 * abs_d {
        return Err(Error::InvalidArgument(format!(
            "modulus base {base} must be |d| or 2|d|"
        )));
    }
    if r == 0 || !base.is_multiple_of(r) {
        return Err(Error::BadDivisor { r, base });
    }
    Ok(())
}

/// `1` if `gcd(N(γ), base) = r`, else `0`.
pub fn eta_r(ctx: &FieldContext, gamma: &QuadInt, r: u64, base: u64) -> Result<i64> {
    check_divisor(ctx, r, base)?;
    if gamma.is_zero() {
        return Err(Error::ZeroElement);
    }
    let g = gamma.norm().gcd(&BigInt::from(base));
    Ok(i64::from(g == BigInt::from(r)))
}

/// `Σ_{ℓ | base/r} μ(ℓ) Σ_{k | rℓ} μ(k)·χ_k(γ)` with `χ_k(γ) = [gcd(N(γ), k) = 1]`.
pub fn eta_r_moebius(ctx: &FieldContext, gamma: &QuadInt, r: u64, base: u64) -> Result<i64> {
    check_divisor(ctx, r, base)?;
    if gamma.is_zero() {
        return Err(Error::ZeroElement);
    }
    let n = gamma.norm();
    let chi = |k: u64| i64::from(n.gcd(&BigInt::from(k)).is_one());
    let mut total = 0i64;
    for l in divisors(base / r) {
        let mu_l = mobius(l);
        if mu_l == 0 {
            continue;
        }
        let inner: i64 = divisors(r * l).into_iter().map(|k| mobius(k) * chi(k)).sum();
        total += mu_l * inner;
    }
    Ok(total)
}

/// Whether the Möbius expansion reproduces `η_r(γ)`.
pub fn moebius_eta_check(ctx: &FieldContext, gamma: &QuadInt, r: u64, base: u64) -> Result<bool> {
    Ok(eta_r(ctx, gamma, r, base)? == eta_r_moebius(ctx, gamma, r, base)?)
}

/// Both sides of `Ξ⁽⁰⁾(s) = Σ_{γ≠0} N(γ)^{-s} / (2ζ(2s))`, truncated at `N ≤ T`.
#[derive(Clone, Debug)]
pub struct SeriesCheck {
    /// `Σ N(α)^{-s}` over canonical visible `α` with `N(α) ≤ T`.
    pub lhs: RealApprox,
    /// `w·Z_T/(2ζ_T(2s))`, `Z_T = (1/w)·Σ_{0 < N(γ) ≤ T} N(γ)^{-s}`.
    pub rhs: RealApprox,
    /// Rigorous bound on `|lhs − rhs|` from the truncation tails.
    pub gap_bound: f64,
}

impl SeriesCheck {
    /// Whether `|lhs − rhs| ≤ gap_bound` holds for every point of the enclosures.
    pub fn holds(&self) -> bool {
        let diff = self.lhs.sub(&self.rhs).abs();
        *diff.upper() <= self.gap_bound
    }
}

/// Counts of nonzero `γ` per norm `n ≤ t`, by a direct scan of the coordinate box.
fn lattice_norm_counts(ctx: &FieldContext, t: u64) -> BTreeMap<u64, u64> {
    let abs_d = ctx.d().unsigned_abs();
    let mut counts = BTreeMap::new();
    let b_max = isqrt_u64(4 * t / abs_d) as i64;
    let a_max = isqrt_u64(t) as i64 + b_max + 1;
    for b in -b_max..=b_max {
        for a in -a_max..=a_max {
            if a == 0 && b == 0 {
                continue;
            }
            let x: QuadInt = ctx.int(a, b);
            let n = x.norm().to_u64().expect("positive norm");
            if n <= t {
                *counts.entry(n).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn dirichlet_sum(counts: &BTreeMap<u64, u64>, s: &RealApprox, prec: u32) -> RealApprox {
    let mut acc = RealApprox::zero(prec);
    for (&n, &c) in counts {
        let term = RealApprox::from_i64(n as i64, prec)
            .ln()
            .expect("n ≥ 1")
            .mul(&s.neg())
            .exp();
        acc = acc.add(&term.mul_int(&BigInt::from(c)));
    }
    acc
}

pub fn truncated_series_check(ctx: &FieldContext, s: f64, t: u64, prec: u32) -> Result<SeriesCheck> {
    ctx.require(Signature::Imaginary)?;
    if s.is_nan() || s <= 1.0 || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("s = {s} must exceed 1")));
    }
    if prec < MIN_PRECISION_BITS {
        return Err(Error::PrecisionTooLow(prec));
    }
    if t == 0 {
        let z = RealApprox::zero(prec);
        return Ok(SeriesCheck {
            lhs: z.clone(),
            rhs: z,
            gap_bound: f64::INFINITY,
        });
    }
    let sr = RealApprox::from_f64(s, prec);

    let mut visible_counts = BTreeMap::new();
    for p in enumerate_visible_imaginary(ctx, t)? {
        *visible_counts
            .entry(p.abs_norm().to_u64().expect("norm ≤ t"))
            .or_insert(0u64) += 1;
    }
    let lhs = dirichlet_sum(&visible_counts, &sr, prec);

    let all = dirichlet_sum(&lattice_norm_counts(ctx, t), &sr, prec);
    let ones: BTreeMap<u64, u64> = (1..=t).map(|n| (n, 1)).collect();
    let zeta = dirichlet_sum(&ones, &sr.add(&sr), prec);
    let two = RealApprox::from_i64(2, prec);
    let rhs = all.div(&zeta.mul(&two));

    // lattice points with N ≤ x lie in a disk of area π(√x + δ)², cells of area A
    let (area, delta) = covolume_and_diameter(ctx, prec);
    let tt = RealApprox::from_i64(t as i64, prec);
    let powt = |e: f64| tt.ln().expect("t ≥ 1").mul(&RealApprox::from_f64(e, prec)).exp();
    let half = RealApprox::from_f64(0.5, prec);
    let one = RealApprox::from_i64(1, prec);
    let pi = RealApprox::pi(prec);
    let term1 = powt(1.0 - s).div(&sr.sub(&one));
    let term2 = powt(0.5 - s).mul(&delta).mul(&two).div(&sr.sub(&half));
    let term3 = powt(-s).mul(&delta.mul(&delta)).div(&sr);
    let tail_all = sr.mul(&pi).div(&area).mul(&term1.add(&term2).add(&term3));
    let tail_zeta = powt(1.0 - 2.0 * s).div(&sr.add(&sr).sub(&one));
    // canonical visible points are at most half of all γ beyond T
    let tail_visible = tail_all.mul(&half);
    let rhs_lo = all.div(&zeta.add(&tail_zeta).mul(&two));
    let rhs_hi = all.add(&tail_all).div(&zeta.mul(&two));
    let window = rhs.sub(&rhs_lo).max(&rhs_hi.sub(&rhs));
    let gap = tail_visible.add(&window);
    let gap_bound = gap.upper().to_f64_round(rug::float::Round::Up);
    Ok(SeriesCheck { lhs, rhs, gap_bound })
}

/// Covolume `Im ω` of `Z[ω]` in `C` and the cell diameter bound `1 + |ω|`.
fn covolume_and_diameter(ctx: &FieldContext, prec: u32) -> (RealApprox, RealApprox) {
    let root = RealApprox::sqrt_int(&BigInt::from(ctx.d().unsigned_abs()), prec);
    let one = RealApprox::from_i64(1, prec);
    match ctx.omega_shape() {
        OmegaShape::SqrtD => (root.clone(), one.add(&root)),
        OmegaShape::HalfPlus => {
            let half = RealApprox::from_f64(0.5, prec);
            // |ω|² = (1 + |d|)/4
            let modulus = RealApprox::sqrt_int(&BigInt::from(1 + ctx.d().unsigned_abs()), prec).mul(&half);
            (root.mul(&half), one.add(&modulus))
        }
    }
}

/// One row of a counting profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub t: u64,
    pub count: usize,
    pub count_over_t: f64,
}

/// `#sample(t)` and `#sample(t)/t` along an increasing grid.
pub fn counting_profile(
    ctx: &FieldContext,
    ordering: SampleOrdering,
    t_grid: &[u64],
    info: Option<&UnitGroupInfo>,
    prec: u32,
) -> Result<Vec<CountRow>> {
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("t grid must be strictly increasing".into()));
    }
    let Some(&top) = t_grid.last() else {
        return Ok(Vec::new());
    };
    let full = build_sample(ctx, ordering, top, info, prec)?;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let kb = if ordering == SampleOrdering::Height { t * t } else { t };
            let count = full.prefix(kb).len();
            let count_over_t = if t == 0 { 0.0 } else { count as f64 / t as f64 };
            CountRow { t, count, count_over_t }
        })
        .collect())
}

/// Frequencies `m` at which `S_m` vanishes identically because the sample is
/// invariant under multiplication by roots of unity (`2m ≢ 0 mod w`).
pub fn forced_vanishing(ctx: &FieldContext, ordering: SampleOrdering, m: u32) -> bool {
    ordering != SampleOrdering::NormReal && ctx.is_imaginary() && !(2 * m).is_multiple_of(ctx.w())
}
