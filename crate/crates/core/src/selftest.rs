//! Fast self-checks for one field and the pilot run behind the decay golden file.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equidist::{
    build_sample, build_sample_with_key_bound, forced_vanishing, koksma_consistent, moebius_eta_check, s_chi_sum,
    sample_star_discrepancy, weyl_sums, SampleOrdering,
};
use crate::error::Result;
use crate::heights::{mahler_measure, minimal_polynomial, partner_visible, reduced_norm, weil_height_sq};
use crate::quadfield::{FieldContext, QuadInt};
use crate::units::{fundamental_unit, phi, UnitGroupInfo};
use crate::visible::{enumerate_visible_imaginary, enumerate_visible_real_classes, is_visible};

/// Largest `|S_m|` allowed at the top of the decay grid.
pub const WEYL_THRESHOLD: f64 = 0.1;

/// Key bounds of the decay chain.
pub const DECAY_GRID: [u64; 3] = [100, 1_000, 10_000];

/// Frequencies checked against [`WEYL_THRESHOLD`].
pub const DECAY_M_MAX: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn random_element(ctx: &FieldContext, rng: &mut ChaCha8Rng, r: i64) -> QuadInt {
    loop {
        let x: QuadInt = ctx.int(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        if !x.is_zero() {
            return x;
        }
    }
}

/// Runs the quick property checks for `Q(√d)`.
pub fn run_selftest(ctx: &FieldContext, prec: u32) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x006e_6f72_6d31);

    let mut bad = 0;
    for _ in 0..200 {
        let x = random_element(ctx, &mut rng, 1000);
        let y = random_element(ctx, &mut rng, 1000);
        if x.mul(&y)?.norm() != x.norm() * y.norm() {
            bad += 1;
        }
    }
    out.push(check(
        "norm is multiplicative",
        bad == 0,
        format!("{bad} of 200 pairs fail"),
    ));

    let base = if ctx.is_imaginary() {
        2 * ctx.d().unsigned_abs()
    } else {
        ctx.d().unsigned_abs()
    };
    let mut bad = 0;
    let mut total = 0;
    for _ in 0..200 {
        let g = random_element(ctx, &mut rng, 1000);
        for r in crate::arith::divisors(base) {
            total += 1;
            if !moebius_eta_check(ctx, &g, r, base)? {
                bad += 1;
            }
        }
    }
    out.push(check(
        "Moebius expansion of eta_r",
        bad == 0,
        format!("{bad} of {total} cases fail (modulus {base})"),
    ));

    if ctx.is_imaginary() {
        imaginary_checks(ctx, prec, &mut out)?;
    } else {
        let info = fundamental_unit(ctx)?;
        real_checks(ctx, &info, prec, &mut out)?;
    }
    Ok(out)
}

fn imaginary_checks(ctx: &FieldContext, prec: u32, out: &mut Vec<CheckResult>) -> Result<()> {
    let pts = enumerate_visible_imaginary(ctx, 300)?;
    let mut bad = 0;
    for p in &pts {
        let h = weil_height_sq(p.alpha())?;
        let ok = match minimal_polynomial(p.alpha()) {
            Ok(f) => mahler_measure(&f, prec)?.round_to_integer().map(|v| v.to_i64()) == Some(h.to_i64()),
            Err(_) => h.is_one(),
        };
        bad += usize::from(!ok);
    }
    out.push(check(
        "Mahler measure equals squared height",
        bad == 0,
        format!("{bad} of {} points fail", pts.len()),
    ));

    let unit = ctx.root_of_unity_generator();
    let bad = pts
        .iter()
        .filter(|p| !is_visible(&p.alpha().mul(&unit).expect("same field")).unwrap_or(false))
        .count();
    out.push(check(
        "roots of unity preserve visibility",
        bad == 0,
        format!("{bad} failures"),
    ));

    let w = ctx.w() as i64;
    let bad = (0..=12)
        .filter(|&m| s_chi_sum(ctx, m).ok() != Some(BigInt::from(if (2 * m) % w == 0 { w } else { 0 })))
        .count();
    out.push(check(
        "root-of-unity character sums",
        bad == 0,
        format!("{bad} of 13 frequencies fail"),
    ));

    for ordering in [SampleOrdering::NormImag, SampleOrdering::Height] {
        let t = if ordering == SampleOrdering::Height { 30 } else { 1000 };
        let s = build_sample(ctx, ordering, t, None, prec)?;
        sample_checks(ctx, &s, out)?;
    }
    Ok(())
}

fn real_checks(ctx: &FieldContext, info: &UnitGroupInfo, prec: u32, out: &mut Vec<CheckResult>) -> Result<()> {
    out.push(check(
        "fundamental unit has norm +-1",
        info.eps().norm().magnitude().is_one(),
        format!("eps = {}", info.eps()),
    ));
    let reps = enumerate_visible_real_classes(ctx, 200, info)?;
    let mut bad = 0;
    for p in &reps {
        let q = partner_visible(p.alpha(), info)?;
        let same_key = reduced_norm(&q.norm(), ctx.d()) == reduced_norm(&p.norm(), ctx.d());
        let a = phi(p.alpha(), info, prec)?;
        let b = phi(q.alpha(), info, prec)?;
        let diff = a.sub(&b).abs();
        let circle = info.circle_modulus();
        // equal modulo the circle length
        let close = diff.to_f64() <= 1e-20 || (diff.sub(&circle)).abs().to_f64() <= 1e-20;
        bad += usize::from(!(same_key && close));
    }
    out.push(check(
        "partner keeps N1 and phi",
        bad == 0,
        format!("{bad} of {} classes fail", reps.len()),
    ));
    let s = build_sample(ctx, SampleOrdering::NormReal, 300, Some(info), prec)?;
    sample_checks(ctx, &s, out)
}

fn sample_checks(ctx: &FieldContext, s: &crate::equidist::OrderedSample, out: &mut Vec<CheckResult>) -> Result<()> {
    let label = s.ordering().label();
    let weyl = weyl_sums(s, DECAY_M_MAX)?;
    let (dstar, derr) = sample_star_discrepancy(s)?;
    let bad = weyl
        .iter()
        .skip(1)
        .filter(|w| !koksma_consistent(w, dstar, derr, s.len()))
        .count();
    out.push(check(
        &format!("Koksma bound ({label})"),
        bad == 0,
        format!("D* = {dstar}, {bad} frequencies exceed"),
    ));
    let bad = weyl
        .iter()
        .filter(|w| forced_vanishing(ctx, s.ordering(), w.m) && w.abs > w.error_bound)
        .count();
    out.push(check(
        &format!("symmetric vanishing ({label})"),
        bad == 0,
        format!("{bad} forced zeros are nonzero"),
    ));
    Ok(())
}

/// Pilot statistics of one (field, ordering) chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCase {
    pub d: i64,
    pub ordering: SampleOrdering,
    pub key_bounds: Vec<u64>,
    pub counts: Vec<usize>,
    pub star_discrepancy: Vec<f64>,
    /// `max_{1 ≤ m ≤ 8} |S_m|` at the largest key bound.
    pub max_abs_weyl: f64,
}

/// Contents of the decay golden file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayGolden {
    pub schema_version: u32,
    pub weyl_threshold: f64,
    pub m_max: u32,
    pub cases: Vec<DecayCase>,
}

/// The (field, ordering) pairs of the decay chain.
pub const DECAY_CASES: [(i64, SampleOrdering); 5] = [
    (-1, SampleOrdering::Height),
    (-1, SampleOrdering::NormImag),
    (-2, SampleOrdering::NormImag),
    (2, SampleOrdering::NormReal),
    (5, SampleOrdering::NormReal),
];

/// Builds the sample once at the top of [`DECAY_GRID`] and reads the smaller
/// bounds off its prefixes. Height chains bound `H²`.
pub fn decay_case(ctx: &FieldContext, ordering: SampleOrdering, prec: u32) -> Result<DecayCase> {
    let info = if ctx.is_real() {
        Some(fundamental_unit(ctx)?)
    } else {
        None
    };
    let top = *DECAY_GRID.last().expect("nonempty grid");
    let full = build_sample_with_key_bound(ctx, ordering, top, info.as_ref(), prec)?;
    let mut counts = Vec::new();
    let mut star = Vec::new();
    for &kb in &DECAY_GRID {
        let s = full.prefix(kb);
        counts.push(s.len());
        star.push(sample_star_discrepancy(&s)?.0);
    }
    let max_abs_weyl = weyl_sums(&full, DECAY_M_MAX)?
        .iter()
        .skip(1)
        .map(|w| w.abs)
        .fold(0.0, f64::max);
    Ok(DecayCase {
        d: ctx.d(),
        ordering,
        key_bounds: DECAY_GRID.to_vec(),
        counts,
        star_discrepancy: star,
        max_abs_weyl,
    })
}

pub fn decay_golden(prec: u32) -> Result<DecayGolden> {
    let mut cases = Vec::new();
    for (d, ordering) in DECAY_CASES {
        cases.push(decay_case(&crate::quadfield::make_context(d)?, ordering, prec)?);
    }
    Ok(DecayGolden {
        schema_version: 1,
        weyl_threshold: WEYL_THRESHOLD,
        m_max: DECAY_M_MAX,
        cases,
    })
}
