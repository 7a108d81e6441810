use std::collections::{BTreeMap, HashSet};

use norm1::equidist::{build_sample, koksma_consistent, sample_star_discrepancy, weyl_sums, SampleOrdering};
use norm1::heights::{mahler_measure, minimal_polynomial, partner_raw, partner_visible, pi_map, weil_height_sq};
use norm1::units::{phi, unit_fractional_parts, UnitFamily};
use norm1::visible::{
    canonical_real, enumerate_visible_imaginary, enumerate_visible_real_classes, is_visible, real_class_hits,
    unit_multiply_stays_visible,
};
use norm1::{fundamental_unit, make_context, FieldContext, QuadInt, UnitGroupInfo};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;

const IMAGINARY: [i64; 8] = [-1, -2, -3, -5, -6, -7, -11, -15];
const REAL: [i64; 7] = [2, 3, 5, 6, 13, 21, 94];
/// Real fields with a small regulator, cheap to enumerate.
const REAL_SMALL: [i64; 6] = [2, 3, 5, 6, 13, 21];

fn field(d: i64) -> FieldContext {
    make_context(d).unwrap()
}

fn units(d: i64) -> UnitGroupInfo {
    fundamental_unit(&field(d)).unwrap()
}

fn any_d() -> impl Strategy<Value = i64> {
    prop::sample::select(IMAGINARY.iter().chain(REAL.iter()).copied().collect::<Vec<_>>())
}

fn nonzero(r: i64) -> impl Strategy<Value = (i64, i64)> {
    (-r..=r, -r..=r).prop_filter("nonzero", |&(a, b)| (a, b) != (0, 0))
}

fn visible(r: i64) -> impl Strategy<Value = (i64, i64)> {
    nonzero(r).prop_filter("visible", |&(a, b)| a.gcd(&b) == 1)
}

/// Equality of two circle positions in `[0, L)` modulo `L`.
fn same_on_circle(x: f64, y: f64, circle: f64, tol: f64) -> bool {
    let diff = (x - y).rem_euclid(circle);
    diff <= tol || circle - diff <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn norm_is_multiplicative(d in any_d(), x in nonzero(1_000_000_000), y in nonzero(1_000_000_000)) {
        let k = field(d);
        let (x, y): (QuadInt, QuadInt) = (k.int(x.0, x.1), k.int(y.0, y.1));
        prop_assert_eq!(x.mul(&y).unwrap().norm(), x.norm() * y.norm());
    }

    #[test]
    fn conjugation_is_a_ring_homomorphism(d in any_d(), x in nonzero(1_000_000), y in nonzero(1_000_000)) {
        let k = field(d);
        let (x, y): (QuadInt, QuadInt) = (k.int(x.0, x.1), k.int(y.0, y.1));
        prop_assert_eq!(x.mul(&y).unwrap().conjugate(), x.conjugate().mul(&y.conjugate()).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().conjugate(), x.conjugate().add(&y.conjugate()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn embedding_recovers_the_norm(d in any_d(), x in nonzero(1_000_000)) {
        let k = field(d);
        let x: QuadInt = k.int(x.0, x.1);
        let (u, v) = x.embed(128).unwrap();
        let n = x.norm().to_f64().unwrap();
        let got = if k.is_real() { u.mul(&v) } else { u.mul(&u).add(&v.mul(&v)) };
        let slack = got.error_bound().to_f64() + 4.0 * f64::EPSILON * n.abs();
        prop_assert!((got.to_f64() - n).abs() <= slack, "{} vs {}", got.to_f64(), n);
    }

    #[test]
    fn roots_of_unity_preserve_visibility(i in 0..IMAGINARY.len(), x in visible(1_000_000)) {
        let k = field(IMAGINARY[i]);
        let alpha: QuadInt = k.int(x.0, x.1);
        let g: QuadInt = k.root_of_unity_generator();
        for j in 0..k.w() {
            prop_assert!(unit_multiply_stays_visible(&alpha, &g.pow(j)).unwrap());
        }
    }

    #[test]
    fn powers_of_the_unit_preserve_visibility(i in 0..REAL.len(), x in visible(1_000_000), e in -20i64..=20, neg: bool) {
        let info = units(REAL[i]);
        let alpha: QuadInt = info.field().int(x.0, x.1);
        let u = info.eps_pow(e);
        let u = if neg { u.neg() } else { u };
        prop_assert!(unit_multiply_stays_visible(&alpha, &u).unwrap());
    }

    #[test]
    fn canonical_form_is_a_class_invariant(i in 0..REAL.len(), x in visible(100_000), e in -12i64..=12, neg: bool) {
        let info = units(REAL[i]);
        let alpha: QuadInt = info.field().int(x.0, x.1);
        let u = info.eps_pow(e);
        let u = if neg { u.neg() } else { u };
        let moved = alpha.mul(&u).unwrap();
        prop_assert_eq!(canonical_real(&moved, &info).unwrap(), canonical_real(&alpha, &info).unwrap());
    }

    #[test]
    fn phi_is_additive(i in 0..REAL.len(), x in nonzero(10_000), y in nonzero(10_000)) {
        let info = units(REAL[i]);
        let k = info.field();
        let (x, y): (QuadInt, QuadInt) = (k.int(x.0, x.1), k.int(y.0, y.1));
        let circle = info.circle_modulus().to_f64();
        let px = phi(&x, &info, 128).unwrap();
        let py = phi(&y, &info, 128).unwrap();
        let pxy = phi(&x.mul(&y).unwrap(), &info, 128).unwrap();
        let sum = px.add(&py);
        let tol = sum.error_bound().to_f64() + pxy.error_bound().to_f64() + 1e-12;
        prop_assert!(same_on_circle(pxy.to_f64(), sum.to_f64(), circle, tol));
    }

    #[test]
    fn mahler_measure_equals_height(i in 0..IMAGINARY.len(), x in visible(3_000)) {
        let k = field(IMAGINARY[i]);
        let alpha: QuadInt = k.int(x.0, x.1);
        let h = weil_height_sq(&alpha).unwrap();
        match minimal_polynomial(&alpha) {
            Ok(f) => {
                let m = mahler_measure(&f, 128).unwrap();
                prop_assert!(m.width().to_f64() < 0.5);
                prop_assert_eq!(m.round_to_integer().unwrap().to_string(), h.to_string());
                // M = N / c2 is gcd(N, 2|d|), or gcd(N, |d|) when d ≡ 1 mod 4
                let n = alpha.norm();
                let base = if k.d().rem_euclid(4) == 1 { k.d().abs() } else { 2 * k.d().abs() };
                prop_assert_eq!(&n / &f.c2, n.gcd(&BigInt::from(base)));
            }
            Err(_) => prop_assert_eq!(h, BigInt::from(1)),
        }
    }

    #[test]
    fn partner_is_an_involution_on_classes(i in 0..REAL.len(), x in visible(10_000)) {
        let info = units(REAL[i]);
        let d = info.field().d();
        let alpha: QuadInt = info.field().int(x.0, x.1);
        let (p, g) = partner_raw(&alpha).unwrap();
        let n = alpha.norm();
        prop_assert_eq!(p.norm().abs() * &n.abs() * &g * &g, BigInt::from(d) * &n * &n);
        let back = partner_visible(&p, &info).unwrap();
        prop_assert_eq!(back, canonical_real(&alpha, &info).unwrap());
        let circle = info.circle_modulus().to_f64();
        let a = phi(&alpha, &info, 128).unwrap();
        let b = phi(&p, &info, 128).unwrap();
        let tol = a.error_bound().to_f64() + b.error_bound().to_f64() + 1e-12;
        prop_assert!(same_on_circle(a.to_f64(), b.to_f64(), circle, tol));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumeration_is_prefix_closed(i in 0..IMAGINARY.len() + REAL_SMALL.len(), t1 in 0u64..150, dt in 0u64..150) {
        let d = IMAGINARY.iter().chain(REAL_SMALL.iter()).nth(i).copied().unwrap();
        let k = field(d);
        let t2 = t1 + dt;
        let (small, large) = if k.is_real() {
            let info = fundamental_unit(&k).unwrap();
            (
                enumerate_visible_real_classes(&k, t1, &info).unwrap(),
                enumerate_visible_real_classes(&k, t2, &info).unwrap(),
            )
        } else {
            (enumerate_visible_imaginary(&k, t1).unwrap(), enumerate_visible_imaginary(&k, t2).unwrap())
        };
        prop_assert!(small.len() <= large.len());
        prop_assert_eq!(&large[..small.len()], &small[..]);
    }
}

#[test]
fn class_members_share_their_norm() {
    for d in REAL_SMALL {
        let k = field(d);
        let info = units(d);
        let norms: Vec<u64> = (1..=300).collect();
        let mut seen: BTreeMap<(BigInt, BigInt), BigInt> = BTreeMap::new();
        for (raw, rep) in real_class_hits(&k, &norms, &info).unwrap() {
            assert!(is_visible(&raw).unwrap());
            let key = (rep.alpha().a.clone(), rep.alpha().b.clone());
            let n = raw.norm().abs();
            assert_eq!(seen.entry(key).or_insert_with(|| n.clone()), &n, "d = {d}, raw = {raw}");
        }
    }
}

#[test]
fn pi_is_injective_on_canonical_points() {
    for d in IMAGINARY {
        let mut seen = HashSet::new();
        for p in enumerate_visible_imaginary(&field(d), 400).unwrap() {
            let b = pi_map(p.alpha()).unwrap();
            assert!(
                seen.insert(b.beta().clone()),
                "d = {d}: repeated image of {}",
                p.alpha()
            );
        }
    }
}

#[test]
fn units_have_norm_plus_or_minus_one() {
    for d in (2..=500).filter(|&d| norm1::quadfield::is_square_free(d as u64)) {
        let info = units(d);
        let eps = info.eps();
        let n = eps.mul(&eps.conjugate()).unwrap();
        assert_eq!(n, info.field().int(info.norm_eps(), 0), "d = {d}");
        assert!(info.norm_eps().abs() == 1);
    }
}

#[test]
fn unit_distances_shrink_with_the_exponent() {
    for d in [2, 3, 5, 13, 94] {
        let info = units(d);
        let rows = unit_fractional_parts(&info, 40, 256).unwrap();
        let tail_max = |from: u32| {
            rows.iter()
                .filter(|r| r.n >= from)
                .map(|r| r.distance.to_f64())
                .fold(0.0, f64::max)
        };
        assert!(tail_max(5) > tail_max(10) && tail_max(10) > tail_max(20), "d = {d}");
        for fam in UnitFamily::ALL {
            let seq: Vec<_> = rows.iter().filter(|r| r.family == fam).collect();
            for w in seq.windows(2).skip(1) {
                assert!(
                    w[1].distance.certainly_lt(&w[0].distance),
                    "d = {d}, {fam} n = {}",
                    w[1].n
                );
            }
        }
    }
}

#[test]
fn samples_satisfy_the_koksma_bound() {
    let cases = [
        (-1, SampleOrdering::Height, 40),
        (-3, SampleOrdering::NormImag, 2000),
        (-7, SampleOrdering::Height, 40),
        (3, SampleOrdering::NormReal, 500),
        (13, SampleOrdering::NormReal, 500),
    ];
    for (d, ordering, t) in cases {
        let k = field(d);
        let info = k.is_real().then(|| fundamental_unit(&k).unwrap());
        let s = build_sample(&k, ordering, t, info.as_ref(), 128).unwrap();
        let (dstar, err) = sample_star_discrepancy(&s).unwrap();
        for w in weyl_sums(&s, 16).unwrap().iter().skip(1) {
            assert!(koksma_consistent(w, dstar, err, s.len()), "d = {d}, m = {}", w.m);
        }
        assert!(s.points().iter().all(|p| (0.0..1.0).contains(&p.x)));
        assert!(s.points().iter().all(|p| p.alpha.norm().is_positive() || k.is_real()));
    }
}
