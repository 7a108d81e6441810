//! Brute-force reference implementations in machine integers.
//!
//! Nothing here calls into the library, so agreement with it is a real check.

#![allow(dead_code)]

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn square_root(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt(n as u128) as i128;
    (r * r == n).then_some(r)
}

pub fn is_square_free(d: i64) -> bool {
    let n = d.unsigned_abs();
    if n <= 1 {
        return d != 1 && d != 0;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// `Q(√d)` with integral basis `{1, ω}`.
#[derive(Clone, Copy, Debug)]
pub struct Field {
    pub d: i128,
    /// `ω = (1+√d)/2` when `d ≡ 1 (mod 4)`, else `ω = √d`.
    pub half: bool,
}

impl Field {
    pub fn new(d: i64) -> Self {
        Field {
            d: d as i128,
            half: d.rem_euclid(4) == 1,
        }
    }

    /// `(P, Q)` with `a + bω = (P + Q√d)/2`.
    pub fn parts(&self, a: i128, b: i128) -> (i128, i128) {
        if self.half {
            (2 * a + b, b)
        } else {
            (2 * a, 2 * b)
        }
    }

    pub fn norm(&self, a: i128, b: i128) -> i128 {
        let (p, q) = self.parts(a, b);
        (p * p - self.d * q * q) / 4
    }

    pub fn mul(&self, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
        let (p1, q1) = self.parts(x.0, x.1);
        let (p2, q2) = self.parts(y.0, y.1);
        // product of (P + Q√d)/2 terms, back to (a, b)
        let p = (p1 * p2 + self.d * q1 * q2) / 2;
        let q = (p1 * q2 + p2 * q1) / 2;
        if self.half {
            ((p - q) / 2, q)
        } else {
            (p / 2, q / 2)
        }
    }

    pub fn conj(&self, x: (i128, i128)) -> (i128, i128) {
        if self.half {
            (x.0 + x.1, -x.1)
        } else {
            (x.0, -x.1)
        }
    }

    pub fn value(&self, a: i128, b: i128) -> f64 {
        let (p, q) = self.parts(a, b);
        (p as f64 + q as f64 * (self.d as f64).sqrt()) / 2.0
    }
}

/// Fundamental unit `ε > 1` of a real field: the solution of the Pell-type
/// equation with the smallest `b`.
pub fn fundamental_unit(d: i64) -> (i128, i128) {
    let f = Field::new(d);
    for y in 1..=10_000_000i128 {
        if f.half {
            // x² − d y² = ±4 with x ≡ y (mod 2), automatic since d ≡ 1 (mod 4)
            for s in [-4, 4] {
                if let Some(x) = square_root(f.d * y * y + s) {
                    return ((x - y) / 2, y);
                }
            }
        } else {
            for s in [-1, 1] {
                if let Some(x) = square_root(f.d * y * y + s) {
                    return (x, y);
                }
            }
        }
    }
    panic!("no unit found for d = {d}");
}

/// Canonical visible points of an imaginary field with `N ≤ t`, sorted by `(N, a, b)`.
pub fn imaginary_visible(d: i64, t: i128) -> Vec<(i128, i128)> {
    let f = Field::new(d);
    let r = 2 * isqrt(t as u128) as i128 + 2;
    let mut out = Vec::new();
    for b in 0..=r {
        for a in -r..=r {
            let canonical = b > 0 || (a, b) == (1, 0);
            if canonical && gcd(a, b) == 1 && f.norm(a, b) <= t {
                out.push((a, b));
            }
        }
    }
    out.sort_by_key(|&(a, b)| (f.norm(a, b), a, b));
    out
}

/// `x ≥ |x̄|`, i.e. both `x + x̄ ≥ 0` and `x − x̄ ≥ 0`.
fn dominates_conjugate(f: &Field, x: (i128, i128)) -> bool {
    let (p, q) = f.parts(x.0, x.1);
    p >= 0 && q >= 0
}

/// Whether `α > 0` lies in the fundamental strip `|ᾱ| ≤ α < ε|ᾱ|`.
pub fn in_strip(f: &Field, eps: (i128, i128), x: (i128, i128)) -> bool {
    let n_eps = f.norm(eps.0, eps.1);
    let c = f.conj(eps);
    let eps_inv = (n_eps * c.0, n_eps * c.1);
    dominates_conjugate(f, x) && !dominates_conjugate(f, f.mul(x, eps_inv))
}

/// One visible representative per unit class of a real field with
/// `1 ≤ |N| ≤ t`, sorted by `(|N|, a, b)`.
pub fn real_classes(d: i64, t: i128) -> Vec<(i128, i128)> {
    let f = Field::new(d);
    let eps = fundamental_unit(d);
    let e = f.value(eps.0, eps.1);
    let s = (t as f64).sqrt();
    let rb = (2.0 * (1.0 + e) * s / (d as f64).sqrt()) as i128 + 2;
    let ra = (2.0 * (1.0 + e) * s) as i128 + rb + 2;
    let mut out = Vec::new();
    for b in -rb..=rb {
        for a in -ra..=ra {
            let n = f.norm(a, b).abs();
            if n >= 1 && n <= t && gcd(a, b) == 1 && in_strip(&f, eps, (a, b)) {
                out.push((a, b));
            }
        }
    }
    out.sort_by_key(|&(a, b)| (f.norm(a, b).abs(), a, b));
    out
}

/// `H(α/ᾱ)²` from the content of `N x² − Tr(α²) x + N`.
pub fn height_sq(d: i64, a: i128, b: i128) -> i128 {
    let f = Field::new(d);
    let (p, q) = f.parts(a, b);
    let n = f.norm(a, b);
    let tr_sq = (p * p + f.d * q * q) / 2;
    n.abs() / gcd(n, tr_sq)
}

/// `‖ε^n‖` for `n = 1..=n_max` from `|ε̄^n| = 1/ε^n`.
pub fn unit_power_distances(d: i64, n_max: u32) -> Vec<f64> {
    let f = Field::new(d);
    let eps = fundamental_unit(d);
    let mut x = (1, 0);
    let mut out = Vec::new();
    for _ in 0..n_max {
        x = f.mul(x, eps);
        let small = 1.0 / f.value(x.0, x.1);
        out.push(small.min(1.0 - small));
    }
    out
}
