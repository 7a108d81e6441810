//! Small integer helpers shared by the enumeration and character code.

use num_bigint::{BigInt, Sign};
use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};

/// Quadratic residues modulo 64, 63, 65 and 11, used to reject non-squares
/// before taking an integer square root.
const fn residue_table<const M: usize>() -> [bool; M] {
    let mut t = [false; M];
    let mut i = 0;
    while i < M {
        t[(i * i) % M] = true;
        i += 1;
    }
    t
}

const SQ64: [bool; 64] = residue_table::<64>();
const SQ63: [bool; 63] = residue_table::<63>();
const SQ65: [bool; 65] = residue_table::<65>();
const SQ11: [bool; 11] = residue_table::<11>();

/// `Some(r)` with `r ≥ 0, r² = n` if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    match n.sign() {
        Sign::Minus => return None,
        Sign::NoSign => return Some(BigInt::zero()),
        Sign::Plus => {}
    }
    let low = n.iter_u64_digits().next().unwrap_or(0);
    if !SQ64[(low & 63) as usize] {
        return None;
    }
    // residues mod 63·65·11 in one reduction
    let r = (n % 45045u32).to_u32().expect("residue fits");
    if !SQ63[(r % 63) as usize] || !SQ65[(r % 65) as usize] || !SQ11[(r % 11) as usize] {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

pub fn isqrt_u64(n: u64) -> u64 {
    n.sqrt()
}

/// Möbius function.
pub fn mobius(mut n: u64) -> i64 {
    assert!(n > 0, "mobius(0) is undefined");
    let mut result = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            small.push(k);
            if k * k != n {
                large.push(n / k);
            }
        }
        k += 1;
    }
    small.extend(large.into_iter().rev());
    small
}
