//! Reduced fractions on the circle, the dyadic Farey levels
//! `{a/q : 2^s <= q < 2^(s+1), gcd(a, q) = 1}`, and continued-fraction tools
//! for locating nearby fractions without enumerating a level.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, totient};
use crate::error::{Error, Result};

/// `a/q` with `gcd(a, q) = 1` and `0 <= a < q`; zero is always `0/1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedFraction {
    a: u64,
    q: u64,
}

impl ReducedFraction {
    /// Reduce `a/q` modulo one. Panics on `q == 0`.
    pub fn new(a: i128, q: u64) -> Self {
        assert!(q > 0, "denominator must be positive");
        let a = a.rem_euclid(q as i128) as u64;
        if a == 0 {
            return ReducedFraction { a: 0, q: 1 };
        }
        let g = gcd_u64(a, q);
        ReducedFraction { a: a / g, q: q / g }
    }

    pub fn zero() -> Self {
        ReducedFraction { a: 0, q: 1 }
    }

    pub fn numer(&self) -> u64 {
        self.a
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.a as f64 / self.q as f64
    }
}

impl Ord for ReducedFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.a as u128 * other.q as u128).cmp(&(other.a as u128 * self.q as u128))
    }
}

impl PartialOrd for ReducedFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// All fractions of one dyadic level, sorted by value.
#[derive(Debug, Clone, PartialEq)]
pub struct FareyLevel {
    pub s: u32,
    pub fractions: Vec<ReducedFraction>,
}

/// Default cardinality cap for [`farey_level`] (about 1 GiB of fractions).
pub const DEFAULT_FAREY_CAP: u64 = 1 << 26;

/// Number of fractions in level `s`.
pub fn farey_level_size(s: u32) -> u64 {
    if s == 0 {
        return 1;
    }
    (1u64 << s..1u64 << (s + 1)).map(totient).sum()
}

pub fn farey_level(s: u32) -> Result<FareyLevel> {
    farey_level_capped(s, DEFAULT_FAREY_CAP)
}

pub fn farey_level_capped(s: u32, cap: u64) -> Result<FareyLevel> {
    if s >= 40 {
        return Err(Error::ResourceLimit(format!("level {s} is out of range")));
    }
    let size = farey_level_size(s);
    if size > cap {
        return Err(Error::ResourceLimit(format!(
            "level {s} has {size} fractions, cap is {cap}"
        )));
    }
    if s == 0 {
        return Ok(FareyLevel {
            s,
            fractions: vec![ReducedFraction::zero()],
        });
    }
    let mut fractions = Vec::with_capacity(size as usize);
    for q in 1u64 << s..1u64 << (s + 1) {
        fractions.extend(
            (1..q)
                .filter(|&a| gcd_u64(a, q) == 1)
                .map(|a| ReducedFraction { a, q }),
        );
    }
    fractions.sort_unstable();
    Ok(FareyLevel { s, fractions })
}

/// Level index of a denominator: `0` for `q = 1`, else `floor(log2 q)`.
pub fn level_of(q: u64) -> u32 {
    63 - q.leading_zeros()
}

/// A point of the circle kept exactly when it is rational with a small
/// denominator, or as a float otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    Float(f64),
    /// `num/den` with `den > 0`; not necessarily reduced.
    Rational { num: i64, den: u64 },
}

impl Frequency {
    pub fn rational(num: i64, den: u64) -> Self {
        assert!(den > 0, "denominator must be positive");
        Frequency::Rational { num, den }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Frequency::Float(x) => x,
            Frequency::Rational { num, den } => num as f64 / den as f64,
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(&self) -> f64 {
        match *self {
            Frequency::Float(x) => x - x.floor(),
            Frequency::Rational { num, den } => {
                (num as i128).rem_euclid(den as i128) as f64 / den as f64
            }
        }
    }

    /// Signed difference `self - a/q`, accurate even when it is far below the
    /// spacing of `f64` near `self`.
    pub fn offset_from(&self, a: i128, q: u64) -> f64 {
        match *self {
            Frequency::Float(x) => {
                let qf = q as f64;
                (x.mul_add(qf, -(a as f64))) / qf
            }
            Frequency::Rational { num, den } => {
                let n = num as i128 * q as i128 - a * den as i128;
                n as f64 / (den as f64 * q as f64)
            }
        }
    }

    /// Convergents `p/q` of the continued fraction of `frac(self)` with
    /// `q <= max_den`, in order of increasing denominator.
    pub fn convergents(&self, max_den: u64) -> Vec<(u64, u64)> {
        match *self {
            Frequency::Rational { num, den } => {
                let n = (num as i128).rem_euclid(den as i128) as u128;
                convergents_of(n, den as u128, max_den)
            }
            Frequency::Float(x) => {
                let f = x - x.floor();
                match dyadic_parts(f) {
                    Some((m, e)) => convergents_of(m, 1u128 << e, max_den),
                    // Below 2^-120 the only convergent in range is 0/1.
                    None => vec![(0, 1)],
                }
            }
        }
    }
}

impl From<f64> for Frequency {
    fn from(x: f64) -> Self {
        Frequency::Float(x)
    }
}

/// `x = m / 2^e` exactly, for `x` in `[0, 1)` with `e <= 127`.
fn dyadic_parts(x: f64) -> Option<(u128, u32)> {
    if x == 0.0 {
        return Some((0, 0));
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let mant = if exp == 0 {
        bits & ((1 << 52) - 1)
    } else {
        (bits & ((1 << 52) - 1)) | (1 << 52)
    };
    // x = mant * 2^(exp - 1075)
    let e = 1075 - exp.max(1);
    if e > 127 {
        return None;
    }
    let tz = mant.trailing_zeros().min(e as u32);
    Some(((mant >> tz) as u128, e as u32 - tz))
}

fn convergents_of(mut num: u128, mut den: u128, max_den: u64) -> Vec<(u64, u64)> {
    // h/k recurrences seeded with (1/0, 0/1).
    let (mut h0, mut h1) = (0u128, 1u128);
    let (mut k0, mut k1) = (1u128, 0u128);
    let mut out = Vec::new();
    loop {
        let a = num / den;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as u128 {
            break;
        }
        out.push((h2 as u64, k2 as u64));
        let r = num - a * den;
        if r == 0 {
            break;
        }
        num = den;
        den = r;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    out
}

/// The rational with the smallest denominator in the closed interval
/// `[lo, hi]` (with `lo <= hi`), via the continued-fraction descent of the
/// Stern–Brocot tree.
pub fn simplest_in_interval(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi, "empty interval");
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl.clone() + BigInt::one() <= *hi {
        return fl + BigInt::one();
    }
    // lo, hi both in (fl, fl + 1): x = fl + 1/y with y in [1/(hi-fl), 1/(lo-fl)].
    let y = simplest_in_interval(
        &(BigRational::one() / (hi - &fl)),
        &(BigRational::one() / (lo - &fl)),
    );
    fl + y.recip()
}

/// Exact rational value of an `f64`.
pub fn exact_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Reduce an exact rational modulo one into a [`ReducedFraction`]; `None` if
/// the denominator does not fit in a `u64`.
pub fn to_reduced_fraction(r: &BigRational) -> Option<ReducedFraction> {
    let q = r.denom().to_u64()?;
    let a = r.numer().mod_floor(&BigInt::from(q)).to_u64()?;
    Some(ReducedFraction::new(a as i128, q))
}
