//! Miller–Rabin primality with a deterministic witness set below
//! 3 317 044 064 679 887 385 961 981 and seeded random witnesses above it.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Bases 2..=41 are a complete witness set for every n below this bound
/// (Sorenson & Webster).
pub const DETERMINISTIC_BOUND: &str = "3317044064679887385961981";

const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// 64 random rounds bound the false-positive probability by 4^-64 = 2^-128.
pub const PROBABILISTIC_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    /// Exact answer.
    Deterministic,
    /// Composite answers are exact; a "prime" answer may be wrong with
    /// probability below 2^-128.
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimalityVerdict {
    pub is_prime: bool,
    pub certainty: Certainty,
}

pub fn is_prime_certified(n: &BigUint) -> Result<PrimalityVerdict> {
    if *n < BigUint::from(2u32) {
        return Err(invalid(format!("primality test needs n >= 2, got {n}")));
    }
    let det = |is_prime| PrimalityVerdict {
        is_prime,
        certainty: Certainty::Deterministic,
    };
    if let Some(small) = n.to_u64() {
        return Ok(det(is_prime_u64(small)));
    }
    for &p in &DETERMINISTIC_BASES {
        if (n % p).is_zero() {
            return Ok(det(false));
        }
    }
    let bound: BigUint = DETERMINISTIC_BOUND.parse().unwrap();
    if *n < bound {
        let ok = DETERMINISTIC_BASES
            .iter()
            .all(|&b| strong_probable_prime(n, &BigUint::from(b)));
        return Ok(det(ok));
    }
    // Seed from n itself so the verdict is reproducible.
    let digest: u64 = n.iter_u64_digits().fold(0x9e37_79b9_7f4a_7c15, |h, d| {
        (h ^ d).wrapping_mul(0x1000_0000_01b3).rotate_left(17)
    });
    let mut rng = ChaCha20Rng::seed_from_u64(digest);
    let upper = n - 2u32;
    let two = BigUint::from(2u32);
    let mut is_prime = true;
    for _ in 0..PROBABILISTIC_ROUNDS {
        let a = rng.gen_biguint_range(&two, &upper);
        if !strong_probable_prime(n, &a) {
            is_prime = false;
            break;
        }
    }
    Ok(PrimalityVerdict {
        is_prime,
        certainty: if is_prime {
            Certainty::Probabilistic
        } else {
            Certainty::Deterministic
        },
    })
}

fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Smallest prime `>= start` (certified), scanning at most `max_steps`
/// candidates.
pub fn next_prime_from(start: &BigUint, max_steps: u64) -> Result<Option<(BigUint, Certainty)>> {
    let mut n = start.clone().max(BigUint::from(2u32));
    if n > BigUint::from(2u32) && n.is_even() {
        n += 1u32;
    }
    for _ in 0..max_steps {
        let v = is_prime_certified(&n)?;
        if v.is_prime {
            return Ok(Some((n, v.certainty)));
        }
        n += if n == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn known_values() {
        assert!(is_prime_certified(&big((1 << 31) - 1)).unwrap().is_prime);
        assert!(!is_prime_certified(&big(561)).unwrap().is_prime);
        assert!(is_prime_certified(&big(2)).unwrap().is_prime);
        assert!(is_prime_certified(&big(1)).is_err());
        assert!(is_prime_certified(&big(0)).is_err());
    }

    #[test]
    fn strong_pseudoprimes_to_small_bases_are_rejected() {
        // 3215031751 is a strong pseudoprime to bases 2, 3, 5 and 7.
        assert!(!is_prime_u64(3_215_031_751));
        // 3825123056546413051 fools bases 2..=23.
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
    }

    #[test]
    fn large_inputs() {
        // 2^75 + 33 is prime and below the deterministic bound.
        let p75 = (BigUint::one() << 75usize) + 33u32;
        let v = is_prime_certified(&p75).unwrap();
        assert!(v.is_prime);
        assert_eq!(v.certainty, Certainty::Deterministic);

        // 2^127 - 1 is above the bound, so the verdict is flagged.
        let m127 = (BigUint::one() << 127usize) - 1u32;
        let v = is_prime_certified(&m127).unwrap();
        assert!(v.is_prime);
        assert_eq!(v.certainty, Certainty::Probabilistic);

        let composite = &p75 * &p75;
        assert!(!is_prime_certified(&composite).unwrap().is_prime);
    }

    #[test]
    fn next_prime() {
        let (p, _) = next_prime_from(&big(1000), 100).unwrap().unwrap();
        assert_eq!(p, big(1009));
        let (p, _) = next_prime_from(&big(16), 100).unwrap().unwrap();
        assert_eq!(p, big(17));
        let (p, _) = next_prime_from(&big(0), 10).unwrap().unwrap();
        assert_eq!(p, big(2));
    }
}
