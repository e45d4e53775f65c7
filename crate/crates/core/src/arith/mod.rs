//! Arithmetic substrate: sieve, Möbius and totient, dyadic Farey levels and
//! the exact exponential-sum identities behind the multiplier decomposition.

pub mod fraction;
pub mod primality;
pub mod sieve;

use num_complex::Complex64;

pub use fraction::{
    farey_level, farey_level_capped, farey_level_size, level_of, FareyLevel, Frequency,
    ReducedFraction,
};
pub use primality::{is_prime_certified, Certainty, PrimalityVerdict};
pub use sieve::{sieve_primes, PrimeTable};

/// `gcd(a, b) >= 0` with `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> u64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs())
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization `[(p, e)]` by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function. `q` must be positive.
pub fn mobius(q: u64) -> i32 {
    assert!(q >= 1, "mobius is defined for q >= 1");
    let f = factorize(q);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient. `q` must be positive.
pub fn totient(q: u64) -> u64 {
    assert!(q >= 1, "totient is defined for q >= 1");
    factorize(q)
        .into_iter()
        .fold(q, |acc, (p, _)| acc / p * (p - 1))
}

/// Positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `sum_{a=1}^{q} e(n a / q)`, which is `q` when `q | n` and `0` otherwise.
/// Decided by a divisibility test, never by floating summation.
pub fn full_exponential_sum(q: u64, n: i64) -> Complex64 {
    assert!(q >= 1, "q must be positive");
    if (n as i128).rem_euclid(q as i128) == 0 {
        Complex64::new(q as f64, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Ramanujan sum `c_q(n)` via `mu(q/g) phi(q) / phi(q/g)`, `g = gcd(n, q)`.
pub fn ramanujan_sum(q: u64, n: i64) -> f64 {
    assert!(q >= 1, "q must be positive");
    let g = gcd_u64(n.unsigned_abs(), q);
    let g = if n == 0 { q } else { g };
    let r = q / g;
    mobius(r) as f64 * totient(q) as f64 / totient(r) as f64
}

/// Ramanujan sum by direct summation over residues coprime to `q`, with the
/// phase `n a mod q` reduced exactly before taking the cosine.
pub fn ramanujan_sum_direct(q: u64, n: i64) -> f64 {
    assert!(q >= 1, "q must be positive");
    let nq = (n as i128).rem_euclid(q as i128) as u128;
    let mut acc = crate::numeric::KahanSum::default();
    for a in 1..=q {
        if gcd_u64(a, q) == 1 {
            let r = (nq * a as u128 % q as u128) as f64 / q as f64;
            acc.add((std::f64::consts::TAU * r).cos());
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(7), -1);
        assert_eq!(totient(1), 1);
        assert_eq!(totient(9), 6);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(17, 31), 1);
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(-12, 18), 6);
    }

    #[test]
    fn totient_100_by_gcd_count() {
        let brute = (1..=100u64).filter(|&a| gcd_u64(a, 100) == 1).count() as u64;
        assert_eq!(brute, 40);
        assert_eq!(totient(100), brute);
    }

    #[test]
    fn exponential_sums() {
        assert_eq!(full_exponential_sum(4, 8).re, 4.0);
        assert_eq!(full_exponential_sum(4, 3).norm(), 0.0);
        assert_eq!(full_exponential_sum(7, 21).re, 7.0);
        assert_eq!(full_exponential_sum(7, -21).re, 7.0);
    }

    #[test]
    fn ramanujan_examples() {
        assert!((ramanujan_sum(3, 1) + 1.0).abs() < 1e-12);
        assert!((ramanujan_sum_direct(3, 1) + 1.0).abs() < 1e-12);
        for q in [1u64, 6, 10, 97] {
            assert_eq!(ramanujan_sum(q, 0), totient(q) as f64);
        }
        let brute = ramanujan_sum_direct(4, 2);
        assert!((brute + 2.0).abs() < 1e-12);
        assert_eq!(ramanujan_sum(4, 2), -2.0);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }
}
