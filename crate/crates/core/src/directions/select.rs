//! Seeded selection of the `(m, n)` pairs and of the prime subsets.

use crate::error::{construction, Result};
use num_integer::Integer;
use rand::Rng;
use std::collections::{HashMap, HashSet};

/// Lazily materialized Fisher–Yates permutation of `0..len`.
pub(crate) struct SparseShuffle {
    len: u128,
    next: u128,
    swapped: HashMap<u128, u128>,
}

impl SparseShuffle {
    pub fn new(len: u128) -> Self {
        SparseShuffle {
            len,
            next: 0,
            swapped: HashMap::new(),
        }
    }

    pub fn draw<R: Rng>(&mut self, rng: &mut R) -> Option<u128> {
        if self.next >= self.len {
            return None;
        }
        let i = self.next;
        let j = rng.gen_range(i..self.len);
        let at_j = *self.swapped.get(&j).unwrap_or(&j);
        let at_i = *self.swapped.get(&i).unwrap_or(&i);
        self.swapped.insert(j, at_i);
        self.swapped.remove(&i);
        self.next += 1;
        Some(at_j)
    }
}

/// Lattice points `(m, n)` with `m, n > 0`, `1/4 <= n/m <= 1/2` and
/// `N^2/10 <= |(m, n)| <= 10 N^2`, enumerated lexicographically.
pub struct AdmissibleRegion {
    /// `(m, n_lo, cumulative count before this column)` per nonempty column.
    columns: Vec<(u64, u64, u128)>,
    total: u128,
}

impl AdmissibleRegion {
    pub fn new(n: u64) -> Self {
        let n4 = (n as u128).pow(4);
        let lo_sq = n4.div_ceil(100); // 100 |x|^2 >= N^4
        let hi_sq = 100 * n4;
        let m_max = 10 * n * n;
        let mut columns = Vec::new();
        let mut total = 0u128;
        for m in 1..=m_max {
            let m2 = (m as u128) * (m as u128);
            if m2 > hi_sq {
                break;
            }
            // 4n >= m and 2n <= m.
            let mut lo = m.div_ceil(4);
            let mut hi = m / 2;
            if m2 < lo_sq {
                lo = lo.max(ceil_sqrt(lo_sq - m2));
            }
            hi = hi.min(floor_sqrt(hi_sq - m2));
            if lo == 0 {
                lo = 1;
            }
            if lo > hi {
                continue;
            }
            columns.push((m, lo, total));
            total += (hi - lo + 1) as u128;
        }
        AdmissibleRegion { columns, total }
    }

    pub fn len(&self) -> u128 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// The `rank`-th admissible pair in lexicographic order.
    pub fn nth(&self, rank: u128) -> (u64, u64) {
        assert!(rank < self.total);
        let c = self.columns.partition_point(|&(_, _, start)| start <= rank) - 1;
        let (m, lo, start) = self.columns[c];
        (m, lo + (rank - start) as u64)
    }
}

pub(crate) fn floor_sqrt(x: u128) -> u64 {
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r as u64
}

fn ceil_sqrt(x: u128) -> u64 {
    let r = floor_sqrt(x);
    if (r as u128) * (r as u128) == x {
        r
    } else {
        r + 1
    }
}

/// `N` pairwise non-parallel admissible pairs: seeded shuffle of the
/// lexicographic enumeration with greedy rejection of parallel candidates.
pub fn select_mn_pairs<R: Rng>(n: u64, rng: &mut R) -> Result<Vec<(u64, u64)>> {
    let region = AdmissibleRegion::new(n);
    let mut shuffle = SparseShuffle::new(region.len());
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n as usize);
    while out.len() < n as usize {
        let Some(rank) = shuffle.draw(rng) else {
            return Err(construction(
                "non-parallel",
                format!("only {} non-parallel admissible pairs exist", out.len()),
            ));
        };
        let (m, k) = region.nth(rank);
        let g = m.gcd(&k);
        if seen.insert((m / g, k / g)) {
            out.push((m, k));
        }
    }
    Ok(out)
}

/// `C(n, k)`, or `None` on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        let num = (n - i) as u128;
        let g = acc.gcd(&((i + 1) as u128));
        let a = acc / g;
        let d = (i + 1) as u128 / g;
        acc = a.checked_mul(num / d)?;
        if num % d != 0 {
            return None;
        }
    }
    Some(acc)
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank_combination(n: u64, k: u64, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k as usize);
    let mut next = 0u64;
    for slot in 0..k {
        loop {
            let rest = binomial(n - next - 1, k - slot - 1).expect("binomial fits");
            if rank < rest {
                break;
            }
            rank -= rest;
            next += 1;
        }
        out.push(next as usize);
        next += 1;
    }
    out
}

/// `count` distinct `kappa`-subsets of a window of `window` primes.
pub fn select_prime_subsets<R: Rng>(
    window: usize,
    kappa: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    let total = binomial(window as u64, kappa as u64).ok_or_else(|| {
        construction("distinct-subsets", "C(window, kappa) overflows 128 bits")
    })?;
    if total < count as u128 {
        return Err(construction(
            "distinct-subsets",
            format!("C({window}, {kappa}) = {total} < {count}"),
        ));
    }
    let mut shuffle = SparseShuffle::new(total);
    Ok((0..count)
        .map(|_| {
            let r = shuffle.draw(rng).expect("enough subsets");
            unrank_combination(window as u64, kappa as u64, r)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(100, 50), Some(100891344545564193334812497256));
    }

    #[test]
    fn unranking_is_lexicographic() {
        let all: Vec<_> = (0..10).map(|r| unrank_combination(5, 2, r)).collect();
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[3], vec![0, 4]);
        assert_eq!(all[4], vec![1, 2]);
        assert_eq!(all[9], vec![3, 4]);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all);
    }

    #[test]
    fn sparse_shuffle_is_a_permutation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut s = SparseShuffle::new(50);
        let mut got: Vec<u128> = std::iter::from_fn(|| s.draw(&mut rng)).collect();
        got.sort();
        assert_eq!(got, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn region_matches_brute_force() {
        for n in [2u64, 3, 4] {
            let region = AdmissibleRegion::new(n);
            let n4 = (n as u128).pow(4);
            let mut brute = Vec::new();
            for m in 1..=10 * n * n {
                for k in 1..=m {
                    let r2 = (m as u128).pow(2) + (k as u128).pow(2);
                    if 4 * k >= m && 2 * k <= m && 100 * r2 >= n4 && r2 <= 100 * n4 {
                        brute.push((m, k));
                    }
                }
            }
            assert_eq!(region.len(), brute.len() as u128);
            for (i, p) in brute.iter().enumerate() {
                assert_eq!(region.nth(i as u128), *p);
            }
        }
    }
}
