//! Segmented, odd-only sieve of Eratosthenes and the immutable [`PrimeTable`]
//! it produces.
//!
//! Each segment covers `SEGMENT_BYTES` odd numbers, one byte per odd, so the
//! working set of the inner loop stays inside L2. Base primes up to
//! `sqrt(limit)` come from a plain sieve.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::arith::primality::is_prime_u64;
use crate::error::{invalid, Error, Result};

const SEGMENT_BYTES: usize = 256 * 1024;

const CACHE_MAGIC: &[u8; 4] = b"PDPT";
const CACHE_VERSION: u8 = 1;

/// Primes up to `limit` together with their natural-log weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    log_weights: Vec<f64>,
}

impl PrimeTable {
    fn from_primes(limit: u64, primes: Vec<u64>) -> Self {
        let log_weights = primes.iter().map(|&p| (p as f64).ln()).collect();
        PrimeTable {
            limit,
            primes,
            log_weights,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Index range of the primes in the closed interval `[lo, hi]`.
    pub fn index_range(&self, lo: u64, hi: u64) -> std::ops::Range<usize> {
        let start = self.primes.partition_point(|&p| p < lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        start..end.max(start)
    }

    /// `(prime, ln prime)` pairs in the closed interval `[lo, hi]`.
    pub fn primes_between(&self, lo: u64, hi: u64) -> impl Iterator<Item = (u64, f64)> + '_ {
        let r = self.index_range(lo, hi);
        self.primes[r.clone()]
            .iter()
            .copied()
            .zip(self.log_weights[r].iter().copied())
    }

    /// Membership by binary search; `n` must not exceed the table limit.
    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// Write the binary cache file: magic, version byte, little-endian limit,
    /// then every prime as a little-endian `u64`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&[CACHE_VERSION])?;
        w.write_all(&self.limit.to_le_bytes())?;
        for &p in &self.primes {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Load a cache file, revalidating its header, ordering, the stored limit
    /// and the primality of the final entry.
    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
        if bytes.len() < 13 || &bytes[..4] != CACHE_MAGIC {
            return Err(Error::Format("missing PDPT magic".into()));
        }
        if bytes[4] != CACHE_VERSION {
            return Err(Error::Format(format!(
                "unsupported prime cache version {}",
                bytes[4]
            )));
        }
        let limit = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
        let body = &bytes[13..];
        if body.len() % 8 != 0 {
            return Err(Error::Format("truncated prime entry".into()));
        }
        let primes: Vec<u64> = body
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if limit < 2 || primes.first() != Some(&2) {
            return Err(Error::Format("prime list must start at 2".into()));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("primes not strictly ascending".into()));
        }
        let last = *primes.last().unwrap();
        if last > limit {
            return Err(Error::Format(format!(
                "final prime {last} exceeds stored limit {limit}"
            )));
        }
        if !is_prime_u64(last) {
            return Err(Error::Format(format!("final entry {last} is not prime")));
        }
        // The next prime after `last` must lie beyond the limit, otherwise the
        // table is incomplete at the top end.
        let mut next = last + 1;
        while next <= limit {
            if is_prime_u64(next) {
                return Err(Error::Format(format!(
                    "prime {next} <= limit {limit} missing from cache"
                )));
            }
            next += 1;
        }
        Ok(PrimeTable::from_primes(limit, primes))
    }
}

/// Primes up to `limit` (inclusive).
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(invalid(format!("sieve limit must be >= 2, got {limit}")));
    }
    let limit_usize = usize::try_from(limit)
        .map_err(|_| invalid("sieve limit exceeds addressable memory"))?;
    let root = (limit as f64).sqrt() as usize + 1;
    let base = simple_sieve(root);

    let mut primes = Vec::with_capacity(estimate_count(limit));
    primes.push(2);

    // Segment covers odd numbers lo, lo+2, ..., one byte each.
    let mut segment = vec![true; SEGMENT_BYTES];
    let mut lo: usize = 3;
    while lo <= limit_usize {
        let span = SEGMENT_BYTES.min((limit_usize - lo) / 2 + 1);
        let seg = &mut segment[..span];
        seg.fill(true);
        let hi = lo + 2 * (span - 1);
        for &p in base.iter().skip(1) {
            let p = p as usize;
            if p * p > hi {
                break;
            }
            // First odd multiple of p that is >= max(p*p, lo).
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = (start - lo) / 2;
            while idx < span {
                seg[idx] = false;
                idx += p;
            }
        }
        primes.extend(
            seg.iter()
                .enumerate()
                .filter(|&(_, &is_p)| is_p)
                .map(|(i, _)| (lo + 2 * i) as u64),
        );
        lo = hi + 2;
    }
    Ok(PrimeTable::from_primes(limit, primes))
}

fn simple_sieve(n: usize) -> Vec<u32> {
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter(|&(_, &b)| b)
        .map(|(i, _)| i as u32)
        .collect()
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// Cache directory from `PD_CACHE_DIR`, falling back to the system temp dir.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os("PD_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("primedir-cache"))
}

/// Load the smallest cached table covering `limit` from `dir`, or sieve and
/// persist one. Returns the table and whether it was freshly built.
pub fn load_or_build(dir: &Path, limit: u64) -> Result<(PrimeTable, bool)> {
    let path = dir.join(format!("primes-{limit}.pdpt"));
    if path.exists() {
        let table = PrimeTable::load(&path)?;
        if table.limit() >= limit {
            return Ok((table, false));
        }
    }
    let table = sieve_primes(limit)?;
    std::fs::create_dir_all(dir)?;
    // Write to a sibling and rename so a concurrent reader never sees a
    // partial file.
    let tmp = dir.join(format!("primes-{limit}.pdpt.tmp{}", std::process::id()));
    table.save(&tmp)?;
    std::fs::rename(&tmp, &path)?;
    Ok((table, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn small_limits() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_primes(3).unwrap().primes(), &[2, 3]);
        assert!(matches!(sieve_primes(1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn matches_trial_division_across_segment_boundaries() {
        // Spans more than one segment (2 * 256 Ki odd numbers).
        let limit = 1_100_000;
        let table = sieve_primes(limit).unwrap();
        let oracle: Vec<u64> = (2..=limit).filter(|&n| trial_division(n)).collect();
        assert_eq!(table.primes(), oracle.as_slice());
    }

    #[test]
    fn million() {
        let t = sieve_primes(1_000_000).unwrap();
        assert_eq!(t.len(), 78498);
        assert_eq!(*t.primes().last().unwrap(), 999_983);
        assert!(trial_division(999_983));
        for (p, w) in t.primes().iter().zip(t.log_weights()) {
            assert!(((*p as f64).ln() - w).abs() <= 1e-14 * w.abs());
        }
    }

    #[test]
    fn index_range_is_closed() {
        let t = sieve_primes(100).unwrap();
        let got: Vec<u64> = t.primes_between(11, 29).map(|(p, _)| p).collect();
        assert_eq!(got, vec![11, 13, 17, 19, 23, 29]);
        assert_eq!(t.primes_between(24, 28).count(), 0);
    }

    #[test]
    fn cache_round_trip_and_rejection() {
        let dir = tempfile::tempdir().unwrap();
        let t = sieve_primes(5000).unwrap();
        let path = dir.path().join("t.pdpt");
        t.save(&path).unwrap();
        assert_eq!(PrimeTable::load(&path).unwrap(), t);

        // Drop the last prime: the loader must notice the gap below the limit.
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 8);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(PrimeTable::load(&path), Err(Error::Format(_))));

        std::fs::write(&path, b"XXXX").unwrap();
        assert!(PrimeTable::load(&path).is_err());
    }

    #[test]
    fn load_or_build_persists() {
        let dir = tempfile::tempdir().unwrap();
        let (a, fresh) = load_or_build(dir.path(), 1 << 12).unwrap();
        assert!(fresh);
        let (b, fresh) = load_or_build(dir.path(), 1 << 12).unwrap();
        assert!(!fresh);
        assert_eq!(a, b);
    }
}
