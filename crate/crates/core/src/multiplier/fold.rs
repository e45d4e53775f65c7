//! Prime weights at scale `k`, folded modulo a period, and the grid
//! evaluation of `m_k` built on them.

use crate::arith::PrimeTable;
use crate::bumps::eval_phi;
use crate::error::{invalid, Result};
use crate::numeric::{ComplexKahan, KahanSum};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// `(p, 2^-k phi(2^-k p) log p)` for the primes in `[2^k, 2^(k+1)]`.
pub fn prime_weights(k: u32, table: &PrimeTable) -> Result<Vec<(u64, f64)>> {
    if k > 40 {
        return Err(invalid(format!("scale k = {k} is out of range")));
    }
    let lo = 1u64 << k;
    let hi = 1u64 << (k + 1);
    if table.limit() < hi {
        return Err(invalid(format!(
            "sieve limit {} is below 2^(k+1) = {hi}",
            table.limit()
        )));
    }
    let scale = (lo as f64).recip();
    Ok(table
        .primes_between(lo, hi)
        .map(|(p, lp)| (p, scale * eval_phi(p as f64 * scale) * lp))
        .filter(|&(_, w)| w != 0.0)
        .collect())
}

/// `W(r) = sum of w(p) over p = r mod L`.
#[derive(Debug, Clone)]
pub struct FoldedWeights {
    modulus: u64,
    weights: Vec<f64>,
}

impl FoldedWeights {
    pub fn new(table: &PrimeTable, k: u32, modulus: u64) -> Result<Self> {
        Ok(Self::from_weights(&prime_weights(k, table)?, modulus))
    }

    pub fn from_weights(weights: &[(u64, f64)], modulus: u64) -> Self {
        assert!(modulus >= 1);
        let mut acc = vec![KahanSum::default(); modulus as usize];
        for &(p, w) in weights {
            acc[(p % modulus) as usize].add(w);
        }
        FoldedWeights {
            modulus,
            weights: acc.iter().map(KahanSum::value).collect(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `m_k(j / L)` for every `j` in `0..L`, by one length-`L` DFT.
    pub fn dft(&self) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self
            .weights
            .iter()
            .map(|&w| Complex64::new(w, 0.0))
            .collect();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
        buf
    }

    /// `m_k(a / L)` for a single residue, in `O(L)`.
    pub fn eval(&self, a: u64) -> Complex64 {
        let l = self.modulus as u128;
        let mut acc = ComplexKahan::default();
        for (r, &w) in self.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let ph = ((r as u128 * a as u128) % l) as f64 / l as f64;
            let (s, c) = (TAU * ph).sin_cos();
            acc.add(Complex64::new(c, -s) * w);
        }
        acc.value()
    }
}

/// `m_k` on the grid `{j / L}` via the folded transform.
pub fn m_k_grid(k: u32, grid_len: u64, table: &PrimeTable) -> Result<Vec<Complex64>> {
    if grid_len == 0 {
        return Err(invalid("grid length must be positive"));
    }
    Ok(FoldedWeights::new(table, k, grid_len)?.dft())
}

/// `m_k` on the grid `{j / L}` by summing over primes at every point.
/// Reference path for [`m_k_grid`].
pub fn m_k_grid_naive(k: u32, grid_len: u64, table: &PrimeTable) -> Result<Vec<Complex64>> {
    if grid_len == 0 {
        return Err(invalid("grid length must be positive"));
    }
    let weights = prime_weights(k, table)?;
    let l = grid_len as usize;
    let roots: Vec<Complex64> = (0..l)
        .map(|r| {
            let (s, c) = (TAU * r as f64 / l as f64).sin_cos();
            Complex64::new(c, -s)
        })
        .collect();
    let residues: Vec<(usize, f64)> = weights
        .iter()
        .map(|&(p, w)| ((p % grid_len) as usize, w))
        .collect();
    Ok((0..l)
        .into_par_iter()
        .map(|j| {
            let mut acc = ComplexKahan::default();
            for &(r, w) in &residues {
                acc.add(roots[(r * j) % l] * w);
            }
            acc.value()
        })
        .collect())
}
