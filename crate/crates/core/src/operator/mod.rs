//! Prime directional averages on `(Z/L)^2`, their maximal function, the
//! line decomposition behind the 1D-to-2D transfer, and empirical norms.

mod grid;
mod lines;
mod norms;

pub use grid::GridFunction;
pub use lines::{line_decompose, pull_back, transference_check, LineDecomposition, TransferenceReport};
pub use norms::{
    delta_precondition, delta_spread_value, empirical_norm, frequency_split, norm_sweep, FrequencySplit,
    NormReport, NormSweepRow, Preset, TestFamily,
};

use crate::arith::PrimeTable;
use crate::directions::DirectionSet;
use crate::error::{invalid, Result};
use crate::multiplier::{prime_weights, FoldedWeights};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::sync::Arc;

/// Which vectors of a direction set the operator averages along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionSource {
    /// The primitive integer directions `(m_i, n_i)`.
    Primitive,
    /// The rescaled integer vectors `A_tilde v_i`, reduced mod `L` on use.
    Rescaled,
}

/// Directions, the scale range `[k_min, k_max]` and the prime table.
#[derive(Debug, Clone)]
pub struct OperatorConfig {
    directions: Vec<(BigInt, BigInt)>,
    pub k_min: u32,
    pub k_max: u32,
    table: Arc<PrimeTable>,
}

impl OperatorConfig {
    pub fn new(directions: Vec<(BigInt, BigInt)>, k_min: u32, k_max: u32, table: Arc<PrimeTable>) -> Result<Self> {
        if directions.is_empty() {
            return Err(invalid("operator needs at least one direction"));
        }
        if directions.iter().any(|(x, y)| x == &BigInt::from(0) && y == &BigInt::from(0)) {
            return Err(invalid("directions must be nonzero"));
        }
        if k_min > k_max || k_max > 40 {
            return Err(invalid(format!("bad scale range [{k_min}, {k_max}]")));
        }
        if table.limit() < 1u64 << (k_max + 1) {
            return Err(invalid(format!(
                "sieve limit {} is below 2^(k_max+1) = {}",
                table.limit(),
                1u64 << (k_max + 1)
            )));
        }
        Ok(OperatorConfig {
            directions,
            k_min,
            k_max,
            table,
        })
    }

    pub fn from_direction_set(
        ds: &DirectionSet,
        source: DirectionSource,
        k_min: u32,
        k_max: u32,
        table: Arc<PrimeTable>,
    ) -> Result<Self> {
        let dirs = match source {
            DirectionSource::Primitive => ds
                .vectors
                .iter()
                .map(|r| (BigInt::from(r.m), BigInt::from(r.n)))
                .collect(),
            DirectionSource::Rescaled => ds.integer_vectors.clone(),
        };
        Self::new(dirs, k_min, k_max, table)
    }

    /// The same configuration restricted to the first `n` directions.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        Self::new(
            self.directions[..n.min(self.directions.len())].to_vec(),
            self.k_min,
            self.k_max,
            self.table.clone(),
        )
    }

    pub fn directions(&self) -> &[(BigInt, BigInt)] {
        &self.directions
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    pub fn scales(&self) -> impl Iterator<Item = u32> {
        self.k_min..=self.k_max
    }

    /// Direction `i` reduced mod `L`.
    pub fn direction_mod(&self, i: usize, side: usize) -> (i64, i64) {
        reduce(&self.directions[i], side)
    }
}

pub(crate) fn reduce(v: &(BigInt, BigInt), side: usize) -> (i64, i64) {
    let l = BigInt::from(side);
    let r = |x: &BigInt| {
        let m = x % &l;
        let m = if m < BigInt::from(0) { m + &l } else { m };
        m.to_i64().expect("residue fits")
    };
    (r(&v.0), r(&v.1))
}

/// `g(x) = sum_p f(x - p v) 2^-k phi(2^-k p) log p`, looping over primes.
pub fn average_along(f: &GridFunction, v: (i64, i64), k: u32, cfg: &OperatorConfig) -> Result<GridFunction> {
    let weights = prime_weights(k, cfg.table())?;
    Ok(average_with_weights(f, v, &weights))
}

pub(crate) fn average_with_weights(f: &GridFunction, v: (i64, i64), weights: &[(u64, f64)]) -> GridFunction {
    let l = f.side();
    let li = l as i64;
    let shifts: Vec<(i64, i64, f64)> = weights
        .iter()
        .map(|&(p, w)| {
            let p = (p % l as u64) as i64;
            ((p * v.0).rem_euclid(li), (p * v.1).rem_euclid(li), w)
        })
        .collect();
    let vals = f.values();
    let out: Vec<Complex64> = (0..l)
        .into_par_iter()
        .flat_map_iter(|i| {
            let shifts = &shifts;
            (0..l).map(move |j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(dx, dy, w) in shifts {
                    let a = (i as i64 - dx).rem_euclid(li) as usize;
                    let b = (j as i64 - dy).rem_euclid(li) as usize;
                    acc += vals[a * l + b] * w;
                }
                acc
            })
        })
        .collect();
    GridFunction::new(l, out).expect("finite averages")
}

/// The same average as a Fourier multiplier `m_k(v . xi / L)`.
pub fn spectral_average(f: &GridFunction, v: (i64, i64), k: u32, cfg: &OperatorConfig) -> Result<GridFunction> {
    let l = f.side();
    let table = FoldedWeights::new(cfg.table(), k, l as u64)?.dft();
    let li = l as i64;
    let mut spec = f.fft();
    for (idx, z) in spec.iter_mut().enumerate() {
        let (a, b) = ((idx / l) as i64, (idx % l) as i64);
        *z *= table[(v.0 * a + v.1 * b).rem_euclid(li) as usize];
    }
    GridFunction::from_spectrum(l, spec)
}

/// How [`maximal_op`] evaluates each average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    #[default]
    Spatial,
    Spectral,
}

/// `sup_{k, v} |average_along(f, v, k)|` over the configured range.
pub fn maximal_op(f: &GridFunction, cfg: &OperatorConfig) -> Result<GridFunction> {
    maximal_op_with(f, cfg, Evaluation::Spatial)
}

pub fn maximal_op_with(f: &GridFunction, cfg: &OperatorConfig, eval: Evaluation) -> Result<GridFunction> {
    let l = f.side();
    let jobs: Vec<((i64, i64), u32)> = (0..cfg.directions.len())
        .flat_map(|i| cfg.scales().map(move |k| (i, k)))
        .map(|(i, k)| (cfg.direction_mod(i, l), k))
        .collect();
    let parts: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(v, k)| {
            let g = match eval {
                Evaluation::Spatial => average_along(f, v, k, cfg)?,
                Evaluation::Spectral => spectral_average(f, v, k, cfg)?,
            };
            Ok(g.values().iter().map(|z| z.norm()).collect())
        })
        .collect::<Result<_>>()?;
    let mut sup = vec![0.0f64; l * l];
    for p in parts {
        for (s, x) in sup.iter_mut().zip(p) {
            *s = s.max(x);
        }
    }
    GridFunction::new(l, sup.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
}
