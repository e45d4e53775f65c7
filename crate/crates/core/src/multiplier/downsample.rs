//! Spatial coefficients of the downsampled symbol
//! `c(n) = q ∫ V_k(beta) chi(2^e beta) e(q n beta) d beta`.

use crate::bumps::{bump_spec, chi_exponent, eval_chi};
use crate::error::{Error, Result};
use crate::numeric::ComplexKahan;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::TAU;
use std::ops::RangeInclusive;

/// Largest transform length accepted by [`DownsampledSymbol::new`].
pub const MAX_TRANSFORM: usize = 1 << 24;

/// Tail allowance, in units of the cutoff width `2^-e`, for the spread of the
/// cutoff's transform.
const SPREAD: f64 = 256.0;

fn two_pow(e: i32) -> f64 {
    f64::powi(2.0, e)
}

/// `V(2^k beta) chi(2^e beta)`.
fn product_profile(k: u32, e: i32, beta: f64) -> Result<Complex64> {
    let c = eval_chi(beta * two_pow(e));
    if c == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(bump_spec().profile(beta * two_pow(k as i32))? * c)
}

/// Every coefficient of the symbol with cutoff `chi(2^e .)`, over the range
/// of `n` outside which they are negligible.
#[derive(Debug, Clone)]
pub struct DownsampledSymbol {
    pub k: u32,
    pub cutoff_exp: i32,
    pub q: u64,
    n_lo: i64,
    coeffs: Vec<Complex64>,
}

impl DownsampledSymbol {
    pub fn new(k: u32, cutoff_exp: i32, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(crate::error::invalid("q must be positive"));
        }
        let qf = q as f64;
        let spread = SPREAD * two_pow(cutoff_exp);
        let lo = (-two_pow(k as i32 + 1) - spread) / qf;
        let hi = (-two_pow(k as i32) + spread) / qf;
        let span = hi - lo + 2.0;
        if !(span <= MAX_TRANSFORM as f64) {
            return Err(Error::ResourceLimit(format!(
                "downsampled symbol needs {span:e} coefficients (cap {MAX_TRANSFORM})"
            )));
        }
        let n_lo = lo.floor() as i64;
        let p = (span.ceil() as usize).next_power_of_two().max(64);
        // Trapezoid rule with spacing 1/(qP); aliasing folds n modulo P.
        let delta = 1.0 / (qf * p as f64);
        let half = two_pow(-cutoff_exp - 1);
        let j_max = (half / delta).ceil() as i64;
        let mut buckets = vec![Complex64::new(0.0, 0.0); p];
        for j in -j_max..=j_max {
            let g = product_profile(k, cutoff_exp, j as f64 * delta)?;
            buckets[j.rem_euclid(p as i64) as usize] += g;
        }
        FftPlanner::new().plan_fft_inverse(p).process(&mut buckets);
        let count = (hi.ceil() as i64 - n_lo + 1) as usize;
        let coeffs = (0..count.min(p))
            .map(|t| {
                let n = n_lo + t as i64;
                buckets[n.rem_euclid(p as i64) as usize] / p as f64
            })
            .collect();
        Ok(DownsampledSymbol {
            k,
            cutoff_exp,
            q,
            n_lo,
            coeffs,
        })
    }

    pub fn n_range(&self) -> RangeInclusive<i64> {
        self.n_lo..=self.n_lo + self.coeffs.len() as i64 - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c(n)`; zero outside [`Self::n_range`].
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let t = n - self.n_lo;
        if t < 0 || t as usize >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[t as usize]
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn sum(&self) -> Complex64 {
        let mut acc = ComplexKahan::default();
        for c in &self.coeffs {
            acc.add(*c);
        }
        acc.value()
    }

    /// `sum_m V_k(m/q) chi(2^e m/q)`, the periodized symbol at zero.
    pub fn periodized_at_zero(&self) -> Result<Complex64> {
        let half = two_pow(-self.cutoff_exp - 1);
        let m_max = (half * self.q as f64).ceil() as i64;
        let mut acc = ComplexKahan::default();
        for m in -m_max..=m_max {
            acc.add(product_profile(
                self.k,
                self.cutoff_exp,
                m as f64 / self.q as f64,
            )?);
        }
        Ok(acc.value())
    }
}

/// The coefficient of the downsampled symbol with cutoff `chi_{k0}` at `n`.
pub fn downsampled_multiplier(k: u32, k0: u32, q: u64, n: i64) -> Result<Complex64> {
    coefficient_direct(k, chi_exponent(k0), q, n)
}

/// Single coefficient by the trapezoid rule in `u = 2^e beta`.
pub(crate) fn coefficient_direct(k: u32, e: i32, q: u64, n: i64) -> Result<Complex64> {
    if q == 0 {
        return Err(crate::error::invalid("q must be positive"));
    }
    // Phase rate of e(q n 2^-e u) plus the bandwidth of V(2^(k-e) u).
    let theta = q as f64 * n as f64 * two_pow(-e);
    let band = theta.abs() + two_pow(k as i32 + 1 - e) + SPREAD;
    let m = (2.0 * band).ceil();
    if m > MAX_TRANSFORM as f64 {
        return Err(Error::Precision(format!(
            "coefficient at n = {n} needs {m:e} nodes"
        )));
    }
    let m = m as i64;
    let du = 1.0 / m as f64;
    let mut acc = ComplexKahan::default();
    for j in -(m / 2)..=m / 2 {
        let u = j as f64 * du;
        let c = eval_chi(u);
        if c == 0.0 {
            continue;
        }
        let v = bump_spec().profile(u * two_pow(k as i32 - e))?;
        let ph = (theta * u).rem_euclid(1.0);
        let (s, co) = (TAU * ph).sin_cos();
        acc.add(v * Complex64::new(co, s) * c);
    }
    Ok(acc.value() * (q as f64 * two_pow(-e) * du))
}
