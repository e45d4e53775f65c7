//! The multiplier `m_k(alpha) = sum_p e(-p alpha) 2^-k phi(2^-k p) log p`,
//! its main term `L_k` built from Ramanujan-type weights near fractions, the
//! remainder `E_k = m_k - L_k`, and arc classification.

mod downsample;
mod fold;
mod profile;

pub use downsample::{downsampled_multiplier, DownsampledSymbol};
pub use fold::{m_k_grid, m_k_grid_naive, prime_weights, FoldedWeights};
pub use profile::{
    error_profile, fraction_grid, write_error_csv, ErrorProfileConfig, ErrorProfileRow,
};

use crate::arith::fraction::{exact_rational, simplest_in_interval, to_reduced_fraction};
use crate::arith::{level_of, mobius, totient, Frequency, PrimeTable, ReducedFraction};
use crate::bumps::{bump_spec, chi_s};
use crate::error::{invalid, Result};
use crate::numeric::{frac_mul, ComplexKahan};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::TAU;

/// Default exponent `D` in the arc width `2^-k k^D`.
pub const DEFAULT_D: f64 = 17.0;
/// Largest level summed in `L_k` unless configured otherwise.
pub const S_MAX_CAP: u32 = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    M,
    L,
    E,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub d: f64,
    pub s_max: u32,
    /// `2^(s_max + 1) <= k^D`: some major-arc denominators are not summed.
    pub truncated: bool,
    pub k_v: Option<u32>,
    pub n: Option<u64>,
    pub eps: Option<f64>,
}

/// Samples of `m_k`, `L_k` or `E_k` on a grid of the circle.
#[derive(Debug, Clone)]
pub struct MultiplierProfile {
    pub kind: ProfileKind,
    pub k: u32,
    pub grid: Vec<Frequency>,
    pub values: Vec<Complex64>,
    pub params: ProfileParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcKind {
    Major,
    Minor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcLabel {
    pub kind: ArcKind,
    pub fraction: Option<ReducedFraction>,
}

impl ArcLabel {
    pub fn is_major(&self) -> bool {
        self.kind == ArcKind::Major
    }
}

/// `m_k(alpha)` by direct summation over the primes in `[2^k, 2^(k+1)]`.
pub fn m_k(k: u32, alpha: impl Into<Frequency>, table: &PrimeTable) -> Result<Complex64> {
    let weights = prime_weights(k, table)?;
    Ok(m_from_weights(&weights, alpha.into()))
}

pub(crate) fn m_from_weights(weights: &[(u64, f64)], alpha: Frequency) -> Complex64 {
    let mut acc = ComplexKahan::default();
    match alpha {
        Frequency::Float(x) => {
            for &(p, w) in weights {
                let (s, c) = (TAU * frac_mul(p as f64, x)).sin_cos();
                acc.add(Complex64::new(c, -s) * w);
            }
        }
        Frequency::Rational { num, den } => {
            let d = den as i128;
            let n = (num as i128).rem_euclid(d);
            for &(p, w) in weights {
                let r = (p as i128 * n) % d;
                let (s, c) = (TAU * (r as f64 / den as f64)).sin_cos();
                acc.add(Complex64::new(c, -s) * w);
            }
        }
    }
    acc.value()
}

/// `m_k` at many points. Rational points sharing a reduced denominator are
/// served from one fold of the weights.
pub fn m_k_many(k: u32, points: &[Frequency], table: &PrimeTable) -> Result<Vec<Complex64>> {
    use rayon::prelude::*;
    let weights = prime_weights(k, table)?;
    let mut by_den: HashMap<u64, Vec<(usize, u64)>> = HashMap::new();
    let mut out = vec![Complex64::zero(); points.len()];
    let mut floats = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        match *pt {
            Frequency::Rational { num, den } if den <= 1 << 24 => {
                let f = ReducedFraction::new(num as i128, den);
                by_den.entry(f.denom()).or_default().push((i, f.numer()));
            }
            _ => floats.push(i),
        }
    }
    let groups: Vec<(u64, Vec<(usize, u64)>)> = by_den.into_iter().collect();
    let evaluated: Vec<Vec<(usize, Complex64)>> = groups
        .par_iter()
        .map(|(q, members)| {
            let fold = FoldedWeights::from_weights(&weights, *q);
            let direct = members.len() as f64 * *q as f64;
            let fft = *q as f64 * (*q as f64).log2().max(1.0) * 4.0;
            if direct > fft {
                let all = fold.dft();
                members.iter().map(|&(i, a)| (i, all[a as usize])).collect()
            } else {
                members.iter().map(|&(i, a)| (i, fold.eval(a))).collect()
            }
        })
        .collect();
    for (i, v) in evaluated.into_iter().flatten() {
        out[i] = v;
    }
    let fl: Vec<(usize, Complex64)> = floats
        .par_iter()
        .map(|&i| (i, m_from_weights(&weights, points[i])))
        .collect();
    for (i, v) in fl {
        out[i] = v;
    }
    Ok(out)
}

/// Smallest `s` with `2^(s+1) > k^D`, capped at [`S_MAX_CAP`]. The flag is
/// set when the cap bites.
pub fn default_s_max(k: u32, d: f64) -> (u32, bool) {
    let bits = d * (k.max(1) as f64).log2();
    // 2^(s+1) > k^D  <=>  s + 1 > D log2 k
    let s = (bits.floor() as i64).max(0) as u64;
    if s > S_MAX_CAP as u64 {
        (S_MAX_CAP, true)
    } else {
        (s as u32, false)
    }
}

/// Integer part and the candidate fractions `a/q` (with `a` absolute, not
/// reduced mod 1) among the convergents of `alpha` with `q < 2^(s_max+1)`.
fn candidate_fractions(alpha: Frequency, s_max: u32) -> Vec<(i128, u64)> {
    let floor = match alpha {
        Frequency::Float(x) => x.floor() as i128,
        Frequency::Rational { num, den } => (num as i128).div_euclid(den as i128),
    };
    let max_den = if s_max >= 63 { u64::MAX } else { (1u64 << (s_max + 1)) - 1 };
    alpha
        .convergents(max_den)
        .into_iter()
        .map(|(a, q)| (a as i128 + floor * q as i128, q))
        .collect()
}

/// The unique fraction of level `s` whose cutoff `chi_s` covers `alpha`,
/// together with the offset `alpha - a/q`.
pub fn locate_fraction(s: u32, alpha: Frequency) -> Option<(ReducedFraction, f64)> {
    candidate_fractions(alpha, s)
        .into_iter()
        .filter(|&(_, q)| level_of(q) == s)
        .map(|(a, q)| (ReducedFraction::new(a, q), alpha.offset_from(a, q)))
        .find(|&(_, off)| chi_s(s, off) != 0.0)
}

fn main_term(k: u32, f: ReducedFraction, s: u32, off: f64) -> Result<Complex64> {
    let q = f.denom();
    let c = chi_s(s, off);
    if c == 0.0 {
        return Ok(Complex64::zero());
    }
    let mu = mobius(q);
    if mu == 0 {
        return Ok(Complex64::zero());
    }
    // m_k carries e(-p alpha), so its profile near a/q is V_k(a/q - alpha).
    let v = bump_spec().profile(-off * f64::powi(2.0, k as i32))?;
    Ok(v * (mu as f64 / totient(q) as f64 * c))
}

/// `L_{k,s}(alpha)`: the single term of level `s` that can be nonzero.
pub fn l_k_s(k: u32, s: u32, alpha: impl Into<Frequency>) -> Result<Complex64> {
    match locate_fraction(s, alpha.into()) {
        Some((f, off)) => main_term(k, f, s, off),
        None => Ok(Complex64::zero()),
    }
}

/// `L_k(alpha) = sum_{s <= s_max} L_{k,s}(alpha)`.
pub fn l_k(k: u32, alpha: impl Into<Frequency>, s_max: u32) -> Result<Complex64> {
    let alpha = alpha.into();
    let mut acc = Complex64::zero();
    for (a, q) in candidate_fractions(alpha, s_max) {
        let s = level_of(q);
        let off = alpha.offset_from(a, q);
        acc += main_term(k, ReducedFraction::new(a, q), s, off)?;
    }
    Ok(acc)
}

/// Major arc test at `k` with exponent `D`: is there a reduced `a/q` with
/// `q <= k^D` and `|alpha - a/q| <= 2^-k k^D`?
pub fn classify_arc(alpha: impl Into<Frequency>, k: u32, d: f64) -> ArcLabel {
    classify_arc_exact(&frequency_to_rational(alpha.into()), k, d)
}

/// [`classify_arc`] for an exact rational `alpha`.
pub fn classify_arc_exact(alpha: &BigRational, k: u32, d: f64) -> ArcLabel {
    assert!(d > 0.0, "D must be positive");
    let minor = ArcLabel {
        kind: ArcKind::Minor,
        fraction: None,
    };
    let Some((radius, q_max)) = arc_bounds(k, d) else {
        return minor;
    };
    let best = simplest_in_interval(&(alpha - &radius), &(alpha + &radius));
    if best.denom() > &q_max {
        return minor;
    }
    let fraction = to_reduced_fraction(&best).expect("denominator bounded by k^D");
    ArcLabel {
        kind: ArcKind::Major,
        fraction: Some(fraction),
    }
}

/// `(2^-k k^D, floor(k^D))`, exact when `D` is an integer.
fn arc_bounds(k: u32, d: f64) -> Option<(BigRational, BigInt)> {
    if k == 0 {
        return None;
    }
    let two_k = BigInt::one() << k as usize;
    if d.fract() == 0.0 && d <= 4096.0 {
        let kd = num_traits::pow(BigInt::from(k), d as usize);
        return Some((BigRational::new(kd.clone(), two_k), kd));
    }
    let kd = (k as f64).powf(d);
    if !(kd >= 1.0) || !kd.is_finite() {
        return None;
    }
    let radius = exact_rational(kd) / BigRational::from_integer(two_k);
    let q_max = exact_rational(kd.floor()).to_integer();
    Some((radius, q_max))
}

/// Denominator bound `k^D` used by [`classify_arc`], saturating at `u64::MAX`.
pub fn arc_denominator_bound(k: u32, d: f64) -> u64 {
    let kd = (k as f64).powf(d);
    kd.min(u64::MAX as f64).floor() as u64
}

/// `k_0(s)`: `k_V` while `s <= eps ln N`, else `s`.
pub fn k0_threshold(s: u32, k_v: u32, n: u64, eps: f64) -> u32 {
    if (s as f64) <= eps * (n as f64).ln() {
        k_v
    } else {
        s
    }
}

/// Evaluate one profile kind on a grid.
pub fn sample_profile(
    kind: ProfileKind,
    k: u32,
    grid: Vec<Frequency>,
    d: f64,
    table: &PrimeTable,
) -> Result<MultiplierProfile> {
    let (s_max, truncated) = default_s_max(k, d);
    let params = ProfileParams {
        d,
        s_max,
        truncated,
        k_v: None,
        n: None,
        eps: None,
    };
    let l_vals = || -> Result<Vec<Complex64>> {
        grid.iter().map(|&a| l_k(k, a, s_max)).collect()
    };
    let values = match kind {
        ProfileKind::M => m_k_many(k, &grid, table)?,
        ProfileKind::L => l_vals()?,
        ProfileKind::E => {
            let m = m_k_many(k, &grid, table)?;
            m.iter().zip(l_vals()?).map(|(m, l)| m - l).collect()
        }
    };
    Ok(MultiplierProfile {
        kind,
        k,
        grid,
        values,
        params,
    })
}

/// Exact rational value of a [`Frequency`].
pub fn frequency_to_rational(alpha: Frequency) -> BigRational {
    match alpha {
        Frequency::Float(x) => exact_rational(x),
        Frequency::Rational { num, den } => BigRational::new(BigInt::from(num), BigInt::from(den)),
    }
}

pub(crate) fn check_d(d: f64) -> Result<()> {
    if !(d > 16.0) {
        return Err(invalid(format!("D = {d} must exceed 2^4 = 16")));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
