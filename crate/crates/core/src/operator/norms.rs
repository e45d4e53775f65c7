//! Empirical norms over adversarial test families, the point-mass identity
//! and the low/high frequency split.

use super::{maximal_op, GridFunction, OperatorConfig};
use crate::bumps::eval_chi;
use crate::directions::DirectionSpec;
use crate::error::{invalid, Result};
use crate::multiplier::prime_weights;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFamily {
    /// The point mass at the origin.
    Delta,
    /// Independent standard normal values.
    Gaussian,
    /// Independent signs.
    Rademacher,
    /// Indicators of `[0, s)^2` for `s = 1, 2, 4, ..., L/2`.
    Boxes,
}

impl TestFamily {
    pub const ALL: [TestFamily; 4] = [
        TestFamily::Delta,
        TestFamily::Gaussian,
        TestFamily::Rademacher,
        TestFamily::Boxes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFamily::Delta => "delta",
            TestFamily::Gaussian => "gaussian",
            TestFamily::Rademacher => "rademacher",
            TestFamily::Boxes => "boxes",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        TestFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| invalid(format!("unknown test family `{s}`")))
    }

    /// The family's members with descriptors. Random families draw `trials`
    /// members from `seed`.
    pub fn members(self, side: usize, trials: usize, seed: u64) -> Result<Vec<(String, GridFunction)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = side * side;
        match self {
            TestFamily::Delta => Ok(vec![("delta".into(), GridFunction::delta(side, 0, 0)?)]),
            TestFamily::Gaussian => (0..trials)
                .map(|t| {
                    let vals = (0..n)
                        .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
                        .collect();
                    Ok((format!("gaussian#{t}"), GridFunction::new(side, vals)?))
                })
                .collect(),
            TestFamily::Rademacher => (0..trials)
                .map(|t| {
                    let vals = (0..n)
                        .map(|_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0))
                        .collect();
                    Ok((format!("rademacher#{t}"), GridFunction::new(side, vals)?))
                })
                .collect(),
            TestFamily::Boxes => std::iter::successors(Some(1usize), |s| Some(s * 2))
                .take_while(|&s| s <= side / 2)
                .map(|s| {
                    let g = GridFunction::from_fn(side, |i, j| {
                        Complex64::new(if i < s && j < s { 1.0 } else { 0.0 }, 0.0)
                    })?;
                    Ok((format!("box {s}x{s}"), g))
                })
                .collect(),
        }
    }
}

/// Whether the points `p v mod L` are distinct over all directions and all
/// primes carrying weight at some configured scale.
pub fn delta_precondition(cfg: &OperatorConfig, side: usize) -> Result<bool> {
    let sup = sup_weights(cfg)?;
    let l = side as i64;
    let mut seen = HashSet::new();
    for i in 0..cfg.directions().len() {
        let v = cfg.direction_mod(i, side);
        for &p in sup.keys() {
            let p = (p % side as u64) as i64;
            if !seen.insert(((p * v.0).rem_euclid(l), (p * v.1).rem_euclid(l))) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `max_k w_k(p)` for every prime with positive weight.
fn sup_weights(cfg: &OperatorConfig) -> Result<HashMap<u64, f64>> {
    let mut sup: HashMap<u64, f64> = HashMap::new();
    for k in cfg.scales() {
        for (p, w) in prime_weights(k, cfg.table())? {
            let e = sup.entry(p).or_insert(0.0);
            *e = e.max(w.abs());
        }
    }
    Ok(sup)
}

/// `sum_v sum_p (max_k w_k(p))^2`, the value of `||maximal_op(delta)||^2` when
/// [`delta_precondition`] holds; `None` otherwise.
pub fn delta_spread_value(cfg: &OperatorConfig, side: usize) -> Result<Option<f64>> {
    if !delta_precondition(cfg, side)? {
        return Ok(None);
    }
    let sup = sup_weights(cfg)?;
    let mut ws: Vec<f64> = sup.values().map(|w| w * w).collect();
    ws.sort_by(f64::total_cmp);
    let per_direction: f64 = ws.iter().sum();
    Ok(Some(per_direction * cfg.directions().len() as f64))
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub family: TestFamily,
    pub side: usize,
    pub directions: usize,
    pub members: usize,
    /// `max ||maximal_op(f)|| / ||f||` over the family.
    pub max_ratio: f64,
    pub argmax: String,
    /// Measured `||maximal_op(delta)||^2`.
    pub delta_norm_squared: f64,
    /// Its predicted value, when the distinctness precondition holds.
    pub delta_identity: Option<f64>,
}

pub fn empirical_norm(
    cfg: &OperatorConfig,
    side: usize,
    family: TestFamily,
    trials: usize,
    seed: u64,
) -> Result<NormReport> {
    let members = family.members(side, trials, seed)?;
    let mut best = (f64::NEG_INFINITY, String::new());
    for (name, f) in &members {
        let r = maximal_op(f, cfg)?.norm() / f.norm();
        if r > best.0 {
            best = (r, name.clone());
        }
    }
    let delta = maximal_op(&GridFunction::delta(side, 0, 0)?, cfg)?.norm_squared();
    Ok(NormReport {
        family,
        side,
        directions: cfg.directions().len(),
        members: members.len(),
        max_ratio: best.0,
        argmax: best.1,
        delta_norm_squared: delta,
        delta_identity: delta_spread_value(cfg, side)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormSweepRow {
    pub n: usize,
    pub family: TestFamily,
    pub max_ratio: f64,
    pub argmax: String,
    pub delta_norm_squared: f64,
}

/// Empirical norms of the nested prefixes of `cfg`'s directions. The same
/// test functions are used at every `n`, so each column is nondecreasing.
pub fn norm_sweep(
    cfg: &OperatorConfig,
    ns: &[usize],
    side: usize,
    families: &[TestFamily],
    trials: usize,
    seed: u64,
) -> Result<Vec<NormSweepRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        if n == 0 || n > cfg.directions().len() {
            return Err(invalid(format!(
                "prefix size {n} is outside 1..={}",
                cfg.directions().len()
            )));
        }
        let sub = cfg.prefix(n)?;
        for &family in families {
            let r = empirical_norm(&sub, side, family, trials, seed)?;
            rows.push(NormSweepRow {
                n,
                family,
                max_ratio: r.max_ratio,
                argmax: r.argmax,
                delta_norm_squared: r.delta_norm_squared,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct FrequencySplit {
    pub low: GridFunction,
    pub high: GridFunction,
    /// The cutoff radius `A^-2` did not exceed `1/L`; `low` is the mean.
    pub degenerate: bool,
}

/// `f = f1 + f2` with `f1` carrying the frequencies `|alpha| <~ A^-2`, using
/// the cutoff `chi(|alpha| A^2 / 2)`.
pub fn frequency_split(f: &GridFunction, a: &BigUint) -> Result<FrequencySplit> {
    let l = f.side();
    let a = a.to_f64().unwrap_or(f64::INFINITY);
    if a < 1.0 {
        return Err(invalid("cutoff parameter A must be at least 1"));
    }
    let radius = 1.0 / (a * a);
    let degenerate = radius <= 1.0 / l as f64;
    let mut spec = f.fft();
    let centred = |j: usize| {
        let j = j as i64;
        let c = if j > l as i64 / 2 { j - l as i64 } else { j };
        c as f64 / l as f64
    };
    for (idx, z) in spec.iter_mut().enumerate() {
        let theta = if degenerate {
            if idx == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            let alpha = centred(idx / l).hypot(centred(idx % l));
            eval_chi(alpha / (2.0 * radius))
        };
        *z *= theta;
    }
    let low = GridFunction::from_spectrum(l, spec)?;
    let high = f.zip_with(&low, |x, y| x - y);
    Ok(FrequencySplit { low, high, degenerate })
}

/// Named desk-scale parameter sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub n: u64,
    pub eps: f64,
    pub seed: u64,
    pub k_min: u32,
    pub k_max: u32,
    pub side: usize,
}

impl Preset {
    pub fn desk_small() -> Self {
        Preset {
            name: "desk-small",
            n: 4,
            eps: 1.0,
            seed: 7,
            k_min: 4,
            k_max: 6,
            side: 64,
        }
    }

    pub fn desk_full() -> Self {
        Preset {
            name: "desk-full",
            n: 16,
            eps: 1.0,
            seed: 7,
            k_min: 6,
            k_max: 9,
            side: 256,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        [Self::desk_small(), Self::desk_full()]
            .into_iter()
            .find(|p| p.name == name)
            .ok_or_else(|| invalid(format!("unknown profile `{name}`")))
    }

    pub fn spec(&self) -> DirectionSpec {
        DirectionSpec::toy(self.n, self.eps, self.seed)
    }

    pub fn sieve_limit(&self) -> u64 {
        1 << (self.k_max + 1)
    }
}
