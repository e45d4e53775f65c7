//! Orbits of `x -> x + v` on `(Z/L)^2` and the 1D/2D transfer checks.

use super::{average_with_weights, maximal_op, GridFunction, OperatorConfig};
use crate::error::{invalid, Result};
use crate::multiplier::prime_weights;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Partition of the grid into the orbits `{y + t v}`.
#[derive(Debug, Clone)]
pub struct LineDecomposition {
    pub side: usize,
    pub v: (i64, i64),
    /// Each class in orbit order, starting from its smallest row-major index.
    pub classes: Vec<Vec<(usize, usize)>>,
    /// Class index of every grid point, row-major.
    pub label: Vec<usize>,
}

pub fn line_decompose(side: usize, v: (i64, i64)) -> Result<LineDecomposition> {
    let l = side as i64;
    if side == 0 {
        return Err(invalid("grid side must be positive"));
    }
    let v = (v.0.rem_euclid(l), v.1.rem_euclid(l));
    if v == (0, 0) {
        return Err(invalid("line direction must be nonzero mod L"));
    }
    let mut label = vec![usize::MAX; side * side];
    let mut classes = Vec::new();
    for start in 0..side * side {
        if label[start] != usize::MAX {
            continue;
        }
        let c = classes.len();
        let mut orbit = Vec::new();
        let (mut i, mut j) = ((start / side) as i64, (start % side) as i64);
        loop {
            let idx = (i * l + j) as usize;
            if label[idx] != usize::MAX {
                break;
            }
            label[idx] = c;
            orbit.push((i as usize, j as usize));
            i = (i + v.0) % l;
            j = (j + v.1) % l;
        }
        classes.push(orbit);
    }
    Ok(LineDecomposition {
        side,
        v,
        classes,
        label,
    })
}

/// `t -> f(y + t v)` along one class.
pub fn pull_back(f: &GridFunction, class: &[(usize, usize)]) -> Vec<Complex64> {
    let l = f.side();
    class.iter().map(|&(i, j)| f.values()[i * l + j]).collect()
}

/// `sup_k |sum_p w_k(p) a(t - p)|` on `Z/n`.
fn maximal_1d(a: &[Complex64], weights: &[Vec<(u64, f64)>]) -> Vec<f64> {
    let n = a.len();
    let mut sup = vec![0.0f64; n];
    for ws in weights {
        for (t, s) in sup.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(p, w) in ws {
                let shift = (p % n as u64) as usize;
                acc += a[(t + n - shift) % n] * w;
            }
            *s = s.max(acc.norm());
        }
    }
    sup
}

fn maximal_single(f: &GridFunction, v: (i64, i64), weights: &[Vec<(u64, f64)>]) -> Vec<f64> {
    let mut sup = vec![0.0f64; f.side() * f.side()];
    for ws in weights {
        let g = average_with_weights(f, v, ws);
        for (s, z) in sup.iter_mut().zip(g.values()) {
            *s = s.max(z.norm());
        }
    }
    sup
}

fn norm(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferenceReport {
    pub side: usize,
    pub trials: usize,
    /// Trials whose output left the input's line.
    pub locality_violations: usize,
    /// Largest relative gap between the 2D norm and the pulled-back 1D norm.
    pub max_norm_discrepancy: f64,
    /// Relative gap between `sum over lines ||T(f 1_line)||^2` and `||T f||^2`.
    pub line_sum_discrepancy: f64,
}

impl TransferenceReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.locality_violations == 0 && self.max_norm_discrepancy <= tol && self.line_sum_discrepancy <= tol
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random single-direction checks of line locality and of the equality of
/// the 2D norm with the norm of the 1D operator on the pulled-back sequence.
pub fn transference_check(cfg: &OperatorConfig, side: usize, trials: usize, seed: u64) -> Result<TransferenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Vec<(u64, f64)>> = cfg
        .scales()
        .map(|k| prime_weights(k, cfg.table()))
        .collect::<Result<_>>()?;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let i = rng.gen_range(0..cfg.directions().len());
        let v = cfg.direction_mod(i, side);
        let dec = line_decompose(side, v)?;
        let c = rng.gen_range(0..dec.classes.len());
        let mut vals = vec![Complex64::new(0.0, 0.0); side * side];
        for &(a, b) in &dec.classes[c] {
            vals[a * side + b] = gaussian(&mut rng);
        }
        let f = GridFunction::new(side, vals)?;
        let out = maximal_single(&f, v, &weights);
        if out
            .iter()
            .enumerate()
            .any(|(idx, &x)| x != 0.0 && dec.label[idx] != c)
        {
            violations += 1;
        }
        let one_d = maximal_1d(&pull_back(&f, &dec.classes[c]), &weights);
        let (n2, n1) = (norm(&out), norm(&one_d));
        worst = worst.max((n2 - n1).abs() / n1.max(f64::MIN_POSITIVE));
    }

    // Disjoint supports: the squared norm splits over lines.
    let single = OperatorConfig::new(vec![cfg.directions()[0].clone()], cfg.k_min, cfg.k_max, cfg.table.clone())?;
    let v = single.direction_mod(0, side);
    let dec = line_decompose(side, v)?;
    let f = GridFunction::new(side, (0..side * side).map(|_| gaussian(&mut rng)).collect())?;
    let total = maximal_op(&f, &single)?.norm_squared();
    let mut parts = 0.0;
    for c in 0..dec.classes.len() {
        let restricted = GridFunction::from_fn(side, |a, b| {
            if dec.label[a * side + b] == c {
                f.values()[a * side + b]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })?;
        parts += maximal_single(&restricted, v, &weights).iter().map(|x| x * x).sum::<f64>();
    }
    Ok(TransferenceReport {
        side,
        trials,
        locality_violations: violations,
        max_norm_discrepancy: worst,
        line_sum_discrepancy: (parts - total).abs() / total,
    })
}
