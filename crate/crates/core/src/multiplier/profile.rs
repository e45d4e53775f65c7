//! Sup-norm profiles of `E_k = m_k - L_k` over a grid of fractions.

use super::{
    check_d, classify_arc, default_s_max, l_k, m_k_many, MultiplierProfile, ProfileKind,
    ProfileParams,
};
use crate::arith::{Frequency, PrimeTable, ReducedFraction};
use crate::error::{invalid, Result};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct ErrorProfileConfig {
    pub ks: Vec<u32>,
    pub d: f64,
    /// Exponent used for the major/minor split of the diagnostics. Defaults
    /// to `d`.
    pub arc_exponent: f64,
    /// Uniform fill `{j / grid_size}`.
    pub grid_size: u64,
    /// All fractions of levels `0..=fraction_level` are added to the grid.
    pub fraction_level: u32,
}

impl ErrorProfileConfig {
    pub fn new(ks: Vec<u32>, d: f64) -> Self {
        ErrorProfileConfig {
            ks,
            d,
            arc_exponent: d,
            grid_size: 4096,
            fraction_level: 6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorProfileRow {
    pub k: u32,
    pub d: f64,
    pub sup_abs_e: f64,
    /// `sup |m_k|` over minor-arc samples; `NaN` when there are none.
    pub sup_minor_m: f64,
    pub sup_major_e: f64,
    pub major_count: usize,
    pub minor_count: usize,
    pub argmax_alpha: String,
    pub s_max: u32,
    pub truncated: bool,
    pub wall_ms: f64,
}

/// `{j / grid_size}` together with every reduced `a/q`, `q < 2^(level+1)`,
/// deduplicated and sorted.
pub fn fraction_grid(grid_size: u64, level: u32) -> Vec<Frequency> {
    let mut set = BTreeSet::new();
    for j in 0..grid_size {
        set.insert(ReducedFraction::new(j as i128, grid_size));
    }
    for q in 1..1u64 << (level + 1) {
        for a in 0..q {
            set.insert(ReducedFraction::new(a as i128, q));
        }
    }
    set.into_iter()
        .map(|f| Frequency::rational(f.numer() as i64, f.denom()))
        .collect()
}

/// One row per `k`, plus the `E_k` samples the row summarizes.
pub fn error_profile(
    cfg: &ErrorProfileConfig,
    table: &PrimeTable,
) -> Result<Vec<(ErrorProfileRow, MultiplierProfile)>> {
    check_d(cfg.d)?;
    if cfg.grid_size == 0 {
        return Err(invalid("grid size must be positive"));
    }
    if !(cfg.arc_exponent > 0.0) {
        return Err(invalid("arc exponent must be positive"));
    }
    let grid = fraction_grid(cfg.grid_size, cfg.fraction_level);
    cfg.ks
        .iter()
        .map(|&k| {
            let start = Instant::now();
            let (s_max, truncated) = default_s_max(k, cfg.d);
            let m = m_k_many(k, &grid, table)?;
            let l: Vec<_> = grid
                .par_iter()
                .map(|&a| l_k(k, a, s_max))
                .collect::<Result<_>>()?;
            let e: Vec<_> = m.iter().zip(&l).map(|(m, l)| m - l).collect();
            let major: Vec<bool> = grid
                .par_iter()
                .map(|&a| classify_arc(a, k, cfg.arc_exponent).is_major())
                .collect();

            let mut sup = (0.0f64, 0usize);
            let mut sup_major = 0.0f64;
            let mut sup_minor_m = f64::NAN;
            for i in 0..grid.len() {
                let abs = e[i].norm();
                if abs > sup.0 {
                    sup = (abs, i);
                }
                if major[i] {
                    sup_major = sup_major.max(abs);
                } else {
                    let mm = m[i].norm();
                    sup_minor_m = if sup_minor_m.is_nan() { mm } else { sup_minor_m.max(mm) };
                }
            }
            let major_count = major.iter().filter(|&&b| b).count();
            let argmax = match grid[sup.1] {
                Frequency::Rational { num, den } => ReducedFraction::new(num as i128, den).to_string(),
                Frequency::Float(x) => format!("{x:e}"),
            };
            let row = ErrorProfileRow {
                k,
                d: cfg.d,
                sup_abs_e: sup.0,
                sup_minor_m,
                sup_major_e: sup_major,
                major_count,
                minor_count: grid.len() - major_count,
                argmax_alpha: argmax,
                s_max,
                truncated,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            let profile = MultiplierProfile {
                kind: ProfileKind::E,
                k,
                grid: grid.clone(),
                values: e,
                params: ProfileParams {
                    d: cfg.d,
                    s_max,
                    truncated,
                    k_v: None,
                    n: None,
                    eps: None,
                },
            };
            Ok((row, profile))
        })
        .collect()
}

/// CSV with columns `k,D,sup_abs_E,sup_minor_m,argmax_alpha,wall_ms`.
pub fn write_error_csv<W: Write>(rows: &[ErrorProfileRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "k,D,sup_abs_E,sup_minor_m,argmax_alpha,wall_ms")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.12e},{},{},{:.3}",
            r.k,
            r.d,
            r.sup_abs_e,
            if r.sup_minor_m.is_nan() {
                "nan".to_string()
            } else {
                format!("{:.12e}", r.sup_minor_m)
            },
            r.argmax_alpha,
            r.wall_ms
        )?;
    }
    Ok(())
}
