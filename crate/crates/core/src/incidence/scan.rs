//! Exact maximal overlap of tube families over a window.
//!
//! The overlap count is constant on the cells of the arrangement of tube
//! boundary lines and window edges, and its maximum is attained on a closed
//! convex cell, hence at one of its vertices. Every vertex is the meeting
//! point of two boundary lines of different families, of a boundary line
//! and a window edge, or a window corner.

use super::geometry::{ceil_rat, floor_rat, Point, TubeFamily, Variant, Window};
use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMethod {
    ExactCandidates,
    GridSample,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Largest number of pair vertices examined before falling back to a
    /// grid sample.
    pub pair_budget: usize,
    /// Grid side of the fallback sample.
    pub grid: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            pair_budget: 4_000_000,
            grid: 256,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OverlapReport {
    pub variant: Variant,
    pub s: u32,
    pub c1: u32,
    pub families: usize,
    pub max_overlap: usize,
    /// Witness in unit-torus coordinates.
    pub witness: Point,
    pub witness_members: Vec<usize>,
    pub candidates: usize,
    pub method: ScanMethod,
    pub window: Window,
    /// Factor from unit-torus coordinates to the variant's coordinates
    /// (`A_tilde` for the rescaled torus, else 1).
    pub coordinate_scale: BigInt,
}

impl OverlapReport {
    /// Witness in the variant's own coordinates.
    pub fn witness_in_variant(&self) -> (BigRational, BigRational) {
        let f = BigRational::from_integer(self.coordinate_scale.clone());
        (self.witness.xr() * &f, self.witness.yr() * f)
    }
}

/// Indices of the families containing `p`.
pub fn members(fams: &[TubeFamily], p: &Point) -> Vec<usize> {
    fams.iter()
        .enumerate()
        .filter(|(_, f)| f.contains(p))
        .map(|(i, _)| i)
        .collect()
}

/// Re-evaluate the witness of a report.
pub fn replay_witness(report: &OverlapReport, fams: &[TubeFamily]) -> bool {
    report.window.contains(&report.witness)
        && members(fams, &report.witness) == report.witness_members
        && report.witness_members.len() == report.max_overlap
}

/// Boundary line `V . beta = num / den`.
#[derive(Debug, Clone)]
struct Line {
    num: BigInt,
    den: BigInt,
}

/// Boundary lines of a family that can meet the window.
fn boundary_lines(f: &TubeFamily, w: &Window) -> Vec<Line> {
    let vx = BigRational::from_integer(f.v.0.clone());
    let vy = BigRational::from_integer(f.v.1.clone());
    let vals: Vec<BigRational> = w
        .corners()
        .iter()
        .map(|c| &vx * c.xr() + &vy * c.yr())
        .collect();
    let lo = vals.iter().min().unwrap().clone();
    let hi = vals.iter().max().unwrap().clone();
    let r = BigRational::from_integer(BigInt::from(f.r));
    let b_lo = floor_rat(&(&lo * &r)) - 1;
    let b_hi = ceil_rat(&(&hi * &r)) + 1;
    let t = BigInt::from(1) << f.thickness_exp();
    let den = BigInt::from(f.r) * &t;
    let mut out = Vec::new();
    let mut b = b_lo;
    while b <= b_hi {
        for sign in [-1i32, 1] {
            out.push(Line {
                num: &b * &t + BigInt::from(f.r) * sign,
                den: den.clone(),
            });
        }
        b += 1;
    }
    out
}

fn intersect(v1: &(BigInt, BigInt), l1: &Line, v2: &(BigInt, BigInt), l2: &Line, det: &BigInt) -> Point {
    let x = &v2.1 * &l1.num * &l2.den - &v1.1 * &l2.num * &l1.den;
    let y = &v1.0 * &l2.num * &l1.den - &v2.0 * &l1.num * &l2.den;
    let d = det * &l1.den * &l2.den;
    if d.is_negative() {
        Point::new(-x, -y, -d)
    } else {
        Point::new(x, y, d)
    }
}

/// Points where a boundary line meets the window edges.
fn edge_points(v: &(BigInt, BigInt), l: &Line, w: &Window) -> Vec<Point> {
    let c = BigRational::new(l.num.clone(), l.den.clone());
    let vx = BigRational::from_integer(v.0.clone());
    let vy = BigRational::from_integer(v.1.clone());
    let mut out = Vec::new();
    if !vy.is_zero() {
        for x in [w.x0.clone(), w.x1()] {
            let y = (&c - &vx * &x) / &vy;
            if y >= w.y0 && y <= w.y1() {
                out.push(Point::from_rationals(&x, &y));
            }
        }
    }
    if !vx.is_zero() {
        for y in [w.y0.clone(), w.y1()] {
            let x = (&c - &vy * &y) / &vx;
            if x >= w.x0 && x <= w.x1() {
                out.push(Point::from_rationals(&x, &y));
            }
        }
    }
    out
}

/// Best `(count, witness)` with deterministic tie-breaking on the order of
/// candidates.
type Best = Option<(usize, usize, Point)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

fn check_window(w: &Window, ball_sq: &BigRational) -> Result<()> {
    let half = BigRational::new(1.into(), 2.into());
    let inside = |lo: &BigRational, hi: &BigRational| lo >= &(-half.clone()) && hi <= &half;
    if !w.w.is_positive() || !w.h.is_positive() {
        return Err(invalid("window must have positive size"));
    }
    if !inside(&w.x0, &w.x1()) || !inside(&w.y0, &w.y1()) {
        return Err(invalid("window must lie in [-1/2, 1/2]^2"));
    }
    if &w.min_norm_squared() < ball_sq {
        return Err(invalid("window meets the excluded ball"));
    }
    Ok(())
}

/// Maximal number of families sharing a point of `window`.
pub fn max_overlap(
    fams: &[TubeFamily],
    window: &Window,
    ball_sq: &BigRational,
    cfg: &ScanConfig,
) -> Result<(usize, Point, Vec<usize>, usize, ScanMethod)> {
    check_window(window, ball_sq)?;
    if fams.is_empty() {
        return Err(invalid("no tube families to scan"));
    }
    let lines: Vec<Vec<Line>> = fams.iter().map(|f| boundary_lines(f, window)).collect();
    let mut pairs = Vec::new();
    let mut budget = 0usize;
    for i in 0..fams.len() {
        for j in i + 1..fams.len() {
            let det = &fams[i].v.0 * &fams[j].v.1 - &fams[i].v.1 * &fams[j].v.0;
            if !det.is_zero() {
                budget = budget.saturating_add(lines[i].len() * lines[j].len());
                pairs.push((i, j, det));
            }
        }
    }
    if budget > cfg.pair_budget {
        return grid_sample(fams, window, cfg.grid);
    }

    let eval = |p: Point, order: usize| -> Best {
        if !window.contains(&p) {
            return None;
        }
        let c = fams.iter().filter(|f| f.contains(&p)).count();
        Some((c, order, p))
    };

    // Window corners and edge points first, then pair vertices.
    let mut base: Best = None;
    let mut order = 0usize;
    let mut checked = 0usize;
    for c in window.corners() {
        base = better(base, eval(c, order));
        order += 1;
        checked += 1;
    }
    for (f, ls) in fams.iter().zip(&lines) {
        for l in ls {
            for p in edge_points(&f.v, l, window) {
                base = better(base, eval(p, order));
                order += 1;
                checked += 1;
            }
        }
    }
    let offset = order;
    let pair_best: Best = pairs
        .par_iter()
        .enumerate()
        .map(|(k, (i, j, det))| {
            let mut best: Best = None;
            let mut local = 0usize;
            for l1 in &lines[*i] {
                for l2 in &lines[*j] {
                    let p = intersect(&fams[*i].v, l1, &fams[*j].v, l2, det);
                    // Order pairs before their internal vertex index.
                    let ord = offset + k * (1 << 32) + local;
                    best = better(best, eval(p, ord));
                    local += 1;
                }
            }
            best
        })
        .reduce(|| None, better);
    checked += budget;
    let (count, _, witness) = better(base, pair_best).expect("corners are candidates");
    let witness = witness.reduced();
    let mem = members(fams, &witness);
    Ok((count, witness, mem, checked, ScanMethod::ExactCandidates))
}

fn grid_sample(
    fams: &[TubeFamily],
    window: &Window,
    grid: usize,
) -> Result<(usize, Point, Vec<usize>, usize, ScanMethod)> {
    let g = BigInt::from(2 * grid);
    let pts: Vec<Point> = (0..grid)
        .flat_map(|i| (0..grid).map(move |j| (i, j)))
        .map(|(i, j)| {
            let fx = BigRational::new(BigInt::from(2 * i + 1), g.clone());
            let fy = BigRational::new(BigInt::from(2 * j + 1), g.clone());
            Point::from_rationals(&(&window.x0 + &window.w * fx), &(&window.y0 + &window.h * fy))
        })
        .collect();
    let best = pts
        .into_par_iter()
        .enumerate()
        .map(|(k, p)| {
            let c = fams.iter().filter(|f| f.contains(&p)).count();
            Some((c, k, p))
        })
        .reduce(|| None, better);
    let (count, _, witness) = best.expect("grid is nonempty");
    let witness = witness.reduced();
    let mem = members(fams, &witness);
    Ok((count, witness, mem, grid * grid, ScanMethod::GridSample))
}
