//! Pairwise intersection lattices, greedy pair selection and the shrinking
//! of intersected pair sets.

use super::geometry::{ceil_rat, floor_rat, Point, TubeFamily, Window};
use crate::error::{invalid, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

fn det(f1: &TubeFamily, f2: &TubeFamily) -> BigInt {
    &f1.v.0 * &f2.v.1 - &f1.v.1 * &f2.v.0
}

/// Range of `V . beta` over the window.
fn value_range(v: &(BigInt, BigInt), w: &Window) -> (BigRational, BigRational) {
    let vx = BigRational::from_integer(v.0.clone());
    let vy = BigRational::from_integer(v.1.clone());
    let vals: Vec<BigRational> = w
        .corners()
        .iter()
        .map(|c| &vx * c.xr() + &vy * c.yr())
        .collect();
    (
        vals.iter().min().unwrap().clone(),
        vals.iter().max().unwrap().clone(),
    )
}

fn plane_indices(f: &TubeFamily, w: &Window) -> (BigInt, BigInt) {
    let (lo, hi) = value_range(&f.v, w);
    let r = BigRational::from_integer(BigInt::from(f.r));
    (ceil_rat(&(lo * &r)), floor_rat(&(hi * r)))
}

/// Solution of `V1 . beta = a / r1`, `V2 . beta = b / r2`.
fn center(f1: &TubeFamily, f2: &TubeFamily, d: &BigInt, a: &BigInt, b: &BigInt) -> Point {
    let (r1, r2) = (BigInt::from(f1.r), BigInt::from(f2.r));
    let x = &f2.v.1 * a * &r2 - &f1.v.1 * b * &r1;
    let y = &f1.v.0 * b * &r1 - &f2.v.0 * a * &r2;
    let den = d * &r1 * &r2;
    if den.is_negative() {
        Point::new(-x, -y, -den)
    } else {
        Point::new(x, y, den)
    }
}

/// Intersections of the plane centres of two families inside `window`, in
/// the order of increasing `(a, b)`.
pub fn candidate_intersections(f1: &TubeFamily, f2: &TubeFamily, window: &Window) -> Result<Vec<Point>> {
    let d = det(f1, f2);
    if d.is_zero() {
        return Err(invalid("candidate_intersections needs non-parallel directions"));
    }
    let (a_lo, a_hi) = plane_indices(f1, window);
    let (b_lo, b_hi) = plane_indices(f2, window);
    let mut out = Vec::new();
    let mut a = a_lo;
    while a <= a_hi {
        let mut b = b_lo.clone();
        while b <= b_hi {
            let p = center(f1, f2, &d, &a, &b);
            if window.contains(&p) {
                out.push(p);
            }
            b += 1;
        }
        a += 1;
    }
    Ok(out)
}

/// One step of [`greedy_pair_selection`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectedPair {
    pub first: usize,
    pub second: usize,
    pub prime: BigUint,
}

/// Repeatedly take the first two unused vectors whose `y` factors share a
/// window prime not used by an earlier pair.
pub fn greedy_pair_selection(y_factors: &[BigUint], primes: &[BigUint]) -> Vec<SelectedPair> {
    let mut used = vec![false; y_factors.len()];
    let mut used_primes: Vec<&BigUint> = Vec::new();
    let mut out = Vec::new();
    'outer: loop {
        for i in 0..y_factors.len() {
            if used[i] {
                continue;
            }
            for j in i + 1..y_factors.len() {
                if used[j] {
                    continue;
                }
                let shared = primes.iter().find(|p| {
                    !used_primes.contains(p)
                        && (&y_factors[i] % *p).is_zero()
                        && (&y_factors[j] % *p).is_zero()
                });
                if let Some(p) = shared {
                    used[i] = true;
                    used[j] = true;
                    used_primes.push(p);
                    out.push(SelectedPair {
                        first: i,
                        second: j,
                        prime: p.clone(),
                    });
                    continue 'outer;
                }
            }
        }
        return out;
    }
}

/// Result of [`intersection_shrink_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ShrinkReport {
    pub pairs: usize,
    /// Largest `|x|` and `|y|` over the intersected coordinate sets.
    pub x_extent: f64,
    pub y_extent: f64,
    /// `sqrt(x_extent^2 + y_extent^2)`, 0 when the intersection is empty.
    pub radius: f64,
    pub empty: bool,
    /// Radius of the scanned box.
    pub box_radius: f64,
    /// Whether `radius <= bound` for the supplied bound.
    pub within_bound: bool,
}

type Intervals = Vec<(BigRational, BigRational)>;

fn merge(mut iv: Intervals) -> Intervals {
    iv.sort();
    let mut out: Intervals = Vec::new();
    for (lo, hi) in iv {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn intersect(a: &Intervals, b: &Intervals) -> Intervals {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.clone().max(b[j].0.clone());
        let hi = a[i].1.clone().min(b[j].1.clone());
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn extent(iv: &Intervals) -> BigRational {
    iv.iter()
        .flat_map(|(lo, hi)| [lo.abs(), hi.abs()])
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// Intersect the `x` and `y` coordinate sets of the pairwise intersections
/// `K1 ∩ K2` of every pair inside the box `[-h, h]^2`, and measure how far
/// from the origin the common part reaches. Coordinates are multiplied by
/// `scale` before measuring.
pub fn intersection_shrink_check(
    pairs: &[(TubeFamily, TubeFamily)],
    h: &BigRational,
    scale: &BigInt,
    bound: f64,
) -> Result<ShrinkReport> {
    if !h.is_positive() {
        return Err(invalid("box radius must be positive"));
    }
    let window = Window::square(-h.clone(), -h.clone(), h * BigInt::from(2));
    let mut xs: Option<Intervals> = None;
    let mut ys: Option<Intervals> = None;
    for (f1, f2) in pairs {
        let d = det(f1, f2);
        if d.is_zero() {
            return Err(invalid("paired directions are parallel"));
        }
        // Parallelogram |V1 . u| <= t1, |V2 . u| <= t2 about each centre.
        let t1 = BigRational::new(1.into(), BigInt::from(1) << f1.thickness_exp());
        let t2 = BigRational::new(1.into(), BigInt::from(1) << f2.thickness_exp());
        let ad = BigRational::from_integer(d.abs());
        let hx = (&t1 * f2.v.1.abs() + &t2 * f1.v.1.abs()) / &ad;
        let hy = (&t1 * f2.v.0.abs() + &t2 * f1.v.0.abs()) / &ad;
        let mut px = Vec::new();
        let mut py = Vec::new();
        for c in candidate_intersections(f1, f2, &window)? {
            let (cx, cy) = (c.xr(), c.yr());
            px.push((&cx - &hx, &cx + &hx));
            py.push((&cy - &hy, &cy + &hy));
        }
        let (px, py) = (merge(px), merge(py));
        xs = Some(match xs {
            None => px,
            Some(prev) => intersect(&prev, &px),
        });
        ys = Some(match ys {
            None => py,
            Some(prev) => intersect(&prev, &py),
        });
    }
    let xs = xs.unwrap_or_default();
    let ys = ys.unwrap_or_default();
    let empty = xs.is_empty() || ys.is_empty();
    let f = BigRational::from_integer(scale.clone());
    let (ex, ey) = if empty {
        (0.0, 0.0)
    } else {
        (
            (extent(&xs) * &f).to_f64().unwrap_or(f64::INFINITY),
            (extent(&ys) * &f).to_f64().unwrap_or(f64::INFINITY),
        )
    };
    let radius = ex.hypot(ey);
    Ok(ShrinkReport {
        pairs: pairs.len(),
        x_extent: ex,
        y_extent: ey,
        radius,
        empty,
        box_radius: (h * f).to_f64().unwrap_or(f64::INFINITY),
        within_bound: radius <= bound,
    })
}

/// `gcd` of all coordinates.
pub fn common_factor(vs: &[(BigInt, BigInt)]) -> BigInt {
    vs.iter()
        .fold(BigInt::zero(), |g, (x, y)| g.gcd(x).gcd(y))
}
