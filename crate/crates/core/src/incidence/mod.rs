//! Tube families of a direction set and their worst-case overlap.
//!
//! All coordinates are exact rationals on the unit torus. A scan of the
//! rescaled torus `A_tilde T^2` uses the same integer vectors, since
//! `(V / A_tilde) . (A_tilde beta) = V . beta`; only the excluded ball and the
//! reported coordinates change.
//!
//! Every integer vector is a multiple of [`common_period`]`(ds) = g`, so each
//! point of `(1/g) Z^2` lies on a plane of every family. Scans therefore look
//! at a local window next to the excluded ball rather than the whole torus.

mod geometry;
mod pairs;
mod scan;

pub use geometry::{tube_membership, Point, TubeFamily, Variant, Window};
pub use pairs::{
    candidate_intersections, common_factor, greedy_pair_selection, intersection_shrink_check,
    SelectedPair, ShrinkReport,
};
pub use scan::{max_overlap, members, replay_witness, OverlapReport, ScanConfig, ScanMethod};

use crate::directions::DirectionSet;
use crate::error::{invalid, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};

/// Default thickness exponent `3 ceil(log2 A)`.
pub fn default_c1(a: &BigUint) -> u32 {
    let bits = a.bits() as u32;
    let ceil_log2 = if a.count_ones() == 1 { bits - 1 } else { bits };
    3 * ceil_log2.max(1)
}

/// Radius of the excluded ball in unit-torus coordinates.
pub fn ball_radius(ds: &DirectionSet, variant: Variant) -> BigRational {
    let a = BigInt::from(ds.a.clone());
    match variant {
        Variant::K => BigRational::new(BigInt::one(), &a * &a),
        Variant::Ktilde => BigRational::new(BigInt::one(), a * BigInt::from(ds.a_tilde.clone())),
    }
}

/// `gcd` of all integer vector coordinates.
pub fn common_period(ds: &DirectionSet) -> BigInt {
    common_factor(&ds.integer_vectors)
}

/// Families of `ds` at scale `s` with one `r` per vector.
pub fn families(ds: &DirectionSet, s: u32, c1: u32, rs: &[u64]) -> Result<Vec<TubeFamily>> {
    if rs.len() != ds.integer_vectors.len() {
        return Err(invalid(format!(
            "{} denominators for {} vectors",
            rs.len(),
            ds.integer_vectors.len()
        )));
    }
    ds.integer_vectors
        .iter()
        .zip(rs)
        .map(|(v, &r)| TubeFamily::new(v.clone(), r, s, c1))
        .collect()
}

/// Square window touching the excluded ball on the positive `x` axis, sized
/// so that the family with the longest vector crosses about `planes` planes.
pub fn default_window(fams: &[TubeFamily], ball_radius: &BigRational, planes: u32) -> Result<Window> {
    let longest = fams
        .iter()
        .map(|f| f.v.0.abs() + f.v.1.abs())
        .max()
        .ok_or_else(|| invalid("no tube families"))?;
    let s = fams.iter().map(|f| f.s).min().unwrap_or(0);
    let side = BigRational::new(BigInt::from(planes.max(1)), longest << s as usize);
    let quarter = BigRational::new(1.into(), 4.into());
    let side = side.min(quarter);
    Ok(Window::square(ball_radius.clone(), BigRational::from_integer(0.into()), side))
}

/// Planes per window used by [`scan_direction_set`] when no window is given.
pub const DEFAULT_PLANES: u32 = 6;

/// Exact maximal overlap of the families of `ds`.
pub fn scan_direction_set(
    ds: &DirectionSet,
    variant: Variant,
    s: u32,
    c1: u32,
    rs: &[u64],
    window: Option<Window>,
    cfg: &ScanConfig,
) -> Result<OverlapReport> {
    let fams = families(ds, s, c1, rs)?;
    scan_families(&fams, variant, s, c1, ds, window, cfg)
}

/// Overlap of `N` copies of the first direction with equal `r`.
pub fn parallel_baseline(
    ds: &DirectionSet,
    variant: Variant,
    s: u32,
    c1: u32,
    window: Option<Window>,
    cfg: &ScanConfig,
) -> Result<OverlapReport> {
    let v = ds
        .integer_vectors
        .first()
        .ok_or_else(|| invalid("empty direction set"))?
        .clone();
    let fams: Vec<TubeFamily> = (0..ds.integer_vectors.len())
        .map(|_| TubeFamily::new(v.clone(), 1 << s, s, c1))
        .collect::<Result<_>>()?;
    scan_families(&fams, variant, s, c1, ds, window, cfg)
}

fn scan_families(
    fams: &[TubeFamily],
    variant: Variant,
    s: u32,
    c1: u32,
    ds: &DirectionSet,
    window: Option<Window>,
    cfg: &ScanConfig,
) -> Result<OverlapReport> {
    let radius = ball_radius(ds, variant);
    let window = match window {
        Some(w) => w,
        None => default_window(fams, &radius, DEFAULT_PLANES)?,
    };
    let (max_overlap, witness, witness_members, candidates, method) =
        max_overlap(fams, &window, &(&radius * &radius), cfg)?;
    Ok(OverlapReport {
        variant,
        s,
        c1,
        families: fams.len(),
        max_overlap,
        witness,
        witness_members,
        candidates,
        method,
        window,
        coordinate_scale: match variant {
            Variant::K => BigInt::one(),
            Variant::Ktilde => BigInt::from(ds.a_tilde.clone()),
        },
    })
}

/// Greedy pair selection on the `y` factors of `ds`.
pub fn select_pairs(ds: &DirectionSet) -> Vec<SelectedPair> {
    let factors: Vec<BigUint> = (0..ds.vectors.len()).map(|i| ds.y_factor(i)).collect();
    greedy_pair_selection(&factors, &ds.prime_window)
}
