//! Explicit construction of a direction family whose rescaled coordinates
//! carry controlled prime factorizations, and its exact validation.

mod io;
mod select;

pub use io::{content_hash, deserialize, serialize, DIRECTIONS_SCHEMA};
pub use select::{
    binomial, select_mn_pairs, select_prime_subsets, unrank_combination, AdmissibleRegion,
};

use crate::arith::primality::{is_prime_certified, next_prime_from, Certainty};
use crate::error::{construction, invalid, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Window `[N^(M/eps), 10 N^(M/eps)]` with `ceil(N^(eps/2))` primes.
    Strict,
    /// Window starting at a configured base with a feasible prime count.
    Toy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSpec {
    pub n: u64,
    pub eps: f64,
    /// Window exponent `M` (strict mode).
    pub m: u32,
    pub mode: Mode,
    pub seed: u64,
    /// `A = N^C0` when set; otherwise `A` is the base multiple itself.
    pub c0: Option<u32>,
    /// Tube thickness exponent; `None` selects the default derived from `A`.
    pub c1: Option<u32>,
    /// Toy mode: first integer of the prime window.
    pub window_base: u64,
    /// Toy mode: number of window primes; `None` selects the smallest
    /// feasible count, at least `ceil(N^(eps/2))`.
    pub window_size: Option<usize>,
    /// Overrides the smallest feasible `kappa`.
    pub kappa: Option<usize>,
}

impl DirectionSpec {
    pub fn toy(n: u64, eps: f64, seed: u64) -> Self {
        DirectionSpec {
            n,
            eps,
            m: 1,
            mode: Mode::Toy,
            seed,
            c0: None,
            c1: None,
            window_base: 1000,
            window_size: None,
            kappa: None,
        }
    }

    pub fn strict(n: u64, eps: f64, m: u32, seed: u64) -> Self {
        DirectionSpec {
            mode: Mode::Strict,
            m,
            ..DirectionSpec::toy(n, eps, seed)
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid(format!("N = {} must be at least 2", self.n)));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(invalid(format!("eps = {} must lie in (0, 1]", self.eps)));
        }
        if self.mode == Mode::Strict && self.m == 0 {
            return Err(invalid("M must be positive in strict mode"));
        }
        if self.mode == Mode::Toy && self.window_base < 2 {
            return Err(invalid("window base must be at least 2"));
        }
        Ok(())
    }
}

/// Exact point of the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalVector {
    pub x: BigRational,
    pub y: BigRational,
}

impl RationalVector {
    pub fn norm_squared(&self) -> BigRational {
        &self.x * &self.x + &self.y * &self.y
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionRecord {
    pub v: RationalVector,
    pub m: u64,
    pub n: u64,
    /// `Q = 2^q_exponent`.
    pub q_exponent: i64,
    /// Ascending indices into the prime window.
    pub prime_subset: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    pub spec: DirectionSpec,
    pub kappa: usize,
    /// `eps` after the adjustment making the scale `S` an integer.
    pub eps_effective: f64,
    /// Window interval `[lo, hi]`.
    pub window: (BigUint, BigUint),
    pub prime_window: Vec<BigUint>,
    pub window_certainty: Certainty,
    /// `S`, playing the role of `N^(M kappa / eps)`.
    pub scale: BigUint,
    pub vectors: Vec<DirectionRecord>,
    /// `S * prod_{Q_i <= 1} Q_i^-1`.
    pub base_multiple: BigUint,
    pub a: BigUint,
    pub a_tilde: BigUint,
    pub integer_vectors: Vec<(BigInt, BigInt)>,
}

/// Smallest `kappa` with `C(window, kappa) >= N`.
pub fn choose_kappa(window: usize, n: u64) -> Result<usize> {
    let best = binomial(window as u64, window as u64 / 2).unwrap_or(u128::MAX);
    if best < n as u128 {
        return Err(construction(
            "distinct-subsets",
            format!(
                "C({window}, {}) = {best} < N = {n}: enlarge the prime window \
                 (toy: --window-size; strict: raise M or eps)",
                window / 2
            ),
        ));
    }
    Ok((1..=window)
        .find(|&k| binomial(window as u64, k as u64).is_none_or(|c| c >= n as u128))
        .expect("the central binomial qualifies"))
}

/// Smallest window size `w >= floor` with `C(w, floor(w/2)) >= N`.
pub fn smallest_feasible_window(n: u64, floor: usize) -> usize {
    (floor.max(1)..)
        .find(|&w| binomial(w as u64, w as u64 / 2).is_none_or(|c| c >= n as u128))
        .expect("binomials grow without bound")
}

fn ceil_pow(n: u64, e: f64) -> usize {
    let v = (n as f64).powf(e);
    // Guard against 4^(1/2) = 2.0000000000000004.
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r as usize
    } else {
        v.ceil() as usize
    }
}

/// `N^(M/eps)` rounded up, exact when `M/eps` is an integer.
fn strict_window_start(n: u64, m: u32, eps: f64) -> Result<BigUint> {
    let e = m as f64 / eps;
    if (e - e.round()).abs() < 1e-12 {
        return Ok(num_traits::pow(BigUint::from(n), e.round() as usize));
    }
    let v = (n as f64).powf(e);
    if !v.is_finite() {
        return Err(invalid(format!("N^(M/eps) = {n}^{e} overflows")));
    }
    Ok(BigUint::from(v.ceil() as u128))
}

/// The prime window of the construction, with the interval it lies in.
pub fn choose_prime_window(spec: &DirectionSpec) -> Result<(BigUint, BigUint, Vec<BigUint>, Certainty)> {
    spec.check()?;
    let (lo, count) = match spec.mode {
        Mode::Strict => (
            strict_window_start(spec.n, spec.m, spec.eps)?,
            ceil_pow(spec.n, spec.eps / 2.0),
        ),
        Mode::Toy => {
            let floor = ceil_pow(spec.n, spec.eps / 2.0);
            let count = match spec.window_size {
                Some(w) => w,
                None => smallest_feasible_window(spec.n, floor),
            };
            (BigUint::from(spec.window_base), count)
        }
    };
    let hi = &lo * 10u32;
    let (primes, certainty) = primes_in_window(&lo, &hi, count)?;
    Ok((lo, hi, primes, certainty))
}

/// The first `count` primes in `[lo, hi]`.
pub fn primes_in_window(lo: &BigUint, hi: &BigUint, count: usize) -> Result<(Vec<BigUint>, Certainty)> {
    let mut out = Vec::with_capacity(count);
    let mut certainty = Certainty::Deterministic;
    let mut cur = lo.clone();
    while out.len() < count {
        let budget = 1u64 << 24;
        match next_prime_from(&cur, budget)? {
            Some((p, c)) if &p <= hi => {
                if c == Certainty::Probabilistic {
                    certainty = Certainty::Probabilistic;
                }
                cur = &p + 1u32;
                out.push(p);
            }
            _ => {
                return Err(construction(
                    "prime-window",
                    format!(
                        "[{lo}, {hi}] holds fewer than {count} primes: raise M or the window base"
                    ),
                ))
            }
        }
    }
    Ok((out, certainty))
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

fn two_pow(e: i64) -> BigRational {
    let p = rat(BigInt::one() << e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

fn product(primes: &[BigUint], subset: &[usize]) -> BigUint {
    subset.iter().map(|&i| &primes[i]).product()
}

/// `(m, n) * 2^e * P / S` for the dyadic exponent `e` placing the norm in
/// `[1/10, 10]`; the smallest qualifying `e` is taken.
fn place_vector(m: u64, n: u64, p: &BigUint, s: &BigUint) -> (i64, RationalVector) {
    let base_sq = rat(BigInt::from(m as u128 * m as u128 + n as u128 * n as u128))
        * rat(BigInt::from(p * p))
        / rat(BigInt::from(s * s));
    // |v|^2 = base_sq * 4^e; want 1/100 <= |v|^2 <= 100.
    let lower = BigRational::new(BigInt::one(), BigInt::from(100));
    let approx = base_sq.to_f64().map(|x| x.log2()).unwrap_or(0.0);
    let mut e = (-(approx + 100f64.log2()) / 2.0).floor() as i64 - 2;
    while &base_sq * two_pow(2 * e) < lower {
        e += 1;
    }
    while e > i64::MIN / 4 && &base_sq * two_pow(2 * (e - 1)) >= lower {
        e -= 1;
    }
    let f = two_pow(e) * rat(BigInt::from(p.clone())) / rat(BigInt::from(s.clone()));
    let v = RationalVector {
        x: &f * rat(BigInt::from(m)),
        y: &f * rat(BigInt::from(n)),
    };
    (e, v)
}

/// Build the family and rescale it with the default `A`.
pub fn construct_directions(spec: &DirectionSpec) -> Result<DirectionSet> {
    spec.check()?;
    let (lo, hi, primes, certainty) = choose_prime_window(spec)?;
    let w = primes.len();
    let kappa = match spec.kappa {
        Some(k) if k == 0 || k > w => {
            return Err(invalid(format!("kappa = {k} must lie in 1..={w}")))
        }
        Some(k) => k,
        None => choose_kappa(w, spec.n)?,
    };

    let (scale, eps_effective) = match spec.mode {
        Mode::Toy => (num_traits::pow(BigUint::from(spec.window_base), kappa), spec.eps),
        Mode::Strict => strict_scale(spec.n, spec.m, kappa, spec.eps)?,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pairs = select_mn_pairs(spec.n, &mut rng)?;
    let subsets = select_prime_subsets(w, kappa, spec.n as usize, &mut rng)?;

    let vectors: Vec<DirectionRecord> = pairs
        .iter()
        .zip(subsets)
        .map(|(&(m, n), subset)| {
            let p = product(&primes, &subset);
            let (q_exponent, v) = place_vector(m, n, &p, &scale);
            DirectionRecord {
                v,
                m,
                n,
                q_exponent,
                prime_subset: subset,
            }
        })
        .collect();

    let base_multiple = base_multiple(&scale, &vectors);
    let a = match spec.c0 {
        Some(c0) => num_traits::pow(BigUint::from(spec.n), c0 as usize),
        None => base_multiple.clone(),
    };
    let mut ds = DirectionSet {
        spec: spec.clone(),
        kappa,
        eps_effective,
        window: (lo, hi),
        prime_window: primes,
        window_certainty: certainty,
        scale,
        vectors,
        base_multiple,
        a: a.clone(),
        a_tilde: BigUint::zero(),
        integer_vectors: Vec::new(),
    };
    ds = rescale_to_integers(ds, &a)?;
    validate(&ds)?;
    Ok(ds)
}

/// `S = R`, the integer nearest `N^(M kappa / eps)`, with `eps` replaced by
/// `kappa M ln N / ln R`.
fn strict_scale(n: u64, m: u32, kappa: usize, eps: f64) -> Result<(BigUint, f64)> {
    let e = m as f64 * kappa as f64 / eps;
    if (e - e.round()).abs() < 1e-12 {
        return Ok((num_traits::pow(BigUint::from(n), e.round() as usize), eps));
    }
    let log2 = e * (n as f64).log2();
    if log2 > 1000.0 {
        return Err(invalid(format!(
            "N^(M kappa/eps) = 2^{log2:.1} needs an integral exponent M kappa/eps"
        )));
    }
    let r = BigUint::from(log2.exp2().round() as u128);
    let r_f = r.to_f64().expect("finite");
    let eps_eff = kappa as f64 * m as f64 * (n as f64).ln() / r_f.ln();
    Ok((r, eps_eff))
}

fn base_multiple(scale: &BigUint, vectors: &[DirectionRecord]) -> BigUint {
    let shift: u64 = vectors
        .iter()
        .filter(|r| r.q_exponent <= 0)
        .map(|r| r.q_exponent.unsigned_abs())
        .sum();
    scale << shift as usize
}

/// Set `A_tilde` to the smallest multiple of the base multiple that is at
/// least `A/10`, and clear every denominator.
pub fn rescale_to_integers(mut ds: DirectionSet, a: &BigUint) -> Result<DirectionSet> {
    let b = &ds.base_multiple;
    // Smallest t with 10 t b >= A.
    let t = Integer::div_ceil(a, &(b * 10u32)).max(BigUint::one());
    let a_tilde = t * b;
    if a_tilde > a * 10u32 {
        return Err(invalid(format!(
            "A = {a} is too small: the base multiple {b} exceeds 10A"
        )));
    }
    let at = rat(BigInt::from(a_tilde.clone()));
    let mut ints = Vec::with_capacity(ds.vectors.len());
    for (i, rec) in ds.vectors.iter().enumerate() {
        let x = &at * &rec.v.x;
        let y = &at * &rec.v.y;
        if !x.is_integer() || !y.is_integer() {
            return Err(construction(
                "integrality",
                format!("A_tilde * v_{i} is not integral"),
            ));
        }
        ints.push((x.to_integer(), y.to_integer()));
    }
    ds.a = a.clone();
    ds.a_tilde = a_tilde;
    ds.integer_vectors = ints;
    Ok(ds)
}

/// Outcome of [`validate`]: every rule that was checked.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub rules: Vec<&'static str>,
    pub vectors: usize,
    pub pairs_checked: usize,
}

pub const RULES: [&str; 10] = [
    "count",
    "prime-window",
    "slope",
    "magnitude",
    "non-parallel",
    "distinct-primes",
    "distinct-subsets",
    "dyadic-scale",
    "integrality",
    "annulus",
];

/// Check every construction constraint in exact arithmetic.
pub fn validate(ds: &DirectionSet) -> Result<ValidationReport> {
    let n = ds.spec.n;
    let vs = &ds.vectors;
    if vs.len() as u64 != n || ds.integer_vectors.len() != vs.len() {
        return Err(construction("count", format!("expected {n} vectors, found {}", vs.len())));
    }

    // Window: ascending, inside [lo, hi], certified prime.
    let (lo, hi) = &ds.window;
    for (i, p) in ds.prime_window.iter().enumerate() {
        if p < lo || p > hi || (i > 0 && p <= &ds.prime_window[i - 1]) {
            return Err(construction("prime-window", format!("window entry {i} = {p} out of order or range")));
        }
    }
    let bad = ds
        .prime_window
        .par_iter()
        .position_any(|p| !matches!(is_prime_certified(p), Ok(v) if v.is_prime));
    if let Some(i) = bad {
        return Err(construction("prime-window", format!("window entry {i} is not prime")));
    }

    let n2 = BigInt::from(n) * BigInt::from(n);
    let n4 = &n2 * &n2;
    let bound = BigInt::one() << (100 * ds.kappa);
    for (i, r) in vs.iter().enumerate() {
        let (m, k) = (r.m as u128, r.n as u128);
        if r.m == 0 || r.n == 0 || 4 * k < m || 2 * k > m {
            return Err(construction("slope", format!("n_{i}/m_{i} = {}/{} outside [1/4, 1/2]", r.n, r.m)));
        }
        let r2 = BigInt::from(m * m + k * k);
        if BigInt::from(100) * &r2 < n4 || r2 > BigInt::from(100) * &n4 {
            return Err(construction("magnitude", format!("|(m_{i}, n_{i})| outside [N^2/10, 10N^2]")));
        }
        if r.prime_subset.len() != ds.kappa
            || r.prime_subset.windows(2).any(|w| w[0] >= w[1])
            || r.prime_subset.iter().any(|&j| j >= ds.prime_window.len())
        {
            return Err(construction(
                "distinct-primes",
                format!("vector {i} does not carry {} distinct window primes", ds.kappa),
            ));
        }
        // 2^-100k <= Q N^2 <= 2^100k
        let qn2 = two_pow(r.q_exponent) * rat(n2.clone());
        if qn2 < rat(BigInt::one()) / rat(bound.clone()) || qn2 > rat(bound.clone()) {
            return Err(construction("dyadic-scale", format!("Q_{i} = 2^{} outside 2^(+-100 kappa) N^-2", r.q_exponent)));
        }
        // v = (m, n) Q P / S exactly, with 1/10 <= |v| <= 10.
        let f = two_pow(r.q_exponent) * rat(BigInt::from(product(&ds.prime_window, &r.prime_subset)))
            / rat(BigInt::from(ds.scale.clone()));
        if r.v.x != &f * rat(BigInt::from(r.m)) || r.v.y != &f * rat(BigInt::from(r.n)) {
            return Err(construction("dyadic-scale", format!("v_{i} does not match its factorization")));
        }
        let nv = r.v.norm_squared();
        if nv < BigRational::new(BigInt::one(), BigInt::from(100)) || nv > rat(BigInt::from(100)) {
            return Err(construction("dyadic-scale", format!("|v_{i}| outside [1/10, 10]")));
        }
    }

    let mut subsets: Vec<&Vec<usize>> = vs.iter().map(|r| &r.prime_subset).collect();
    subsets.sort();
    if subsets.windows(2).any(|w| w[0] == w[1]) {
        return Err(construction("distinct-subsets", "two vectors share the same prime collection"));
    }

    let pairs: Vec<(usize, usize)> = (0..vs.len())
        .flat_map(|i| (i + 1..vs.len()).map(move |j| (i, j)))
        .collect();
    if let Some(&(i, j)) = pairs.par_iter().find_any(|&&(i, j)| {
        vs[i].m as i128 * vs[j].n as i128 == vs[i].n as i128 * vs[j].m as i128
    }) {
        return Err(construction("non-parallel", format!("(m, n) pairs {i} and {j} are parallel")));
    }

    // Integrality and the annulus A/100 <= |A_tilde v| <= 100 A.
    let at = rat(BigInt::from(ds.a_tilde.clone()));
    if ds.base_multiple != base_multiple(&ds.scale, vs)
        || !(&ds.a_tilde % &ds.base_multiple).is_zero()
    {
        return Err(construction("integrality", "A_tilde is not a multiple of the base multiple"));
    }
    let a = BigInt::from(ds.a.clone());
    let a2 = &a * &a;
    for (i, (r, (x, y))) in vs.iter().zip(&ds.integer_vectors).enumerate() {
        if rat(x.clone()) != &at * &r.v.x || rat(y.clone()) != &at * &r.v.y {
            return Err(construction("integrality", format!("integer vector {i} is not A_tilde v_{i}")));
        }
        let len2 = x * x + y * y;
        if BigInt::from(10_000) * &len2 < a2 || len2 > BigInt::from(10_000) * &a2 {
            return Err(construction("annulus", format!("|A_tilde v_{i}| outside [A/100, 100A]")));
        }
    }

    Ok(ValidationReport {
        rules: RULES.to_vec(),
        vectors: vs.len(),
        pairs_checked: pairs.len(),
    })
}

/// Smallest angle between two directions, as `sin^2` of the angle.
#[derive(Debug, Clone, PartialEq)]
pub struct MinAngle {
    pub i: usize,
    pub j: usize,
    pub sin_squared: BigRational,
}

impl MinAngle {
    pub fn sin(&self) -> f64 {
        self.sin_squared.to_f64().unwrap_or(0.0).sqrt()
    }
}

/// `min_{i<j} |v_i^perp . v_j|^2 / (|v_i|^2 |v_j|^2)`, computed on the
/// `(m, n)` pairs (which point along the `v_i`).
pub fn min_angle(ds: &DirectionSet) -> Result<MinAngle> {
    let pts: Vec<(u64, u64)> = ds.vectors.iter().map(|r| (r.m, r.n)).collect();
    min_angle_of(&pts)
}

pub fn min_angle_of(pts: &[(u64, u64)]) -> Result<MinAngle> {
    if pts.len() < 2 {
        return Err(invalid("min_angle needs at least two vectors"));
    }
    let mut best: Option<MinAngle> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (pts[i], pts[j]);
            let cross = BigInt::from(a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128);
            let na = BigInt::from(a.0 as u128 * a.0 as u128 + a.1 as u128 * a.1 as u128);
            let nb = BigInt::from(b.0 as u128 * b.0 as u128 + b.1 as u128 * b.1 as u128);
            let s2 = BigRational::new(&cross * &cross, na * nb);
            if best.as_ref().is_none_or(|m| s2 < m.sin_squared) {
                best = Some(MinAngle { i, j, sin_squared: s2 });
            }
        }
    }
    Ok(best.expect("at least one pair"))
}

/// Smallest `|m_i n_j - n_i m_j|` over pairs.
pub fn min_cross_product(ds: &DirectionSet) -> u128 {
    let vs = &ds.vectors;
    let mut best = u128::MAX;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let c = (vs[i].m as i128 * vs[j].n as i128 - vs[i].n as i128 * vs[j].m as i128).unsigned_abs();
            best = best.min(c);
        }
    }
    best
}

impl DirectionSet {
    /// Integer vectors as `i128` pairs when they fit.
    pub fn integer_vectors_i128(&self) -> Option<Vec<(i128, i128)>> {
        self.integer_vectors
            .iter()
            .map(|(x, y)| Some((x.to_i128()?, y.to_i128()?)))
            .collect()
    }

    /// `(v_i)_y S / Q_i = n_i * prod p`.
    pub fn y_factor(&self, i: usize) -> BigUint {
        let r = &self.vectors[i];
        BigUint::from(r.n) * product(&self.prime_window, &r.prime_subset)
    }
}
