use super::*;
use crate::arith::{farey_level, sieve_primes};
use crate::bumps::eval_phi;
use std::sync::OnceLock;

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| sieve_primes(1 << 21).unwrap())
}

/// Plain double loop with its own primality test.
fn oracle_m(k: u32, num: i64, den: u64) -> Complex64 {
    let lo = 1u64 << k;
    let mut acc = Complex64::zero();
    for p in lo..=2 * lo {
        if (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            continue;
        }
        let w = eval_phi(p as f64 / lo as f64) * (p as f64).ln() / lo as f64;
        let r = (p as i128 * num as i128).rem_euclid(den as i128) as f64 / den as f64;
        acc += Complex64::from_polar(w, -TAU * r);
    }
    acc
}

#[test]
fn m_k_matches_oracle() {
    for &(num, den) in &[(0, 1), (1, 2), (1, 3), (5, 17), (-3, 64)] {
        let got = m_k(12, Frequency::rational(num, den), table()).unwrap();
        let want = oracle_m(12, num, den);
        assert!((got - want).norm() < 1e-12, "{num}/{den}");
    }
}

#[test]
fn m_k_examples_at_16() {
    let t = table();
    let m0 = m_k(16, 0.0, t).unwrap();
    assert!((m0 - 1.0).norm() < 0.05, "{m0}");
    let mh = m_k(16, 0.5, t).unwrap();
    assert!((mh + 1.0).norm() < 0.05, "{mh}");
    let mt = m_k(16, Frequency::rational(1, 3), t).unwrap();
    assert!((mt + 0.5).norm() < 0.05, "{mt}");
}

#[test]
fn m_k_requires_sieve_range() {
    let small = sieve_primes(1000).unwrap();
    assert!(matches!(m_k(10, 0.1, &small), Err(crate::Error::InvalidArgument(_))));
}

#[test]
fn float_and_rational_paths_agree() {
    let t = table();
    for &(num, den) in &[(1i64, 4u64), (3, 8), (77, 1024)] {
        let a = m_k(18, num as f64 / den as f64, t).unwrap();
        let b = m_k(18, Frequency::rational(num, den), t).unwrap();
        assert!((a - b).norm() < 1e-11);
    }
}

#[test]
fn folded_grid_matches_naive() {
    let t = table();
    let fast = m_k_grid(14, 512, t).unwrap();
    let slow = m_k_grid_naive(14, 512, t).unwrap();
    for j in (0..512).step_by(37) {
        assert!((fast[j] - slow[j]).norm() < 1e-12);
        let direct = m_k(14, Frequency::rational(j as i64, 512), t).unwrap();
        assert!((fast[j] - direct).norm() < 1e-12);
    }
}

#[test]
fn batch_matches_pointwise() {
    let t = table();
    let pts = vec![
        Frequency::rational(1, 7),
        Frequency::rational(3, 7),
        Frequency::rational(2, 14),
        Frequency::Float(0.123),
        Frequency::rational(5, 4096),
    ];
    let many = m_k_many(13, &pts, t).unwrap();
    for (p, v) in pts.iter().zip(&many) {
        assert!((m_k(13, *p, t).unwrap() - v).norm() < 1e-12);
    }
}

#[test]
fn conjugate_symmetry() {
    let t = table();
    for &(num, den) in &[(1i64, 5u64), (7, 96), (11, 1000)] {
        let a = m_k(15, Frequency::rational(num, den), t).unwrap();
        let b = m_k(15, Frequency::rational(den as i64 - num, den), t).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        let la = l_k(15, Frequency::rational(num, den), 22).unwrap();
        let lb = l_k(15, Frequency::rational(den as i64 - num, den), 22).unwrap();
        assert!((la - lb.conj()).norm() < 1e-15);
    }
}

#[test]
fn l_k_s_examples() {
    let one = Complex64::new(1.0, 0.0);
    assert_eq!(l_k_s(14, 0, 0.0).unwrap(), one);
    assert_eq!(l_k_s(14, 1, 0.5).unwrap(), -one);
    assert_eq!(l_k_s(14, 1, 0.4).unwrap(), Complex64::zero());
    assert_eq!(l_k(14, 0.0, 22).unwrap(), one);
    assert_eq!(l_k(14, 0.5, 22).unwrap(), -one);
    assert_eq!(l_k(14, Frequency::rational(1, 3), 22).unwrap(), -one * 0.5);
    // 1/4 and 3/4: mu(4) = 0.
    assert_eq!(l_k(14, 0.25, 22).unwrap(), Complex64::zero());
}

#[test]
fn l_k_near_a_fraction() {
    // alpha = 2/5 + 1/(5 2^60) sits on the plateau of chi_2 around 2/5.
    let alpha = Frequency::rational((2i64 << 60) + 1, 5 << 60);
    let (f, off) = locate_fraction(2, alpha).unwrap();
    assert_eq!(f, ReducedFraction::new(2, 5));
    assert!((off - 1.0 / (5.0 * f64::powi(2.0, 60))).abs() < 1e-30);
    let want = bump_spec().profile(-off * f64::powi(2.0, 20)).unwrap() * (-0.25);
    assert!((l_k(20, alpha, 22).unwrap() - want).norm() < 1e-15);
}

#[test]
fn l_k_periodic() {
    for &(num, den) in &[(1i64, 3u64), (5, 12), (31, 64)] {
        let a = l_k(16, Frequency::rational(num, den), 22).unwrap();
        let b = l_k(16, Frequency::rational(num + den as i64, den), 22).unwrap();
        let c = l_k(16, Frequency::rational(num - 3 * den as i64, den), 22).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
    let x = 0.375 + f64::powi(2.0, -50);
    assert_eq!(l_k(16, x, 22).unwrap(), l_k(16, x + 1.0, 22).unwrap());
}

/// Nearest level-`s` fractions on either side, found by binary search.
fn neighbors(level: &[ReducedFraction], x: f64) -> Vec<ReducedFraction> {
    let i = level.partition_point(|f| f.value() < x);
    let mut out = Vec::new();
    if i > 0 {
        out.push(level[i - 1]);
    }
    if i < level.len() {
        out.push(level[i]);
    }
    out
}

#[test]
fn located_fraction_matches_farey_search() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for s in 1..=8u32 {
        let level = farey_level(s).unwrap().fractions;
        for _ in 0..200 {
            let f = level[rng.gen_range(0..level.len())];
            let width = f64::powi(2.0, -crate::bumps::chi_exponent(s) - 1);
            let alpha = f.value() + rng.gen_range(-1.5..1.5) * width;
            let got = locate_fraction(s, Frequency::Float(alpha)).map(|(g, _)| g);
            let hits: Vec<_> = neighbors(&level, alpha)
                .into_iter()
                .filter(|g| {
                    let off = Frequency::Float(alpha).offset_from(g.numer() as i128, g.denom());
                    chi_s(s, off) != 0.0
                })
                .collect();
            assert!(hits.len() <= 1);
            assert_eq!(got, hits.first().copied(), "s={s} alpha={alpha}");
        }
    }
}

#[test]
fn default_s_max_caps() {
    assert_eq!(default_s_max(14, 17.0), (22, true));
    // 2^(s+1) > 2^3 = 8 first at s = 3.
    assert_eq!(default_s_max(2, 3.0), (3, false));
    assert_eq!(default_s_max(4, 1.0), (2, false));
}

#[test]
fn classify_examples() {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let tiny = BigRational::new(BigInt::one(), BigInt::one() << 128usize);
    let label = classify_arc_exact(&(half + tiny), 128, 17.0);
    assert!(label.is_major());
    assert_eq!(label.fraction, Some(ReducedFraction::new(1, 2)));

    let zero = classify_arc(0.0, 20, 17.0);
    assert_eq!(zero.fraction, Some(ReducedFraction::zero()));

    // At k = 20 with D = 17 the arc radius exceeds 1/2, so every point is
    // major through 0/1 or 1/1.
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let g17 = classify_arc(golden, 20, 17.0);
    assert!(g17.is_major());
    assert_eq!(g17.fraction, Some(ReducedFraction::zero()));
}

#[test]
fn golden_ratio_is_minor_at_small_exponent() {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let label = classify_arc(golden, 20, 1.0);
    assert_eq!(label.kind, ArcKind::Minor);
    // Convergent oracle: the best approximations with q <= 20 miss the arc.
    let radius = 20.0 / f64::powi(2.0, 20);
    for (a, q) in Frequency::Float(golden).convergents(20) {
        assert!((golden - a as f64 / q as f64).abs() > radius);
    }
    // Denominators are Fibonacci numbers.
    let dens: Vec<u64> = Frequency::Float(golden).convergents(20).iter().map(|c| c.1).collect();
    assert_eq!(dens, vec![1, 1, 2, 3, 5, 8, 13]);
}

#[test]
fn k0_threshold_examples() {
    assert_eq!(k0_threshold(1, 40, 1 << 20, 0.5), 40);
    assert_eq!(k0_threshold(30, 40, 1 << 10, 0.1), 30);
    let n = 1u64 << 20;
    let b = (0.5 * (n as f64).ln()).floor() as u32;
    assert_eq!(k0_threshold(b, 40, n, 0.5), 40);
    assert_eq!(k0_threshold(b + 1, 40, n, 0.5), b + 1);
}

#[test]
fn downsampled_q1_matches_symbol() {
    let sym = DownsampledSymbol::new(8, 6, 1).unwrap();
    for n in [-400i64, -300, -256, -200, -10, 0, 40] {
        let direct = downsample::coefficient_direct(8, 6, 1, n).unwrap();
        assert!((sym.coefficient(n) - direct).norm() < 1e-10, "n={n}");
    }
}

#[test]
fn downsampled_sum_matches_periodized_symbol() {
    for &(k, e, q) in &[(6u32, 3i32, 20u64), (8, 2, 7), (7, 7, 1), (9, 4, 64)] {
        let sym = DownsampledSymbol::new(k, e, q).unwrap();
        let want = sym.periodized_at_zero().unwrap();
        assert!((sym.sum() - want).norm() < 1e-9, "k={k} e={e} q={q}");
        assert!(sym.l1_norm() <= 10.0);
    }
}

#[test]
fn literal_downsampled_coefficient() {
    // The literal cutoff is 2^-50 wide, so c(0) = q 2^-50 ∫chi to leading order.
    let c0 = downsampled_multiplier(10, 1, 3, 0).unwrap();
    let chi_mass = {
        let m = 100_000;
        (0..m).map(|i| crate::bumps::eval_chi(-0.5 + (i as f64 + 0.5) / m as f64)).sum::<f64>()
            / m as f64
    };
    let want = 3.0 * f64::powi(2.0, -50) * chi_mass;
    assert!((c0.re - want).abs() < 1e-9 * want, "{c0} vs {want}");
}
