//! Acceptance suite: one PASS/FAIL line per criterion.

use num_complex::Complex64;
use num_integer::Integer;
use primedir::arith::sieve::load_or_build;
use primedir::arith::{self, PrimeTable};
use primedir::directions::{self, construct_directions, min_cross_product, DirectionSpec};
use primedir::incidence::{self, ScanConfig, Variant};
use primedir::multiplier::{error_profile, m_k, m_k_grid, m_k_grid_naive, ErrorProfileConfig};
use primedir::arith::Frequency;
use primedir::operator::{
    average_along, delta_precondition, delta_spread_value, maximal_op, spectral_average, transference_check, DirectionSource,
    GridFunction, OperatorConfig, Preset,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:.0?}"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cache_dir() -> std::path::PathBuf {
    std::env::var_os("PD_CACHE_DIR")
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("primedir-acceptance"))
}

fn table(limit: u64) -> Arc<PrimeTable> {
    Arc::new(load_or_build(&cache_dir(), limit).expect("prime table").0)
}

fn arithmetic_oracles() -> Outcome {
    let t = Instant::now();
    for q in 1..=10_000u64 {
        let mut mu = 0i64;
        let mut phi = 0u64;
        for d in (1..=q).filter(|d| q % d == 0) {
            mu += arith::mobius(d) as i64;
            phi += arith::totient(d);
        }
        ensure(mu == (q == 1) as i64, || format!("sum of mu over divisors of {q} is {mu}"))?;
        ensure(phi == q, || format!("sum of phi over divisors of {q} is {phi}"))?;
    }
    let mut worst = 0.0f64;
    for q in 1..=200u64 {
        for n in -200..=200i64 {
            let brute: f64 = (1..=q)
                .filter(|a| a.gcd(&q) == 1)
                .map(|a| (TAU * ((a as i64 * n).rem_euclid(q as i64)) as f64 / q as f64).cos())
                .sum();
            worst = worst.max((brute - arith::ramanujan_sum(q, n)).abs());
            let full = arith::full_exponential_sum(q, n);
            let want = if n % q as i64 == 0 { q as f64 } else { 0.0 };
            ensure(full == Complex64::new(want, 0.0), || format!("full sum q={q} n={n} is {full}"))?;
        }
    }
    ensure(worst < 1e-9, || format!("Ramanujan sums differ by {worst:e}"))?;
    within(t.elapsed(), Duration::from_secs(10))?;
    Ok(format!("Ramanujan max error {worst:.1e}, {:.2?}", t.elapsed()))
}

fn multiplier_approximation() -> Outcome {
    let t0 = Instant::now();
    let tab = table(1 << 21);
    let t = Instant::now();
    let cfg = ErrorProfileConfig::new(vec![14, 16, 18, 20], 17.0);
    let sups: Vec<f64> = error_profile(&cfg, &tab)
        .map_err(err)?
        .into_iter()
        .map(|(r, _)| r.sup_abs_e)
        .collect();
    ensure(sups.windows(2).all(|w| w[1] < w[0]), || format!("sup|E| not decreasing: {sups:?}"))?;
    let half = m_k(20, Frequency::rational(1, 2), &tab).map_err(err)?;
    let third = m_k(20, Frequency::rational(1, 3), &tab).map_err(err)?;
    ensure((half + 1.0).norm() < 0.1, || format!("m_20(1/2) = {half}"))?;
    ensure((third + 0.5).norm() < 0.1, || format!("m_20(1/3) = {third}"))?;
    within(t.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "sup|E| = {:.4} {:.4} {:.4} {:.4}, |m(1/2)+1| = {:.1e}, |m(1/3)+1/2| = {:.1e}, {:.2?} (+{:.2?} sieve)",
        sups[0],
        sups[1],
        sups[2],
        sups[3],
        (half + 1.0).norm(),
        (third + 0.5).norm(),
        t.elapsed(),
        t.duration_since(t0)
    ))
}

fn desk_small() -> Result<OperatorConfig, String> {
    let p = Preset::desk_small();
    let ds = construct_directions(&p.spec()).map_err(err)?;
    OperatorConfig::from_direction_set(&ds, DirectionSource::Primitive, p.k_min, p.k_max, table(p.sieve_limit()))
        .map_err(err)
}

fn spectral_equals_spatial() -> Outcome {
    let t = Instant::now();
    let cfg = desk_small()?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for side in [64usize, 128] {
        for _ in 0..20 {
            let f = GridFunction::from_fn(side, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .map_err(err)?;
            for i in 0..cfg.directions().len() {
                let v = cfg.direction_mod(i, side);
                for k in cfg.scales() {
                    let a = average_along(&f, v, k, &cfg).map_err(err)?;
                    let b = spectral_average(&f, v, k, &cfg).map_err(err)?;
                    worst = worst.max(b.relative_distance(&a));
                    pairs += 1;
                }
            }
        }
    }
    ensure(worst < 1e-8, || format!("relative discrepancy {worst:e}"))?;
    within(t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{pairs} evaluations, max relative discrepancy {worst:.1e}, {:.2?}", t.elapsed()))
}

fn delta_spread() -> Outcome {
    let cfg = desk_small()?;
    // Smallest grid on which the points p v mod L are pairwise distinct.
    let side = (6..=12)
        .map(|e| 1usize << e)
        .find(|&l| delta_precondition(&cfg, l).unwrap_or(false))
        .ok_or("no grid up to 4096 separates the points p v")?;
    let want = delta_spread_value(&cfg, side)
        .map_err(err)?
        .ok_or_else(|| format!("precondition fails at L = {side}"))?;
    let got = maximal_op(&GridFunction::delta(side, 0, 0).map_err(err)?, &cfg)
        .map_err(err)?
        .norm_squared();
    let rel = (got - want).abs() / want;
    ensure(rel <= 1e-10, || format!("relative error {rel:e}"))?;
    Ok(format!("L = {side}, ||M delta||^2 = {got:.12}, relative error {rel:.1e}"))
}

fn construction_validation() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for n in [4u64, 8, 16] {
        for eps in [0.5, 1.0] {
            let ds = construct_directions(&DirectionSpec::toy(n, eps, 7)).map_err(err)?;
            directions::validate(&ds).map_err(err)?;
            let text = directions::serialize(&ds);
            let back = directions::deserialize(&text).map_err(err)?;
            ensure(directions::serialize(&back) == text, || format!("N={n} eps={eps}: round trip differs"))?;
            ensure(min_cross_product(&ds) >= 1, || format!("N={n} eps={eps}: parallel pair"))?;
            checked += 1;
        }
    }
    within(t.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{checked} sets valid and round-tripped, {:.2?}", t.elapsed()))
}

fn incidence_separation() -> Outcome {
    let t = Instant::now();
    let cfg = ScanConfig::default();
    let mut worst = 0;
    let mut scans = 0;
    for n in [4u64, 8, 16] {
        for eps in [0.5, 1.0] {
            let ds = construct_directions(&DirectionSpec::toy(n, eps, 7)).map_err(err)?;
            let c1 = incidence::default_c1(&ds.a);
            for s in 1..=3u32 {
                let rs = vec![1u64 << s; n as usize];
                let fams = incidence::families(&ds, s, c1, &rs).map_err(err)?;
                for variant in [Variant::K, Variant::Ktilde] {
                    let got = incidence::scan_direction_set(&ds, variant, s, c1, &rs, None, &cfg).map_err(err)?;
                    let base = incidence::parallel_baseline(&ds, variant, s, c1, None, &cfg).map_err(err)?;
                    let tag = format!("N={n} eps={eps} s={s} {variant:?}");
                    ensure(base.max_overlap == n as usize, || format!("{tag}: baseline {}", base.max_overlap))?;
                    ensure(got.max_overlap < base.max_overlap, || {
                        format!("{tag}: {} vs baseline {}", got.max_overlap, base.max_overlap)
                    })?;
                    ensure(incidence::replay_witness(&got, &fams), || format!("{tag}: witness replay"))?;
                    worst = worst.max(got.max_overlap);
                    scans += 1;
                }
            }
        }
    }
    within(t.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{scans} scans, constructed max overlap {worst} vs baseline N, {:.2?}", t.elapsed()))
}

fn transference() -> Outcome {
    let cfg = desk_small()?;
    let r = transference_check(&cfg, 64, 100, 11).map_err(err)?;
    ensure(r.locality_violations == 0, || format!("{} locality violations", r.locality_violations))?;
    ensure(r.max_norm_discrepancy <= 1e-10, || format!("norm gap {:e}", r.max_norm_discrepancy))?;
    Ok(format!(
        "100 trials, norm gap {:.1e}, line-sum gap {:.1e}",
        r.max_norm_discrepancy, r.line_sum_discrepancy
    ))
}

fn performance() -> Outcome {
    let tab = table(1 << 21);
    let l = 1u64 << 16;
    let t = Instant::now();
    let fast = m_k_grid(20, l, &tab).map_err(err)?;
    let t_fast = t.elapsed();
    let t = Instant::now();
    let slow = m_k_grid_naive(20, l, &tab).map_err(err)?;
    let t_slow = t.elapsed();
    let diff = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let speedup = t_slow.as_secs_f64() / t_fast.as_secs_f64();
    ensure(diff <= 1e-9, || format!("values differ by {diff:e}"))?;
    ensure(speedup >= 20.0, || format!("speedup {speedup:.1}x"))?;
    Ok(format!(
        "folded {t_fast:.2?} vs naive {t_slow:.2?} ({speedup:.0}x), max difference {diff:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("arithmetic oracles", arithmetic_oracles),
        ("multiplier approximation", multiplier_approximation),
        ("spectral = spatial", spectral_equals_spatial),
        ("delta-spread identity", delta_spread),
        ("construction validation", construction_validation),
        ("incidence separation", incidence_separation),
        ("transference", transference),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
