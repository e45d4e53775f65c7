//! Quick versions of the library's oracle checks.

use anyhow::{bail, Result};
use num_complex::Complex64;
use primedir::arith::{self, sieve_primes};
use primedir::directions::{self, construct_directions, DirectionSpec};
use primedir::incidence::{self, ScanConfig, Variant};
use primedir::multiplier::{m_k_grid, m_k_grid_naive};
use primedir::operator::{
    average_along, delta_spread_value, line_decompose, maximal_op, spectral_average, transference_check,
    DirectionSource, GridFunction, OperatorConfig, Preset,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

type Check = (&'static str, fn() -> Result<String>);

const CHECKS: &[Check] = &[
    ("divisor-sums", divisor_sums),
    ("ramanujan-sums", ramanujan_sums),
    ("sieve", sieve),
    ("folded-multiplier", folded_multiplier),
    ("construction", construction),
    ("incidence-separation", incidence_separation),
    ("spatial-spectral", spatial_spectral),
    ("delta-spread", delta_spread),
    ("line-orbits", line_orbits),
    ("transference", transference),
];

pub fn run() -> Result<()> {
    let mut failed = 0;
    for (name, check) in CHECKS {
        let t = std::time::Instant::now();
        match check() {
            Ok(detail) => println!("PASS {name} ({detail}; {:.2?})", t.elapsed()),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e:#}");
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", CHECKS.len());
    }
    Ok(())
}

fn divisor_sums() -> Result<String> {
    for q in 1..=2000u64 {
        let ds = arith::divisors(q);
        let mu: i64 = ds.iter().map(|&d| arith::mobius(d) as i64).sum();
        let phi: u64 = ds.iter().map(|&d| arith::totient(d)).sum();
        if mu != (q == 1) as i64 || phi != q {
            bail!("identity fails at q = {q}");
        }
    }
    Ok("q <= 2000".into())
}

fn ramanujan_sums() -> Result<String> {
    for q in 1..=60u64 {
        for n in -60..=60i64 {
            let d = (arith::ramanujan_sum(q, n) - arith::ramanujan_sum_direct(q, n)).abs();
            if d > 1e-9 {
                bail!("c_{q}({n}) differs by {d:e}");
            }
        }
    }
    Ok("q <= 60, |n| <= 60".into())
}

fn sieve() -> Result<String> {
    let t = sieve_primes(100_000)?;
    let direct = (0..=100_000u64).filter(|&n| arith::primality::is_prime_u64(n)).count();
    if direct != t.len() {
        bail!("sieve has {} primes, trial test {direct}", t.len());
    }
    Ok(format!("{} primes", t.len()))
}

fn folded_multiplier() -> Result<String> {
    let t = sieve_primes(1 << 13)?;
    let fast = m_k_grid(12, 1024, &t)?;
    let slow = m_k_grid_naive(12, 1024, &t)?;
    let d = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if d > 1e-9 {
        bail!("max difference {d:e}");
    }
    Ok(format!("max difference {d:.1e}"))
}

fn construction() -> Result<String> {
    let ds = construct_directions(&DirectionSpec::toy(8, 0.5, 7))?;
    let text = directions::serialize(&ds);
    let back = directions::deserialize(&text)?;
    if directions::serialize(&back) != text {
        bail!("round trip changed the file");
    }
    Ok(format!("{} rules", directions::validate(&back)?.rules.len()))
}

fn incidence_separation() -> Result<String> {
    let ds = construct_directions(&DirectionSpec::toy(4, 1.0, 7))?;
    let c1 = incidence::default_c1(&ds.a);
    let cfg = ScanConfig::default();
    let rs = vec![2; 4];
    let rep = incidence::scan_direction_set(&ds, Variant::K, 1, c1, &rs, None, &cfg)?;
    let base = incidence::parallel_baseline(&ds, Variant::K, 1, c1, None, &cfg)?;
    if !incidence::replay_witness(&rep, &incidence::families(&ds, 1, c1, &rs)?) {
        bail!("witness does not replay");
    }
    if rep.max_overlap >= base.max_overlap {
        bail!("overlap {} vs baseline {}", rep.max_overlap, base.max_overlap);
    }
    Ok(format!("{} < {}", rep.max_overlap, base.max_overlap))
}

fn desk_small() -> Result<OperatorConfig> {
    let p = Preset::desk_small();
    let ds = construct_directions(&p.spec())?;
    let t = Arc::new(sieve_primes(p.sieve_limit())?);
    Ok(OperatorConfig::from_direction_set(&ds, DirectionSource::Primitive, p.k_min, p.k_max, t)?)
}

fn spatial_spectral() -> Result<String> {
    let cfg = desk_small()?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = GridFunction::from_fn(64, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))?;
    let mut worst = 0.0f64;
    for i in 0..cfg.directions().len() {
        let v = cfg.direction_mod(i, 64);
        for k in cfg.scales() {
            let a = average_along(&f, v, k, &cfg)?;
            let b = spectral_average(&f, v, k, &cfg)?;
            worst = worst.max(b.relative_distance(&a));
        }
    }
    if worst >= 1e-8 {
        bail!("relative discrepancy {worst:e}");
    }
    Ok(format!("relative discrepancy {worst:.1e}"))
}

fn delta_spread() -> Result<String> {
    let cfg = desk_small()?;
    for side in [64usize, 128, 256, 512, 1024, 2048] {
        if let Some(want) = delta_spread_value(&cfg, side)? {
            let got = maximal_op(&GridFunction::delta(side, 0, 0)?, &cfg)?.norm_squared();
            let err = (got - want).abs() / want;
            if err > 1e-10 {
                bail!("relative error {err:e} at L = {side}");
            }
            return Ok(format!("L = {side}, relative error {err:.1e}"));
        }
    }
    bail!("no grid up to 2048 separates the points p v")
}

fn line_orbits() -> Result<String> {
    for v in [(1i64, 0i64), (2, 6), (4, 12), (3, 5)] {
        let dec = line_decompose(32, v)?;
        let g = num_integer::gcd(num_integer::gcd(v.0, v.1), 32) as usize;
        if dec.classes.iter().any(|c| c.len() != 32 / g) {
            bail!("orbit size mismatch for {v:?}");
        }
    }
    Ok("L = 32".into())
}

fn transference() -> Result<String> {
    let cfg = desk_small()?;
    let r = transference_check(&cfg, 32, 20, 3)?;
    if !r.passed(1e-10) {
        bail!("{r:?}");
    }
    Ok(format!("norm gap {:.1e}", r.max_norm_discrepancy))
}
