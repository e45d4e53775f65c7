use primedir::arith::{mobius, sieve_primes, totient, Frequency, PrimeTable};
use primedir::bumps::bump_spec;
use primedir::multiplier::{error_profile, m_k, write_error_csv, ErrorProfileConfig};
use std::sync::OnceLock;

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| sieve_primes(1 << 21).unwrap())
}

#[test]
fn error_profile_decreases_in_k() {
    let cfg = ErrorProfileConfig::new(vec![14, 16, 18, 20], 17.0);
    let rows: Vec<_> = error_profile(&cfg, table())
        .unwrap()
        .into_iter()
        .map(|(r, _)| r)
        .collect();
    for r in &rows {
        eprintln!("{r:?}");
        assert!(r.truncated);
        // Every grid point is major at D = 17.
        assert!(r.sup_minor_m.is_nan());
    }
    for w in rows.windows(2) {
        assert!(w[1].sup_abs_e < w[0].sup_abs_e);
    }
    let mut csv = Vec::new();
    write_error_csv(&rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("k,D,sup_abs_E,sup_minor_m,argmax_alpha,wall_ms\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn minor_arc_sup_shrinks_with_narrow_arcs() {
    let mut cfg = ErrorProfileConfig::new(vec![14, 20], 17.0);
    cfg.arc_exponent = 1.0;
    let rows: Vec<_> = error_profile(&cfg, table())
        .unwrap()
        .into_iter()
        .map(|(r, _)| r)
        .collect();
    eprintln!("{rows:?}");
    assert!(rows[0].minor_count > 0 && rows[1].minor_count > 0);
    assert!(rows[1].sup_minor_m < rows[0].sup_minor_m);
}

#[test]
fn error_at_half_is_small() {
    for k in [16u32, 18, 20] {
        let m = m_k(k, 0.5, table()).unwrap();
        assert!((m + 1.0).norm() < 0.1);
    }
}

#[test]
fn near_fraction_approximation_improves() {
    // alpha = a/q + theta 2^-k for q <= 32 and a few theta.
    let thetas = [(0i64, 1u64), (1, 3), (-1, 2), (1, 1)];
    let mut maxima = Vec::new();
    for k in [14u32, 16, 18, 20] {
        let mut worst = 0.0f64;
        for q in 1..=32u64 {
            for a in 0..q {
                if primedir::arith::gcd_u64(a, q) != 1 {
                    continue;
                }
                for &(tn, td) in &thetas {
                    // a/q + tn / (td 2^k), as one exact fraction.
                    let den = q * td << k;
                    let num = (a * td << k) as i64 + tn * q as i64;
                    let alpha = Frequency::rational(num, den);
                    let m = m_k(k, alpha, table()).unwrap();
                    let x = tn as f64 / td as f64;
                    let v = bump_spec().profile(-x).unwrap();
                    let main = v * (mobius(q) as f64 / totient(q) as f64);
                    worst = worst.max((m - main).norm());
                }
            }
        }
        maxima.push(worst);
    }
    eprintln!("{maxima:?}");
    for w in maxima.windows(2) {
        assert!(w[1] < w[0]);
    }
}
