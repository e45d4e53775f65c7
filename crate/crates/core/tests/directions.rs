use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use primedir::directions::*;
use primedir::Error;
use proptest::prelude::*;

fn uints(v: &[u32]) -> Vec<BigUint> {
    v.iter().map(|&p| BigUint::from(p)).collect()
}

#[test]
fn kappa_examples() {
    assert_eq!(choose_kappa(4, 6).unwrap(), 2);
    assert_eq!(choose_kappa(6, 20).unwrap(), 3);
    assert_eq!(choose_kappa(5, 10).unwrap(), 2);
    assert!(matches!(
        choose_kappa(4, 7),
        Err(Error::Construction { rule: "distinct-subsets", .. })
    ));
}

#[test]
fn prime_window_examples() {
    let mut spec = DirectionSpec::toy(8, 1.0, 0);
    spec.window_size = Some(4);
    let (_, _, primes, _) = choose_prime_window(&spec).unwrap();
    assert_eq!(primes, uints(&[1009, 1013, 1019, 1021]));

    let strict = DirectionSpec::strict(4, 1.0, 2, 0);
    let (lo, hi, primes, _) = choose_prime_window(&strict).unwrap();
    assert_eq!((lo, hi), (BigUint::from(16u32), BigUint::from(160u32)));
    assert_eq!(primes, uints(&[17, 19]));
}

#[test]
fn exhausted_window_is_a_construction_error() {
    let mut spec = DirectionSpec::toy(8, 1.0, 0);
    spec.window_base = 2;
    spec.window_size = Some(20); // [2, 20] holds 8 primes
    assert!(matches!(
        choose_prime_window(&spec),
        Err(Error::Construction { rule: "prime-window", .. })
    ));
}

#[test]
fn strict_mode_too_small_to_be_feasible() {
    // Two window primes cannot index four distinct subsets.
    let err = construct_directions(&DirectionSpec::strict(4, 1.0, 2, 0)).unwrap_err();
    assert!(matches!(err, Error::Construction { rule: "distinct-subsets", .. }));
}

#[test]
fn strict_mode_construction() {
    let ds = construct_directions(&DirectionSpec::strict(64, 1.0, 1, 5)).unwrap();
    assert_eq!(ds.prime_window.len(), 8);
    assert_eq!(ds.kappa, 4);
    assert_eq!(ds.scale, BigUint::from(64u32).pow(4));
    assert_eq!(ds.eps_effective, 1.0);
    validate(&ds).unwrap();
}

#[test]
fn toy_matrix_validates() {
    for n in [4u64, 8, 16] {
        for eps in [0.5, 1.0] {
            let ds = construct_directions(&DirectionSpec::toy(n, eps, 7)).unwrap();
            let report = validate(&ds).unwrap();
            assert_eq!(report.vectors, n as usize);
            assert!(min_cross_product(&ds) >= 1);
            let tenth = BigRational::new(BigInt::one(), BigInt::from(10));
            for r in &ds.vectors {
                let len2 = r.v.norm_squared();
                assert!(len2 >= &tenth * &tenth && len2 <= BigRational::from_integer(100.into()));
            }
            // sin(angle) >= 1/(100 N^4) from |cross| >= 1 and |(m,n)| <= 10 N^2.
            let angle = min_angle(&ds).unwrap();
            assert!(angle.sin() * (n as f64).powi(4) >= 0.01);
            assert_eq!(ds.a_tilde, ds.a);
        }
    }
}

#[test]
fn min_angle_hand_example() {
    let got = min_angle_of(&[(4, 1), (4, 2)]).unwrap();
    // cross = 4, |a|^2 = 17, |b|^2 = 20.
    assert_eq!(got.sin_squared, BigRational::new(16.into(), 340.into()));
    assert_eq!((got.i, got.j), (0, 1));
}

#[test]
fn determinism_and_round_trip() {
    let spec = DirectionSpec::toy(8, 0.5, 7);
    let a = serialize(&construct_directions(&spec).unwrap());
    let b = serialize(&construct_directions(&spec).unwrap());
    assert_eq!(a, b);
    let back = deserialize(&a).unwrap();
    assert_eq!(serialize(&back), a);
    let other = serialize(&construct_directions(&DirectionSpec::toy(8, 0.5, 8)).unwrap());
    assert_ne!(other, a);
}

#[test]
fn mn_selection_is_seeded() {
    use rand::SeedableRng;
    let pick = |seed| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        select_mn_pairs(2, &mut rng).unwrap()
    };
    assert_eq!(pick(0), pick(0));
    let pairs = pick(0);
    assert_ne!(pairs[0].0 * pairs[1].1, pairs[0].1 * pairs[1].0);
}

#[test]
fn tampered_hash_is_rejected() {
    let text = serialize(&construct_directions(&DirectionSpec::toy(8, 1.0, 1)).unwrap());
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let idx = &mut value["body"]["vectors"][0]["prime_subset"][0];
    *idx = serde_json::json!(idx.as_u64().unwrap() + 1);
    let tampered = serde_json::to_string_pretty(&value).unwrap();
    assert!(matches!(deserialize(&tampered), Err(Error::Format(_))));
}

#[test]
fn tampered_subset_with_fresh_hash_fails_validation() {
    let mut ds = construct_directions(&DirectionSpec::toy(8, 1.0, 1)).unwrap();
    assert!(ds.kappa >= 2);
    let s = &mut ds.vectors[0].prime_subset;
    s[1] = s[0];
    let err = deserialize(&serialize(&ds)).unwrap_err();
    assert!(matches!(err, Error::Construction { rule: "distinct-primes", .. }), "{err}");

    let mut ds = construct_directions(&DirectionSpec::toy(8, 1.0, 1)).unwrap();
    ds.vectors[1].prime_subset = ds.vectors[0].prime_subset.clone();
    let err = deserialize(&serialize(&ds)).unwrap_err();
    // v_1 no longer matches its recorded coordinates.
    assert!(matches!(err, Error::Construction { .. }), "{err}");
}

#[test]
fn malformed_file_reports_location() {
    let text = serialize(&construct_directions(&DirectionSpec::toy(4, 1.0, 1)).unwrap());
    let broken = text.replacen("\"kappa\":", "\"kappa\" ", 1);
    match deserialize(&broken) {
        Err(Error::Parse { line, column, .. }) => assert!(line > 1 && column > 0),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn rescaling() {
    let ds = construct_directions(&DirectionSpec::toy(4, 1.0, 3)).unwrap();
    let b = ds.base_multiple.clone();
    let big = &b * 1000u32 + 17u32;
    let r = rescale_to_integers(ds.clone(), &big).unwrap();
    assert_eq!(&r.a_tilde % &b, BigUint::from(0u32));
    assert!(&r.a_tilde * 10u32 >= big && &r.a_tilde * 10u32 - &b * 10u32 < big);
    validate(&r).unwrap();
    let small = &b / 100u32;
    assert!(matches!(rescale_to_integers(ds, &small), Err(Error::InvalidArgument(_))));
}

#[test]
fn rejects_bad_specs() {
    assert!(construct_directions(&DirectionSpec::toy(1, 1.0, 0)).is_err());
    assert!(construct_directions(&DirectionSpec::toy(4, 0.0, 0)).is_err());
    assert!(construct_directions(&DirectionSpec::toy(4, 1.5, 0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn constructions_validate_and_round_trip(n in 2u64..12, seed in any::<u64>(), half in any::<bool>()) {
        let eps = if half { 0.5 } else { 1.0 };
        let ds = construct_directions(&DirectionSpec::toy(n, eps, seed)).unwrap();
        prop_assert!(validate(&ds).is_ok());
        let text = serialize(&ds);
        prop_assert_eq!(serialize(&deserialize(&text).unwrap()), text);
    }
}
