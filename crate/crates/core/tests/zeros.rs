use primerace::zeta_zeros::{
    argument_principle_count, check_lemma3, compute_zeros, gram_point, load_zeros, reciprocal_square_sum,
    reciprocal_square_sum_exact, riemann_siegel_z, ZeroSource,
};
use primerace::Error;
use proptest::prelude::*;

const ODLYZKO: [f64; 5] = [
    14.134725141734693,
    21.022039638771555,
    25.010857580145688,
    30.424876125859513,
    32.935061587739189,
];

#[test]
fn first_zeros() {
    let z = compute_zeros(40.0).unwrap();
    for (g, want) in z.gammas().iter().zip(ODLYZKO) {
        assert!((g - want).abs() < 1e-8, "{g} vs {want}");
    }
    assert_eq!(z.len(), 6);
    assert_eq!(z.source(), ZeroSource::Computed);
}

#[test]
fn count_at_1000() {
    let z = compute_zeros(1000.0).unwrap();
    assert_eq!(z.len(), 649);
    assert!((argument_principle_count(1000.0) - 649.0).abs() < 0.5);
}

#[test]
fn file_round_trip() {
    let z = compute_zeros(100.0).unwrap();
    let mut buf = Vec::new();
    z.write_to(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 29);
    let back = load_zeros(&buf[..]).unwrap();
    assert_eq!(back.len(), z.len());
    assert_eq!(back.source(), ZeroSource::Loaded);
    assert_eq!(back.complete_to(), 100.0);
    for (a, b) in back.gammas().iter().zip(z.gammas()) {
        assert!((a - b).abs() < 1e-11);
    }
}

#[test]
fn loader_rejects_bad_files() {
    let unsorted = "21.022039638771\n14.134725141735\n# complete_to=30\n";
    assert!(matches!(load_zeros(unsorted.as_bytes()), Err(Error::Parse { .. })));
    let short = "14.1347\n# complete_to=20\n";
    assert!(load_zeros(short.as_bytes()).is_err());
    let below = "14.134725141735\n# complete_to=10\n";
    assert!(load_zeros(below.as_bytes()).is_err());
    assert!(load_zeros("".as_bytes()).is_err());
}

#[test]
fn reciprocal_sum_bracket() {
    let z = compute_zeros(1000.0).unwrap();
    let b = reciprocal_square_sum(&z).unwrap();
    assert!(b.contains(reciprocal_square_sum_exact()));
    assert!(b.contains(0.04619));
}

#[test]
fn counting_bounds_hold() {
    let z = compute_zeros(300.0).unwrap();
    for t in 3..299 {
        assert!(check_lemma3(&z, t as f64).unwrap().passed(), "T = {t}");
    }
    assert!(check_lemma3(&z, 299.5).is_err());
}

#[test]
fn riemann_siegel_domain() {
    assert!(riemann_siegel_z(5.0).is_err());
    assert!(riemann_siegel_z(ODLYZKO[0]).unwrap().abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gram_points_increase(n in -1i64..5000) {
        prop_assert!(gram_point(n + 1) > gram_point(n));
    }

    #[test]
    fn truncation_is_prefix(t in 20.0f64..200.0) {
        let z = compute_zeros(200.0).unwrap();
        let tr = z.truncated(t).unwrap();
        prop_assert_eq!(tr.complete_to(), t);
        prop_assert_eq!(tr.gammas(), &z.gammas()[..z.count_up_to(t)]);
    }
}
