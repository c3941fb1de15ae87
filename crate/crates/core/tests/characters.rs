use num_complex::Complex64;
use primerace::characters::{build_characters, count_square_roots_of_unity};
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn small_tables() {
    let t = build_characters(5).unwrap();
    assert_eq!(t.len(), 4);
    assert_eq!(t.character(0).value(3), Complex64::new(1.0, 0.0));
    let t = build_characters(8).unwrap();
    assert!(t.characters().all(|c| c.is_real()));
    assert_eq!(count_square_roots_of_unity(8), 4);
    assert_eq!(count_square_roots_of_unity(15), 4);
    assert_eq!(count_square_roots_of_unity(7), 2);
}

#[test]
fn mod4_character() {
    let t = build_characters(4).unwrap();
    let chi = t.character(1);
    assert_eq!(chi.parity(), 1);
    assert!((chi.value(3) + 1.0).norm() < 1e-15);
    assert_eq!(chi.conductor(), 4);
}

#[test]
fn conductors_mod_12() {
    let t = build_characters(12).unwrap();
    let mut c: Vec<u64> = t.characters().map(|c| c.conductor()).collect();
    c.sort();
    assert_eq!(c, vec![1, 3, 4, 12]);
}

#[test]
fn gauss_sum_modulus() {
    for q in [3u64, 5, 7, 8, 11, 13] {
        for chi in build_characters(q).unwrap().characters() {
            if chi.is_primitive() && !chi.is_principal() {
                assert!((chi.gauss_sum().norm() - (q as f64).sqrt()).abs() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orthogonality(q in 3u64..80) {
        let t = build_characters(q).unwrap();
        let phi = (1..q).filter(|&a| gcd(a, q) == 1).count();
        prop_assert_eq!(t.len(), phi);
        for i in 0..t.len() {
            for j in 0..t.len() {
                let s: Complex64 = (0..q as i64).map(|n| t.value(i, n) * t.value(j, n).conj()).sum();
                let want = if i == j { phi as f64 } else { 0.0 };
                prop_assert!((s - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn multiplicative(q in 3u64..120, m in 0i64..500, n in 0i64..500) {
        let t = build_characters(q).unwrap();
        for chi in t.characters() {
            let lhs = chi.value(m * n);
            let rhs = chi.value(m) * chi.value(n);
            prop_assert!((lhs - rhs).norm() < 1e-9);
            prop_assert!((chi.value(m + q as i64) - chi.value(m)).norm() < 1e-12);
        }
    }

    #[test]
    fn primitive_agrees_on_units(q in 3u64..60, n in 1i64..1000) {
        let t = build_characters(q).unwrap();
        for chi in t.characters() {
            let p = chi.primitive();
            prop_assert_eq!(q % p.modulus(), 0);
            if gcd(n as u64, q) == 1 {
                prop_assert!((p.value(n) - chi.value(n)).norm() < 1e-9);
            }
        }
    }
}
