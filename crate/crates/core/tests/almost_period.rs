use primerace::almost_period::{find_almost_periods, grid_step, pigeonhole_bound, torus_norm};
use primerace::Error;
use proptest::prelude::*;

fn norm_at(freqs: &[f64], s: f64) -> f64 {
    let v: Vec<f64> = freqs.iter().map(|t| s * t).collect();
    torus_norm(&v)
}

/// First s > 1 with ‖s·t‖ < ε on a dense uniform grid.
fn dense_first(freqs: &[f64], eps: f64, step: f64, limit: f64) -> Option<f64> {
    let mut k = 1u64;
    loop {
        let s = 1.0 + k as f64 * step;
        if s > limit {
            return None;
        }
        if norm_at(freqs, s) < eps {
            return Some(s);
        }
        k += 1;
    }
}

#[test]
fn integer_frequency() {
    let set = find_almost_periods(&[1.0], 0.1, 2, 1.0).unwrap();
    assert_eq!(set.s.len(), 2);
    assert!(set.s[0] > 1.0 && set.s[0] < 1.1);
    assert!(set.verify().is_ok());
}

#[test]
fn json_shape() {
    let set = find_almost_periods(&[2f64.sqrt(), 3f64.sqrt()], 0.2, 3, 1.0).unwrap();
    let v = serde_json::to_value(&set).unwrap();
    for key in ["freqs", "epsilon", "N", "min_gap", "s", "M"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn rejects_bad_input() {
    assert!(find_almost_periods(&[], 0.1, 1, 1.0).is_err());
    assert!(find_almost_periods(&[1.0], 0.0, 1, 1.0).is_err());
    assert!(find_almost_periods(&[-1.0], 0.1, 1, 1.0).is_err());
    assert!(matches!(
        find_almost_periods(&[1e6], 1e-3, 10, 1.0),
        Err(Error::Capacity { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn invariants_and_oracle(
        freqs in prop::collection::vec(0.3f64..20.0, 1..=3),
        eps in 0.05f64..0.3,
        count in 1usize..4,
        min_gap in 0.5f64..2.0,
    ) {
        let set = find_almost_periods(&freqs, eps, count, min_gap).unwrap();
        prop_assert!(set.verify().is_ok());
        prop_assert!(set.s.iter().all(|&s| norm_at(&freqs, s) < eps));
        prop_assert!(set.s.windows(2).all(|w| w[1] >= w[0] + min_gap));
        prop_assert!(*set.s.last().unwrap() <= pigeonhole_bound(freqs.len(), eps, count) + 1.0);
        let step = grid_step(&freqs, eps);
        let oracle_step = step / 4.0;
        if let Some(o) = dense_first(&freqs, eps, oracle_step, set.s[0] + 2.0 * step) {
            prop_assert!((o - set.s[0]).abs() <= step, "oracle {} found {}", o, set.s[0]);
        }
    }
}
