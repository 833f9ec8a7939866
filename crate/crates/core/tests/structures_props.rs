use nbibp::numerics::{digamma, log_rising_factorial, RngStream};
use nbibp::structures::{
    enumerate, log_pmf_array, log_pmf_struct, CombStruct, FeatureArray, History, Hyperparams,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn history(n: usize) -> impl Strategy<Value = History> {
    prop::collection::vec(0u64..6, n)
        .prop_filter("non-zero", |v| v.iter().any(|&x| x > 0))
        .prop_map(|v| History::new(v).unwrap())
}

fn array() -> impl Strategy<Value = FeatureArray> {
    (1usize..5).prop_flat_map(|n| {
        prop::collection::vec(history(n), 0..8)
            .prop_map(move |cols| FeatureArray::new(n, cols).unwrap())
    })
}

fn hyper() -> impl Strategy<Value = Hyperparams> {
    (0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0).prop_map(|(r, c, t)| Hyperparams::new(r, c, t).unwrap())
}

proptest! {
    #[test]
    fn labeling_round_trip(w in array(), seed in any::<u64>()) {
        let m = CombStruct::from_array(&w);
        let mut rng = RngStream::new(seed, 0);
        prop_assert_eq!(CombStruct::from_array(&m.uniform_label(&mut rng)), m);
    }

    #[test]
    fn left_order_is_canonical(w in array(), seed in any::<u64>()) {
        let l = w.left_order();
        prop_assert_eq!(l.left_order(), l.clone());
        let mut cols = w.columns().to_vec();
        cols.shuffle(&mut RngStream::new(seed, 0));
        let shuffled = FeatureArray::new(w.n(), cols).unwrap();
        prop_assert_eq!(shuffled.left_order(), l);
        prop_assert_eq!(CombStruct::from_array(&shuffled), CombStruct::from_array(&w));
    }

    #[test]
    fn array_and_structure_pmfs_agree(w in array(), hp in hyper()) {
        let m = CombStruct::from_array(&w);
        let a = log_pmf_array(&w, &hp).unwrap();
        let s = log_pmf_struct(&m, &hp).unwrap() - m.ordering_count();
        prop_assert!((a - s).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, s);
    }

    #[test]
    fn row_permutation_invariance(w in array(), hp in hyper(), seed in any::<u64>()) {
        let m = CombStruct::from_array(&w);
        let mut perm: Vec<usize> = (0..w.n()).collect();
        perm.shuffle(&mut RngStream::new(seed, 0));
        let base = log_pmf_struct(&m, &hp).unwrap();
        let moved = log_pmf_struct(&m.permute_rows(&perm).unwrap(), &hp).unwrap();
        prop_assert_eq!(base.to_bits(), moved.to_bits());
    }

    #[test]
    fn projection_never_adds_features(w in array()) {
        prop_assume!(w.n() >= 2);
        let m = CombStruct::from_array(&w);
        let p = m.project().unwrap();
        prop_assert!(p.kappa() <= m.kappa());
        prop_assert_eq!(p.n(), m.n() - 1);
    }

    #[test]
    fn json_round_trips(w in array()) {
        let s = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<FeatureArray>(&s).unwrap(), w.clone());
        let m = CombStruct::from_array(&w);
        let s = serde_json::to_string(&m).unwrap();
        prop_assert_eq!(serde_json::from_str::<CombStruct>(&s).unwrap(), m);
    }

    #[test]
    fn digamma_recurrence(x in 1e-3f64..1e4) {
        let lhs = digamma(x + 1.0).unwrap();
        let rhs = digamma(x).unwrap() + 1.0 / x;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn rising_factorial_splits(a in 0.01f64..50.0, m in 0u64..100, k in 0u64..100) {
        let whole = log_rising_factorial(a, m + k).unwrap();
        let parts = log_rising_factorial(a, m).unwrap() + log_rising_factorial(a + m as f64, k).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-10 * (1.0 + whole.abs()));
    }
}

#[test]
fn enumerated_mass_is_nearly_one() {
    // light tails keep the mass outside s(h) ≤ 6, κ ≤ 4 small
    let hp = Hyperparams::new(0.5, 6.0, 0.2).unwrap();
    for n in 1..=2 {
        let total: f64 = enumerate::structures(n, 6, 4)
            .iter()
            .map(|m| log_pmf_struct(m, &hp).unwrap().exp())
            .sum();
        assert!(total <= 1.0 + 1e-12 && total > 0.999, "n={n}: {total}");
    }
}

#[test]
fn enumerated_mass_converges_with_support() {
    let hp = Hyperparams::new(1.0, 1.0, 1.0).unwrap();
    let mass = |s: u64, k: u64| -> f64 {
        enumerate::structures(1, s, k)
            .iter()
            .map(|m| log_pmf_struct(m, &hp).unwrap().exp())
            .sum()
    };
    let small = mass(4, 3);
    let large = mass(12, 6);
    assert!(small < large && large <= 1.0 + 1e-12);
    // at n = 1 the features are a Poisson(1) number of Digamma(1, 1) masses,
    // so κ ≤ 6 and s ≤ 12 leave out P(κ > 6) plus the mass-tail events
    assert!(large > 0.5);
}
