mod common;

use common::*;
use detl::logic::{bisimilar, language_equivalence_probe, ProbeParams, ProbeVerdict};
use detl::semantics::{eval, product_update};
use proptest::prelude::*;

fn params() -> ProbeParams {
    ProbeParams { max_depth: 2, ..ProbeParams::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Witnesses are bisimulations, and bisimilar points agree on formulas.
    #[test]
    fn witnesses_are_bisimulations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_mixed_model(&mut r, 4);
        let n = if r.random_bool(0.5) {
            m.clone()
        } else {
            let u = random_history_preserving_action(&mut r, "U", &ActionShape::default());
            product_update(&m, &u).unwrap()
        };
        for w in m.worlds() {
            for v in n.worlds() {
                match bisimilar(&m, w, &n, v).unwrap() {
                    Some(z) => {
                        prop_assert!(z.pairs.contains(&(w.clone(), v.clone())));
                        prop_assert!(is_bisimulation(&m, &n, &z.pairs));
                        let p = language_equivalence_probe(&m, w, &n, v, &params()).unwrap();
                        prop_assert!(matches!(p, ProbeVerdict::Agree { .. }), "probe separates {} and {}", w, v);
                    }
                    None => {
                        if let ProbeVerdict::Disagree(f) = language_equivalence_probe(&m, w, &n, v, &params()).unwrap() {
                            prop_assert_ne!(eval(&m, w, &f).unwrap(), eval(&n, v, &f).unwrap());
                        }
                    }
                }
            }
        }
    }

    /// Random formulas never separate bisimilar points.
    #[test]
    fn bisimilar_points_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_mixed_model(&mut r, 4);
        let u = random_history_preserving_action(&mut r, "U", &ActionShape::default());
        let n = product_update(&m, &u).unwrap();
        let fs: Vec<_> = (0..20).map(|_| random_formula(&mut r, 3, &[], 0)).collect();
        for w in m.worlds() {
            for v in n.worlds() {
                if bisimilar(&m, w, &n, v).unwrap().is_some() {
                    for f in &fs {
                        prop_assert_eq!(eval(&m, w, f).unwrap(), eval(&n, v, f).unwrap());
                    }
                }
            }
        }
    }
}
