mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pushmean_core::decide::{decide_with, extract_witness, Flavor, Objective, Relation};
use pushmean_core::model::Wps;
use pushmean_core::summary::{base_summary, bounded_summary, full_summary, next_bounded_summary, omega_closure};

fn system(seed: u64) -> Wps {
    common::random_wps(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn answer(w: &Wps, f: Flavor, r: Relation, t: &BigRational) -> bool {
    decide_with(w, &Objective::new(f, r).with_threshold(t.clone()), false).answer
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![Just(Flavor::LimInfAvg), Just(Flavor::LimSupAvg)]
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Strict), Just(Relation::NonStrict)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn summaries_grow_with_depth(seed in any::<u64>(), d in 0u32..6) {
        let w = system(seed);
        let s = bounded_summary(&w, d);
        prop_assert!(s.le(&bounded_summary(&w, d + 1)));
        prop_assert_eq!(next_bounded_summary(&w, &s), bounded_summary(&w, d + 1));
        prop_assert!(base_summary(&w).le(&full_summary(&w)));
    }

    #[test]
    fn closure_is_idempotent_and_above(seed in any::<u64>(), d in 0u32..4) {
        let w = system(seed);
        let s = bounded_summary(&w, d);
        let c = omega_closure(&w, &s);
        prop_assert!(s.le(&c));
        prop_assert_eq!(omega_closure(&w, &c), c);
    }

    #[test]
    fn shifting_weights_shifts_means(seed in any::<u64>(), c in -2i64..=2, p in -3i64..=3, q in 1i64..=3,
                                     f in flavor(), r in relation()) {
        let w = system(seed);
        let shifted = w.map_weights(|x| x + c);
        let t = ratio(p, q);
        prop_assert_eq!(answer(&w, f, r, &t), answer(&shifted, f, r, &(&t + ratio(c, 1))));
    }

    #[test]
    fn scaling_weights_scales_means(seed in any::<u64>(), k in 1i64..=4, p in -3i64..=3, q in 1i64..=3,
                                    f in flavor(), r in relation()) {
        let w = system(seed);
        let scaled = w.map_weights(|x| x * k);
        let t = ratio(p, q);
        prop_assert_eq!(answer(&w, f, r, &t), answer(&scaled, f, r, &(&t * ratio(k, 1))));
    }

    #[test]
    fn answers_are_monotone(seed in any::<u64>(), p in -4i64..=4, f in flavor()) {
        let w = system(seed);
        let t = ratio(p, 2);
        let strict = answer(&w, f, Relation::Strict, &t);
        let nonstrict = answer(&w, f, Relation::NonStrict, &t);
        prop_assert!(!strict || nonstrict);
        prop_assert!(!nonstrict || answer(&w, f, Relation::Strict, &(&t - ratio(1, 10))));
        prop_assert!(!answer(&w, f, Relation::NonStrict, &(&t + ratio(1, 2))) || nonstrict);
        if f == Flavor::LimInfAvg {
            prop_assert!(!nonstrict || answer(&w, Flavor::LimSupAvg, Relation::NonStrict, &t));
        }
    }

    #[test]
    fn witnesses_beat_the_threshold(seed in any::<u64>(), p in -4i64..=4, q in 1i64..=3) {
        let w = system(seed);
        let t = ratio(p, q);
        let obj = Objective::new(Flavor::LimInfAvg, Relation::Strict).with_threshold(t.clone());
        match extract_witness(&w, &obj) {
            Ok(l) => {
                prop_assert!(l.check(&w).is_ok());
                let mean = BigRational::new(l.cycle_weight(&w), BigInt::from(l.cycle.len()));
                prop_assert!(mean > t);
            }
            Err(_) => prop_assert!(!decide_with(&w, &obj, false).answer),
        }
    }

    #[test]
    fn negation_flips_cycle_signs(seed in any::<u64>()) {
        let w = system(seed);
        let obj = Objective::new(Flavor::LimSupAvg, Relation::Strict);
        if let Ok(l) = extract_witness(&w.negated(), &obj) {
            prop_assert!(l.cycle_weight(&w).is_negative());
        }
    }
}
