use nbue::statistic::gamma_star_order_form;
use nbue::{coefficients, gamma_star, make_sample, scale, ScaleName, StatisticVariant};
use proptest::prelude::*;

fn lifetimes() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..1e3, 2..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn statistic_lies_between_extreme_weights(xs in lifetimes(), j in 0.1f64..4.0) {
        let s = make_sample(xs).unwrap();
        let g = gamma_star(&s, StatisticVariant::Generalized(j)).unwrap();
        let (lo, hi) = coefficients(s.len(), j).unwrap().support();
        prop_assert!(g >= lo - 1e-12 && g <= hi + 1e-12);
    }

    #[test]
    fn spacings_sum_and_reconstruct(xs in lifetimes()) {
        let s = make_sample(xs).unwrap();
        let (ordered, d) = s.order_and_space();
        let total: f64 = s.values().iter().sum();
        prop_assert!((d.total() - total).abs() <= 1e-9 * total);
        let back = d.reconstruct();
        for (a, b) in back.iter().zip(ordered.sorted()) {
            prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0));
        }
        let ttt = d.total_time_on_test();
        prop_assert!((ttt[ttt.len() - 1] - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn dual_forms_agree_for_any_exponent(xs in lifetimes(), j in 0.1f64..4.0) {
        let s = make_sample(xs).unwrap();
        let a = gamma_star(&s, StatisticVariant::Generalized(j)).unwrap();
        let b = gamma_star_order_form(&s, j).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn scaling_multiplies(v in -3.0f64..3.0, n in 2usize..200, c in 0.1f64..10.0) {
        let s = scale(v, n, ScaleName::User(c)).unwrap();
        prop_assert!((s.scaled - v * c * (n as f64).sqrt()).abs() <= 1e-12 * s.scaled.abs().max(1.0));
    }
}

#[test]
fn ties_and_zeros_are_allowed() {
    let s = make_sample(vec![0.0, 2.0, 2.0, 2.0, 5.0]).unwrap();
    let a = gamma_star(&s, StatisticVariant::Generalized(1.0)).unwrap();
    let b = gamma_star_order_form(&s, 1.0).unwrap();
    assert!((a - b).abs() < 1e-14);
}
