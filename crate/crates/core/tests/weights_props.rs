use hp_core::exponents::{kappa_argmin, kappa_of, Monotonicity};
use hp_core::weights::{certified_constant, ConstantForm};
use hp_core::{AffineProfile, Direction, Domain, ExponentField, LimitMode, LimitWeightParams, WeightParams};
use proptest::prelude::*;

/// Weight parameters with `αβ < N` and a point, in dimension 1 to 3.
fn weight_and_point() -> impl Strategy<Value = (WeightParams, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|dim| {
        (
            0.0..3.0f64,
            0.1..4.0f64,
            -3.0..3.0f64,
            prop::collection::vec(-2.0..2.0f64, dim),
            prop::collection::vec(-2.0..2.0f64, dim),
        )
            .prop_filter_map("alpha*beta < N", move |(lambda, alpha, beta, x0, x)| {
                if alpha * beta >= dim as f64 || beta == 0.0 {
                    return None;
                }
                let lambda = if beta > 0.0 { lambda } else { lambda.max(1e-3) };
                WeightParams::new(lambda, alpha, beta, x0).ok().map(|w| (w, x))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn divergence_dominates_kappa_plus((w, x) in weight_and_point()) {
        let lhs = w.divergence_identity(&x);
        let rhs = w.kappa_plus(None) * w.evaluate(&x);
        prop_assert!(lhs >= rhs - 1e-12 * lhs.abs());
    }

    #[test]
    fn refined_kappa_is_a_lower_bound_on_the_domain(
        (w, center, radius, seeds) in weight_and_point().prop_flat_map(|(w, _)| {
            let d = w.dim();
            (Just(w), prop::collection::vec(-2.0..2.0f64, d), 0.1..1.5f64, prop::collection::vec(-1.0..1.0f64, 60 * d))
        })
    ) {
        let ball = Domain::ball(center.clone(), radius).unwrap();
        let kappa = w.kappa_plus(Some(&ball));
        prop_assert!(kappa >= w.kappa_plus(None) - 1e-12);
        for c in seeds.chunks(w.dim()) {
            let x: Vec<f64> = center.iter().zip(c).map(|(a, b)| a + radius * b).collect();
            if ball.contains(&x) {
                let ratio = w.divergence_identity(&x) / w.evaluate(&x);
                prop_assert!(ratio >= kappa - 1e-12 * ratio.abs());
            }
        }
    }

    #[test]
    fn affine_profiles_stay_in_range(a in 1.0..4.0f64, b in -2.0..2.0f64, t in 0.0..10.0f64) {
        let profile = AffineProfile::new(a, b, 4.0).unwrap();
        let v = profile.evaluate(t);
        prop_assert!((1.0..=4.0).contains(&v));
        let expected = match b.partial_cmp(&0.0).unwrap() {
            std::cmp::Ordering::Less => Monotonicity::Decreasing,
            std::cmp::Ordering::Greater => Monotonicity::Increasing,
            std::cmp::Ordering::Equal => Monotonicity::Constant,
        };
        prop_assert_eq!(profile.monotonicity(), expected);
    }

    #[test]
    fn kappa_is_bounded_below_by_its_minimum(p in 1.0..6.0f64) {
        prop_assert!(kappa_of(p) >= kappa_of(kappa_argmin()) - 1e-15);
    }

    #[test]
    fn kappa_of_field_dominates_pointwise_values(
        (a, b, seeds) in (1.0..3.0f64, -1.5..1.5f64, prop::collection::vec(-1.0..1.0f64, 100))
    ) {
        let field = ExponentField::radial(vec![0.0; 2], AffineProfile::new(a, b, 3.5).unwrap()).unwrap();
        let disc = Domain::ball(vec![0.0; 2], 1.0).unwrap();
        let kappa = field.kappa_p(&disc);
        for c in seeds.chunks(2) {
            if disc.contains(c) {
                prop_assert!(kappa_of(field.evaluate(c)) <= kappa * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn kappa_minimum_location_and_value() {
    let t = kappa_argmin();
    assert!((t - (1.0 + 1.0 / (2.0 * std::f64::consts::E))).abs() < 1e-12);
    assert_eq!(kappa_of(1.0), 2.0);
    assert_eq!(kappa_of(2.0), 4.0);
    // central differences vanish at the minimum
    let h = 1e-6;
    assert!((kappa_of(t + h) - kappa_of(t - h)).abs() < 1e-9);
}

#[test]
fn constant_field_kappa_matches_modular_constant() {
    // constant p = 2 on the unit square along e1: kappa(2) * c^2 = 4 * 0.25
    let field = ExponentField::constant(2.0).unwrap();
    let k = field
        .kappa_domain_sigma(&Domain::unit_cube(2), &Direction::axis(2, 0))
        .unwrap();
    assert!((k.value - 1.0).abs() < 1e-9);
}

#[test]
fn certified_constants_by_formula() {
    assert_eq!(certified_constant(ConstantForm::SharpHardy, 2.0, 3).unwrap(), 4.0);
    assert_eq!(certified_constant(ConstantForm::Dual, 3.0, 3).unwrap(), 1.0);
    let gamma = certified_constant(ConstantForm::GammaHardy { gamma: 1.0 }, 2.0, 3).unwrap();
    assert!((gamma - 1.0).abs() < 1e-15);
    let classical = certified_constant(
        ConstantForm::ClassicalPoincare {
            circumradius: 2f64.sqrt() / 2.0,
        },
        2.0,
        2,
    )
    .unwrap();
    assert!((classical - 0.5).abs() < 1e-15);
    assert!(certified_constant(ConstantForm::SharpHardy, 3.0, 3).is_err());
}

#[test]
fn limit_weights_validate_gamma() {
    assert!(LimitWeightParams::new(3.0, LimitMode::Singular, 3).is_err());
    assert!(LimitWeightParams::new(0.0, LimitMode::Singular, 3).is_err());
    let dual = LimitWeightParams::new(1.5, LimitMode::Dual, 2).unwrap();
    assert!((dual.evaluate(&[2.0, 0.0], &[0.0, 0.0]) - 2f64.powf(1.5)).abs() < 1e-14);
}

#[test]
fn weight_hypothesis_is_enforced() {
    let err = WeightParams::new(1.0, 2.0, 1.5, vec![0.0; 3]).unwrap_err();
    assert!(err.to_string().contains("alpha*beta < N"), "{err}");
}
