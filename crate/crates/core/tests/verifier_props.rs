use hp_core::verifier::{summarize, sweep, verify, GridSettings};
use hp_core::{AffineProfile, Direction, Domain, ExponentField, InequalityInstance, TestFunction, WeightParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coarse() -> GridSettings {
    GridSettings {
        n: 96,
        n_3d: 24,
        exclusion_multiplier: 2.0,
    }
}

#[test]
fn interval_bump_passes() {
    let inst =
        InequalityInstance::directional_poincare(Domain::interval(0.0, 1.0).unwrap(), 2.0, Direction::axis(1, 0))
            .unwrap();
    let u = TestFunction::bump(vec![0.5], 0.5).unwrap();
    let r = verify(&inst, &u, &GridSettings::default()).unwrap();
    assert!(r.pass && r.ratio < 1.0, "{r:?}");
    assert_eq!(r.constant, 1.0);
}

#[test]
fn off_center_bump_satisfies_sharp_hardy() {
    let inst = InequalityInstance::sharp_hardy(Domain::whole_space(3), 2.0, vec![0.0; 3]).unwrap();
    let u = TestFunction::bump(vec![0.5, 0.0, 0.0], 0.25).unwrap();
    let r = verify(&inst, &u, &GridSettings::default()).unwrap();
    assert!(r.pass && r.ratio < 1.0, "{r:?}");
    // halving the grid changes the sides by no more than their error bars
    let half = verify(
        &inst,
        &u,
        &GridSettings {
            n_3d: 32,
            ..GridSettings::default()
        },
    )
    .unwrap();
    assert!((half.lhs.value - r.lhs.value).abs() <= 3.0 * half.lhs.error_estimate);
    assert!((half.rhs.value - r.rhs.value).abs() <= 3.0 * half.rhs.error_estimate);
}

#[test]
fn translation_leaves_ratio_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let weight = WeightParams::new(0.5, 2.0, 0.5, vec![0.1, -0.2]).unwrap();
    let instances = [
        InequalityInstance::general_weighted(Domain::ball(vec![0.0; 2], 1.0).unwrap(), 2.0, weight, false).unwrap(),
        InequalityInstance::gamma_hardy(Domain::whole_space(2), 1.5, 1.0, vec![0.0; 2]).unwrap(),
        InequalityInstance::directional_poincare(Domain::unit_cube(2), 3.0, Direction::axis(2, 1)).unwrap(),
    ];
    let u = TestFunction::bump(vec![0.3, 0.35], 0.25).unwrap();
    for inst in &instances {
        let base = verify(inst, &u, &coarse()).unwrap();
        for _ in 0..3 {
            let t = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let moved = verify(&inst.translated(&t), &u.translated(&t), &coarse()).unwrap();
            let rel = (moved.ratio - base.ratio).abs() / base.ratio;
            assert!(rel <= 1e-10, "{inst}: {} vs {} ({rel:e})", moved.ratio, base.ratio);
        }
    }
}

#[test]
fn hardy_ratio_is_scale_invariant() {
    let inst = InequalityInstance::sharp_hardy(Domain::whole_space(3), 2.0, vec![0.0; 3]).unwrap();
    let u = TestFunction::bump(vec![0.4, 0.1, 0.0], 0.3).unwrap();
    let base = verify(&inst, &u, &GridSettings::default()).unwrap();
    for s in [0.5, 2.0, 3.0] {
        let scaled = verify(&inst, &u.dilated(s).unwrap(), &GridSettings::default()).unwrap();
        let tol = base.tolerance_used + scaled.tolerance_used;
        assert!((scaled.ratio - base.ratio).abs() <= tol * base.ratio, "s = {s}");
    }
}

#[test]
fn weighted_inequality_holds_at_random_centers() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let domain = Domain::ball(vec![0.0; 2], 1.0).unwrap();
    let u = TestFunction::bump(vec![0.2, -0.1], 0.6).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let x0 = vec![rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        for (lambda, alpha, beta) in [(1.0, 2.0, 0.5), (0.5, 1.0, -1.0)] {
            let w = WeightParams::new(lambda, alpha, beta, x0.clone()).unwrap();
            let inst = InequalityInstance::general_weighted(domain.clone(), 2.0, w, false).unwrap();
            let r = verify(&inst, &u, &coarse()).unwrap();
            assert!(r.pass, "x0 = {x0:?}: {r:?}");
            worst = worst.max(r.ratio);
        }
    }
    assert!(worst > 0.0);
}

#[test]
fn ratio_is_continuous_as_p_decreases_to_one() {
    let domain = Domain::interval(0.0, 1.0).unwrap();
    let u = TestFunction::bump(vec![0.45], 0.4).unwrap();
    let sigma = Direction::axis(1, 0);
    let ratio = |p: f64| {
        let inst = InequalityInstance::directional_poincare(domain.clone(), p, sigma.clone()).unwrap();
        verify(&inst, &u, &GridSettings::default()).unwrap().ratio
    };
    let ps = [1.1, 1.01, 1.001];
    let rs: Vec<f64> = ps.iter().map(|&p| ratio(p)).collect();
    // least-squares line through the three samples, evaluated at p = 1
    let mp = ps.iter().sum::<f64>() / 3.0;
    let mr = rs.iter().sum::<f64>() / 3.0;
    let slope = ps.iter().zip(&rs).map(|(p, r)| (p - mp) * (r - mr)).sum::<f64>()
        / ps.iter().map(|p| (p - mp).powi(2)).sum::<f64>();
    let extrapolated = mr + slope * (1.0 - mp);
    assert!((ratio(1.0) - extrapolated).abs() <= 1e-2);
}

#[test]
fn sweep_is_row_major_and_records_errors() {
    assert!(sweep(&[], &[], &coarse()).is_empty());
    let instances = vec![
        InequalityInstance::classical_poincare(Domain::unit_cube(2), 2.0).unwrap(),
        InequalityInstance::classical_poincare(Domain::unit_cube(2), 1.5).unwrap(),
        InequalityInstance::directional_poincare(Domain::unit_cube(2), 3.0, Direction::axis(2, 0)).unwrap(),
    ];
    let functions = vec![
        TestFunction::bump(vec![0.5, 0.5], 0.4).unwrap(),
        TestFunction::bump(vec![0.9, 0.5], 0.4).unwrap(),
    ];
    let rows = sweep(&instances, &functions, &coarse());
    let order: Vec<(usize, usize)> = rows.iter().map(|r| (r.instance_index, r.function_index)).collect();
    assert_eq!(order, vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]);
    let s = summarize(&rows);
    assert_eq!((s.total, s.passed, s.failed, s.errors), (6, 3, 0, 3));
}

#[test]
fn radial_exponent_requires_unit_bounded_functions() {
    let field = ExponentField::radial(vec![0.0; 2], AffineProfile::new(2.0, -0.5, 3.0).unwrap()).unwrap();
    let inst = InequalityInstance::var_exp_radial(
        Domain::ball(vec![0.0; 2], 1.0).unwrap(),
        field,
        Direction::axis(2, 0),
        false,
    )
    .unwrap();
    let u = TestFunction::bump(vec![0.0, 0.0], 0.8).unwrap().scaled_by(5.0);
    assert!(verify(&inst, &u, &coarse()).is_err());
    let r = verify(&inst, &u.clamp_unit(), &coarse()).unwrap();
    assert!(r.pass, "{r:?}");
}

fn instance_strategy() -> impl Strategy<Value = (InequalityInstance, TestFunction)> {
    let p = prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]);
    (p, 0usize..6, -0.2..0.2f64, -0.2..0.2f64, 0.15..0.45f64).prop_map(|(p, which, cx, cy, r)| {
        let disc = Domain::ball(vec![0.0; 2], 1.0).unwrap();
        let u = TestFunction::bump(vec![cx, cy], r).unwrap();
        let inst = match which {
            0 => InequalityInstance::directional_poincare(disc, p, Direction::normalized(vec![1.0, 2.0]).unwrap())
                .unwrap(),
            1 => InequalityInstance::classical_poincare(disc, p).unwrap(),
            2 => InequalityInstance::dual_hardy_plain(disc, p, vec![cx, -cy]).unwrap(),
            3 => InequalityInstance::dual_hardy_gamma(disc, p, 0.7, vec![0.1, 0.1]).unwrap(),
            4 => InequalityInstance::best_basis_poincare(disc, p).unwrap(),
            _ => InequalityInstance::general_weighted(
                disc,
                p,
                WeightParams::new(0.3, 1.5, -0.5, vec![cy, cx]).unwrap(),
                true,
            )
            .unwrap(),
        };
        (inst, u)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn admissible_pairs_never_violate((inst, u) in instance_strategy()) {
        let r = verify(&inst, &u, &coarse()).unwrap();
        prop_assert!(r.pass, "{}: ratio {} tol {}", inst, r.ratio, r.tolerance_used);
        prop_assert!(r.ratio <= 1.0 + r.tolerance_used);
    }
}
