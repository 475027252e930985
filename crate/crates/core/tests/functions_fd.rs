use hp_core::numeric::{distance, norm};
use hp_core::{Domain, ScalarField, TestFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fourth-order central difference of `u` at `x` along every axis.
fn fd_gradient(u: &TestFunction, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let at = |s: f64| {
                let mut y = x.to_vec();
                y[k] += s * h;
                u.value(&y)
            };
            (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
        })
        .collect()
}

/// Relative error against the analytic gradient, measured against a floor of
/// `1e-3` times the gradient bound where the gradient itself is tiny.
fn check_family(u: &TestFunction, points: &[Vec<f64>], h: f64) {
    let floor = 1e-3 * u.gradient_sup_bound();
    let mut g = vec![0.0; u.dim()];
    for x in points {
        u.gradient(x, &mut g);
        let fd = fd_gradient(u, x, h);
        let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / norm(&g).max(floor);
        assert!(rel < 1e-6, "{u} at {x:?}: analytic {g:?} vs fd {fd:?} (rel {rel:e})");
    }
}

fn sample_ball(rng: &mut ChaCha8Rng, center: &[f64], r_lo: f64, r_hi: f64, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = center.iter().map(|c| c + rng.gen_range(-r_hi..r_hi)).collect();
        let r = distance(&x, center);
        if r > r_lo && r < r_hi {
            out.push(x);
        }
    }
    out
}

#[test]
fn bump_gradients_match_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dim in 1..=3 {
        let center = vec![0.2; dim];
        let u = TestFunction::bump(center.clone(), 0.7).unwrap().scaled_by(2.5);
        // keep the stencil off the support boundary, where all derivatives vanish anyway
        let pts = sample_ball(&mut rng, &center, 0.0, 0.7 * 0.97, 1000);
        check_family(&u, &pts, 1e-4);
    }
}

#[test]
fn tensor_bump_gradients_match_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for dim in 1..=3 {
        let lo: Vec<f64> = (0..dim).map(|k| -0.5 - 0.1 * k as f64).collect();
        let hi: Vec<f64> = (0..dim).map(|k| 0.4 + 0.3 * k as f64).collect();
        let u = TestFunction::tensor_bump(&Domain::cuboid(lo.clone(), hi.clone()).unwrap()).unwrap();
        let pts: Vec<Vec<f64>> = (0..1000)
            .map(|_| {
                (0..dim)
                    .map(|k| {
                        let w = hi[k] - lo[k];
                        lo[k] + w * rng.gen_range(0.03..0.97)
                    })
                    .collect()
            })
            .collect();
        check_family(&u, &pts, 1e-5);
    }
}

#[test]
fn hardy_family_gradients_match_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (dim, p, eps) in [(3, 2.0, 0.1), (3, 2.0, 0.01), (2, 1.5, 0.05), (3, 1.0, 0.2)] {
        let delta = 0.01;
        let u = TestFunction::hardy_family(dim, p, eps, delta, 1.0).unwrap();
        // the profile has a kink at r = delta; stay clear of it
        let pts = sample_ball(&mut rng, &vec![0.0; dim], 0.02, 0.99, 1000);
        check_family(&u, &pts, 1e-6);
        let inner = sample_ball(&mut rng, &vec![0.0; dim], 0.0, 0.009, 1000);
        check_family(&u, &inner, 1e-6);
    }
}

#[test]
fn transformed_gradients_match_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = TestFunction::bump(vec![0.0, 0.0], 1.0)
        .unwrap()
        .dilated(0.4)
        .unwrap()
        .translated(&[1.0, -0.5])
        .scaled_by(-3.0);
    let pts = sample_ball(&mut rng, &[1.0, -0.5], 0.0, 0.4 * 0.97, 1000);
    check_family(&u, &pts, 1e-5);
}

#[test]
fn bounds_dominate_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let families = [
        TestFunction::bump(vec![0.0; 3], 0.8).unwrap().scaled_by(1.7),
        TestFunction::tensor_bump(&Domain::cuboid(vec![-1.0, 0.0], vec![0.5, 0.3]).unwrap()).unwrap(),
        TestFunction::hardy_family(3, 2.0, 0.05, 0.01, 1.0).unwrap(),
    ];
    for u in &families {
        let (lo, hi) = u.support().bounding_box();
        let mut g = vec![0.0; u.dim()];
        for _ in 0..5000 {
            let x: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
            assert!(u.value(&x).abs() <= u.sup_norm_bound() * (1.0 + 1e-12));
            u.gradient(&x, &mut g);
            assert!(norm(&g) <= u.gradient_sup_bound() * (1.0 + 1e-12), "{u}");
            if !u.support().contains(&x) {
                assert_eq!(u.value(&x), 0.0);
            }
        }
    }
}
