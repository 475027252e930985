use hp_core::geometry::Shape;
use hp_core::numeric::distance;
use hp_core::{best_direction, Direction, Domain};
use proptest::prelude::*;

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, dim)
}

fn direction(dim: usize) -> impl Strategy<Value = Direction> {
    prop::collection::vec(-1.0..1.0f64, dim)
        .prop_filter("nonzero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-3)
        .prop_map(|v| Direction::normalized(v).unwrap())
}

fn primitive(dim: usize) -> impl Strategy<Value = Domain> {
    let cuboid = (point(dim), prop::collection::vec(0.1..2.0f64, dim)).prop_map(|(lo, w)| {
        let hi = lo.iter().zip(&w).map(|(a, b)| a + b).collect();
        Domain::cuboid(lo, hi).unwrap()
    });
    let ball = (point(dim), 0.1..2.0f64).prop_map(|(c, r)| Domain::ball(c, r).unwrap());
    let annulus = (point(dim), 0.1..1.0f64, 0.1..1.5f64).prop_map(|(c, a, w)| Domain::annulus(c, a, a + w).unwrap());
    prop_oneof![cuboid, ball, annulus]
}

fn bounded(dim: usize) -> impl Strategy<Value = Domain> {
    prop_oneof![
        3 => primitive(dim),
        1 => prop::collection::vec(primitive(dim), 2..4).prop_map(|m| Domain::union(m).unwrap()),
    ]
}

/// Samples points of the domain by rejection from its bounding box.
fn interior_samples(domain: &Domain, seeds: &[f64]) -> Vec<Vec<f64>> {
    let (lo, hi) = domain.bounding_box();
    let dim = domain.dim();
    seeds
        .chunks(dim)
        .filter(|c| c.len() == dim)
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(k, t)| lo[k] + t * (hi[k] - lo[k]))
                .collect::<Vec<_>>()
        })
        .filter(|x| domain.contains(x))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn directional_constant_is_half_the_projection_width(
        (domain, sigma) in (1usize..=3).prop_flat_map(|d| (bounded(d), direction(d)))
    ) {
        let c = domain.directional_constant(&sigma);
        let width = domain.support(sigma.as_slice()) + domain.support(sigma.negated().as_slice());
        prop_assert!((c - width / 2.0).abs() <= 1e-12 * (1.0 + width));
        prop_assert_eq!(c, domain.directional_constant(&sigma.negated()));
    }

    #[test]
    fn support_function_is_translation_covariant(
        (domain, sigma, t) in (1usize..=3).prop_flat_map(|d| (bounded(d), direction(d), point(d)))
    ) {
        let moved = domain.translated(&t);
        let expected = domain.support(sigma.as_slice()) + sigma.dot(&t);
        prop_assert!((moved.support(sigma.as_slice()) - expected).abs() <= 1e-10);
        prop_assert!((moved.directional_constant(&sigma) - domain.directional_constant(&sigma)).abs() <= 1e-10);
    }

    #[test]
    fn support_dominates_sampled_points(
        (domain, sigma, seeds) in (1usize..=3).prop_flat_map(|d| (
            bounded(d), direction(d), prop::collection::vec(0.0..1.0f64, 300)
        ))
    ) {
        let h = domain.support(sigma.as_slice());
        for x in interior_samples(&domain, &seeds) {
            prop_assert!(sigma.dot(&x) <= h + 1e-12);
        }
    }

    #[test]
    fn circumradius_brackets(
        (domain, sigma, seeds) in (1usize..=3).prop_flat_map(|d| (
            bounded(d), direction(d), prop::collection::vec(0.0..1.0f64, 300)
        ))
    ) {
        let enc = domain.smallest_enclosing_ball();
        prop_assert!(enc.lower_bound <= enc.radius + 1e-12);
        // projection width never exceeds the enclosing diameter
        prop_assert!(domain.directional_constant(&sigma) <= enc.radius * (1.0 + 1e-12) + 1e-12);
        for x in interior_samples(&domain, &seeds) {
            prop_assert!(distance(&x, &enc.center) <= enc.radius * (1.0 + 1e-9) + 1e-12);
        }
        let diam = domain.diameter();
        prop_assert!(diam <= 2.0 * enc.radius * (1.0 + 1e-9) + 1e-12);
        // Jung's bound R <= diam * sqrt(N / (2(N+1)))
        let n = domain.dim() as f64;
        prop_assert!(enc.lower_bound <= diam * (n / (2.0 * (n + 1.0))).sqrt() * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn distances_bound_sampled_points(
        (domain, x0, seeds) in (1usize..=3).prop_flat_map(|d| (
            bounded(d), point(d), prop::collection::vec(0.0..1.0f64, 300)
        ))
    ) {
        let lo = domain.inf_distance(&x0);
        let hi = domain.sup_distance(&x0);
        prop_assert!(lo <= hi);
        for x in interior_samples(&domain, &seeds) {
            let r = distance(&x, &x0);
            prop_assert!(r >= lo - 1e-12 && r <= hi + 1e-12);
        }
    }

    #[test]
    fn scaling_scales_constants(
        (domain, sigma, s) in (1usize..=3).prop_flat_map(|d| (primitive(d), direction(d), 0.2..5.0f64))
    ) {
        let scaled = domain.scaled(s).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-10 * b.abs().max(1.0);
        prop_assert!(rel(scaled.directional_constant(&sigma), s * domain.directional_constant(&sigma)));
        prop_assert!(rel(scaled.circumradius(), s * domain.circumradius()));
        prop_assert!(rel(scaled.diameter(), s * domain.diameter()));
    }

    #[test]
    fn best_direction_is_minimal_and_stable(domain in (1usize..=3).prop_flat_map(bounded)) {
        let basis = Direction::coordinate_basis(domain.dim());
        let (k, sigma, c) = best_direction(&domain, &basis).unwrap();
        prop_assert_eq!(&sigma, &basis[k]);
        for (j, b) in basis.iter().enumerate() {
            let cj = domain.directional_constant(b);
            prop_assert!(c <= cj);
            if j < k {
                prop_assert!(cj > c);
            }
        }
        prop_assert_eq!(best_direction(&domain, &basis).unwrap().0, k);
    }
}

#[test]
fn ties_resolve_to_the_first_direction() {
    for dim in 1..=3 {
        let basis = Direction::coordinate_basis(dim);
        let (k, _, c) = best_direction(&Domain::unit_cube(dim), &basis).unwrap();
        assert_eq!(k, 0);
        assert_eq!(c, 0.5);
        let ball = Domain::ball(vec![0.3; dim], 1.0).unwrap();
        assert_eq!(best_direction(&ball, &basis).unwrap().0, 0);
    }
}

#[test]
fn strips_are_bounded_only_across() {
    let strip = Domain::strip(Direction::axis(2, 1), -1.0, 2.0).unwrap();
    assert_eq!(strip.directional_constant(&Direction::axis(2, 1)), 1.5);
    assert!(strip.directional_constant(&Direction::axis(2, 0)).is_infinite());
    assert!(!strip.is_bounded());
    assert!(matches!(strip.shape(), Shape::Strip { .. }));
}
