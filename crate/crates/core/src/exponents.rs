//! Variable exponent fields `p(·)` and the constants of the modular
//! inequalities: `κ(p) = sup f(p(x))` with `f(p) = 2^p (p-1)^{p-1}`, and its
//! directional refinement `κ_{Ω,σ}(p)`.
//!
//! Fields are closed-form: a constant, a profile of the distance to a line
//! (hence constant along that line's direction), or a profile of the distance
//! to a point. Profiles are affine and clipped to `[1, p_max]`, so their
//! range over any set follows from the range of the distance.

use std::fmt;

use crate::error::{check_dim, invalid, Result};
use crate::functions::ScalarField;
use crate::geometry::{Direction, Domain, Interval, Shape};
use crate::numeric::{abs_pow, distance, golden_section_min};
use crate::quadrature::{integrate, Grid, IntegralResult};

/// `f(p) = 2^p (p-1)^{p-1}`, with `f(1) = 2`.
pub fn kappa_of(p: f64) -> f64 {
    let q = p - 1.0;
    let log_tail = if q == 0.0 { 0.0 } else { q * q.ln() };
    (p * std::f64::consts::LN_2 + log_tail).exp()
}

/// Minimizer of `f` on `[1, ∞)`: `f'/f = ln 2 + ln(p-1) + 1 = 0`.
pub fn kappa_argmin() -> f64 {
    1.0 + 0.5 * (-1.0f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Monotonicity {
    Decreasing,
    Increasing,
    Constant,
}

/// `π(t) = clamp(a + b t, 1, p_max)` for `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineProfile {
    intercept: f64,
    slope: f64,
    p_max: f64,
}

impl AffineProfile {
    pub fn new(intercept: f64, slope: f64, p_max: f64) -> Result<Self> {
        if !(intercept.is_finite() && slope.is_finite()) {
            return Err(invalid("profile", "intercept and slope must be finite"));
        }
        if !(p_max >= 1.0 && p_max.is_finite()) {
            return Err(invalid("p_max", format!("must satisfy 1 <= p_max < inf, got {p_max}")));
        }
        Ok(Self {
            intercept,
            slope,
            p_max,
        })
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn monotonicity(&self) -> Monotonicity {
        if self.slope < 0.0 {
            Monotonicity::Decreasing
        } else if self.slope > 0.0 {
            Monotonicity::Increasing
        } else {
            Monotonicity::Constant
        }
    }

    /// Also accepts `t = +∞`, where the clipped profile saturates.
    pub fn evaluate(&self, t: f64) -> f64 {
        let raw = if t.is_infinite() {
            match self.monotonicity() {
                Monotonicity::Decreasing => 1.0,
                Monotonicity::Increasing => self.p_max,
                Monotonicity::Constant => self.intercept,
            }
        } else {
            self.intercept + self.slope * t
        };
        raw.clamp(1.0, self.p_max)
    }

    /// Derivative, defined as 0 where clipping is active.
    pub fn derivative(&self, t: f64) -> f64 {
        let raw = self.intercept + self.slope * t;
        if raw > 1.0 && raw < self.p_max {
            self.slope
        } else {
            0.0
        }
    }

    /// Range of the profile over `t ∈ [t_lo, t_hi]`.
    pub fn range(&self, t_lo: f64, t_hi: f64) -> Interval {
        let a = self.evaluate(t_lo);
        let b = self.evaluate(t_hi);
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExponentField {
    Constant(f64),
    /// `p(x) = π(|P(x - origin)|)` with `P` the projection orthogonal to
    /// `direction`; constant along `direction` by construction.
    Along {
        direction: Direction,
        origin: Vec<f64>,
        profile: AffineProfile,
    },
    /// `p(x) = π(|x - center|)`.
    Radial {
        center: Vec<f64>,
        profile: AffineProfile,
    },
}

/// `κ_{Ω,σ}(p)` together with the data of its inner minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalKappa {
    pub value: f64,
    pub kappa: f64,
    /// `inf_{t0} sup_{x∈Ω} |x·σ - t0|^{p(x)}`, certified from above.
    pub inf_sup: f64,
    pub t0: f64,
    /// Final golden-section bracket width on `t0`, relative to the projection width.
    pub bracket: f64,
}

const SLICES: usize = 4096;

impl ExponentField {
    pub fn constant(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid("p", format!("must satisfy 1 <= p < inf, got {p}")));
        }
        Ok(Self::Constant(p))
    }

    pub fn along(direction: Direction, origin: Vec<f64>, profile: AffineProfile) -> Result<Self> {
        check_dim("origin", direction.dim(), origin.len())?;
        Ok(Self::Along {
            direction,
            origin,
            profile,
        })
    }

    pub fn radial(center: Vec<f64>, profile: AffineProfile) -> Result<Self> {
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("center", "must be a non-empty finite point"));
        }
        Ok(Self::Radial { center, profile })
    }

    /// Dimension the field is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Constant(_) => None,
            Self::Along { origin, .. } => Some(origin.len()),
            Self::Radial { center, .. } => Some(center.len()),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Self::Constant(p) => Some(*p),
            _ => None,
        }
    }

    pub fn p_max(&self) -> f64 {
        match self {
            Self::Constant(p) => *p,
            Self::Along { profile, .. } | Self::Radial { profile, .. } => profile.p_max(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            Self::Constant(p) => *p,
            Self::Along {
                direction,
                origin,
                profile,
            } => profile.evaluate(transverse_distance(direction, origin, x)),
            Self::Radial { center, profile } => profile.evaluate(distance(x, center)),
        }
    }

    /// Whether `p(x + tσ) = p(x)` holds identically.
    pub fn is_constant_along(&self, sigma: &Direction) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Along { direction, profile, .. } => {
                let d = direction.dot(sigma.as_slice()).abs();
                profile.monotonicity() == Monotonicity::Constant || (d - 1.0).abs() <= 1e-12
            }
            Self::Radial { profile, .. } => profile.monotonicity() == Monotonicity::Constant,
        }
    }

    pub fn translated(&self, t: &[f64]) -> Self {
        let shift = |v: &[f64]| v.iter().zip(t).map(|(a, b)| a + b).collect::<Vec<_>>();
        match self {
            Self::Constant(p) => Self::Constant(*p),
            Self::Along {
                direction,
                origin,
                profile,
            } => Self::Along {
                direction: direction.clone(),
                origin: shift(origin),
                profile: *profile,
            },
            Self::Radial { center, profile } => Self::Radial {
                center: shift(center),
                profile: *profile,
            },
        }
    }

    /// Closed range of `p` over the domain. Exact for constant and radial
    /// fields; for fields constant along a line it is exact on balls,
    /// annuli and boxes aligned with the line, and a valid enclosure
    /// otherwise.
    pub fn range_on(&self, domain: &Domain) -> Interval {
        match self {
            Self::Constant(p) => Interval { lo: *p, hi: *p },
            Self::Radial { center, profile } => profile.range(domain.inf_distance(center), domain.sup_distance(center)),
            Self::Along {
                direction,
                origin,
                profile,
            } => {
                let (lo, hi) = transverse_distance_range(domain, direction, origin);
                profile.range(lo, hi)
            }
        }
    }

    /// `κ(p) = sup_{x∈Ω} f(p(x))`. Since `f` decreases then increases on
    /// `[1, ∞)`, its sup over an exponent range is attained at an endpoint.
    pub fn kappa_p(&self, domain: &Domain) -> f64 {
        let r = self.range_on(domain);
        kappa_of(r.lo).max(kappa_of(r.hi))
    }

    /// Exponent range on the slice `{x ∈ Ω : x·σ ∈ [s1, s2]}`.
    fn slice_range(&self, domain: &Domain, sigma: &Direction, s1: f64, s2: f64, whole: Interval) -> Interval {
        match self {
            Self::Radial { center, profile } => {
                let cs = sigma.dot(center);
                let along = if cs < s1 {
                    s1 - cs
                } else if cs > s2 {
                    cs - s2
                } else {
                    0.0
                };
                let r_lo = along.max(domain.inf_distance(center));
                let r_hi = domain.sup_distance(center);
                profile.range(r_lo, r_hi.max(r_lo))
            }
            _ => whole,
        }
    }

    /// `κ_{Ω,σ}(p) = κ(p) · inf_{x0} sup_{x∈Ω} |(x - x0)·σ|^{p(x)}`.
    ///
    /// The inner sup only depends on `t0 = x0·σ`. The projection interval is
    /// cut into slices; on each slice the exponent range is bounded and
    /// `|s - t0|^p` is bounded above by its largest distance raised to the
    /// largest exponent (distance ≥ 1) or the smallest (distance < 1). The
    /// resulting upper envelope is quasi-convex in `t0` and minimized by
    /// golden-section search.
    pub fn kappa_domain_sigma(&self, domain: &Domain, sigma: &Direction) -> Result<DirectionalKappa> {
        check_dim("direction", domain.dim(), sigma.dim())?;
        let iv = domain.projection_interval(sigma);
        if !iv.is_finite() {
            return Err(invalid("domain", "must be bounded along the chosen direction"));
        }
        let kappa = self.kappa_p(domain);
        let whole = self.range_on(domain);
        let width = iv.width();
        let slices: Vec<(f64, f64, Interval)> = (0..SLICES)
            .map(|k| {
                let s1 = iv.lo + width * k as f64 / SLICES as f64;
                let s2 = if k + 1 == SLICES {
                    iv.hi
                } else {
                    iv.lo + width * (k + 1) as f64 / SLICES as f64
                };
                (s1, s2, self.slice_range(domain, sigma, s1, s2, whole))
            })
            .collect();
        let envelope = |t0: f64| {
            slices
                .iter()
                .map(|(s1, s2, r)| {
                    let d = (s1 - t0).abs().max((s2 - t0).abs());
                    if d >= 1.0 {
                        d.powf(r.hi)
                    } else {
                        abs_pow(d, r.lo)
                    }
                })
                .fold(0.0, f64::max)
        };
        let (t0, inf_sup, bracket) = golden_section_min(envelope, iv.lo, iv.hi, 1e-12 * width);
        Ok(DirectionalKappa {
            value: kappa * inf_sup,
            kappa,
            inf_sup,
            t0,
            bracket: bracket / width,
        })
    }

    /// `∫_Ω π'(|x-x0|) ((x-x0)·σ)² / |x-x0| · log|u| · |u|^{p(x)} dx` for a
    /// radial field centered at `x0`; the integrand is taken as 0 where
    /// `u = 0` and at `x0`.
    pub fn log_term_integral<U>(&self, u: &U, sigma: &Direction, domain: &Domain, grid: &Grid) -> Result<IntegralResult>
    where
        U: ScalarField + Sync + ?Sized,
    {
        let Self::Radial { center, profile } = self else {
            return Err(invalid("field", "the logarithmic term needs a radial exponent"));
        };
        check_dim("direction", domain.dim(), sigma.dim())?;
        check_dim("test function", domain.dim(), u.dim())?;
        check_dim("center", domain.dim(), center.len())?;
        integrate(
            |x| {
                let r = distance(x, center);
                let v = u.value(x).abs();
                if r == 0.0 || v == 0.0 {
                    return 0.0;
                }
                let slope = profile.derivative(r);
                if slope == 0.0 {
                    return 0.0;
                }
                let t: f64 = x
                    .iter()
                    .zip(center)
                    .zip(sigma.as_slice())
                    .map(|((a, b), s)| (a - b) * s)
                    .sum();
                slope * t * t / r * v.ln() * v.powf(profile.evaluate(r))
            },
            domain,
            grid,
        )
    }
}

fn transverse_distance(direction: &Direction, origin: &[f64], x: &[f64]) -> f64 {
    let s: f64 = x
        .iter()
        .zip(origin)
        .zip(direction.as_slice())
        .map(|((a, b), d)| (a - b) * d)
        .sum();
    x.iter()
        .zip(origin)
        .zip(direction.as_slice())
        .map(|((a, b), d)| {
            let c = a - b - s * d;
            c * c
        })
        .sum::<f64>()
        .sqrt()
}

/// Enclosure of `{|P(x - origin)| : x ∈ Ω}`.
fn transverse_distance_range(domain: &Domain, direction: &Direction, origin: &[f64]) -> (f64, f64) {
    if domain.dim() == 1 {
        return (0.0, 0.0);
    }
    match domain.shape() {
        Shape::Ball { center, radius }
        | Shape::Annulus {
            center, outer: radius, ..
        } => {
            // the projection of a ball, or of an annulus in N ≥ 2, along a
            // direction is the disc of the outer radius about the projected center
            let d = transverse_distance(direction, origin, center);
            ((d - radius).max(0.0), d + radius)
        }
        Shape::Cuboid { lo, hi } => match direction.aligned_axis() {
            Some(k) => {
                let (mut near, mut far) = (0.0, 0.0);
                for j in (0..lo.len()).filter(|j| *j != k) {
                    let c = origin[j];
                    let gap = if c < lo[j] {
                        lo[j] - c
                    } else if c > hi[j] {
                        c - hi[j]
                    } else {
                        0.0
                    };
                    let reach = (c - lo[j]).abs().max((hi[j] - c).abs());
                    near += gap * gap;
                    far += reach * reach;
                }
                (near.sqrt(), far.sqrt())
            }
            None => (0.0, domain.sup_distance(origin)),
        },
        Shape::Strip { .. } => (0.0, f64::INFINITY),
        Shape::Union(members) => members
            .iter()
            .map(|m| transverse_distance_range(m, direction, origin))
            .fold((f64::INFINITY, 0.0), |(a, b), (c, d)| (a.min(c), b.max(d))),
    }
}

impl fmt::Display for ExponentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(p) => write!(f, "{p}"),
            Self::Along {
                direction,
                origin,
                profile,
            } => write!(
                f,
                "along{:?}[{}{:+}t, origin={origin:?}, p_max={}]",
                direction.as_slice(),
                profile.intercept,
                profile.slope,
                profile.p_max
            ),
            Self::Radial { center, profile } => write!(
                f,
                "radial[{}{:+}r, center={center:?}, p_max={}]",
                profile.intercept, profile.slope, profile.p_max
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial(a: f64, b: f64, p_max: f64, dim: usize) -> ExponentField {
        ExponentField::radial(vec![0.0; dim], AffineProfile::new(a, b, p_max).unwrap()).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(ExponentField::constant(2.0).unwrap().evaluate(&[3.0, 1.0]), 2.0);
        assert_eq!(radial(2.0, -0.5, 2.0, 2).evaluate(&[0.6, 0.8]), 1.5);
        let along = ExponentField::along(
            Direction::axis(2, 0),
            vec![0.0, 0.0],
            AffineProfile::new(1.0, 1.0, 3.0).unwrap(),
        )
        .unwrap();
        assert_eq!(along.evaluate(&[5.0, 0.5]), 1.5);
        assert_eq!(along.evaluate(&[-7.0, -0.5]), 1.5);
    }

    #[test]
    fn kappa_examples() {
        let ball = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(ExponentField::Constant(2.0).kappa_p(&ball), 4.0);
        assert_eq!(ExponentField::Constant(1.0).kappa_p(&ball), 2.0);
        let field = radial(1.0, 1.0, 5.0, 2);
        // oracle: dense grid max of f over p in [1, 2]
        let oracle = (0..=100_000)
            .map(|k| kappa_of(1.0 + k as f64 / 100_000.0))
            .fold(0.0, f64::max);
        assert!((field.kappa_p(&ball) - oracle).abs() < 1e-12);
        assert!((field.kappa_p(&ball) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn kappa_function_minimum() {
        let pm = kappa_argmin();
        assert!((pm - 1.18393972058572).abs() < 1e-12);
        let grid_min = (0..=200_000)
            .map(|k| 1.0 + k as f64 / 100_000.0)
            .min_by(|a, b| kappa_of(*a).total_cmp(&kappa_of(*b)))
            .unwrap();
        assert!((grid_min - pm).abs() < 2e-5);
        assert!(kappa_of(pm) < 2.0);
    }

    #[test]
    fn directional_kappa_examples() {
        let sq = Domain::unit_cube(2);
        let k = ExponentField::Constant(2.0)
            .kappa_domain_sigma(&sq, &Direction::axis(2, 0))
            .unwrap();
        assert!((k.value - 1.0).abs() < 1e-9);
        let iv = Domain::interval(0.0, 2.0).unwrap();
        let k1 = ExponentField::Constant(1.0)
            .kappa_domain_sigma(&iv, &Direction::axis(1, 0))
            .unwrap();
        assert!((k1.value - 2.0).abs() < 1e-9);
        let strip = Domain::strip(Direction::axis(2, 1), 0.0, 1.0).unwrap();
        assert!(ExponentField::Constant(2.0)
            .kappa_domain_sigma(&strip, &Direction::axis(2, 0))
            .is_err());
    }

    #[test]
    fn directional_kappa_radial_against_bruteforce() {
        let ball = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let field = radial(2.0, -0.5, 2.0, 2);
        let sigma = Direction::axis(2, 0);
        let k = field.kappa_domain_sigma(&ball, &sigma).unwrap();
        // oracle: sample the closed disc on a polar grid, t0 on a grid
        let pts: Vec<[f64; 2]> = (0..=200)
            .flat_map(|i| {
                (0..360).map(move |j| {
                    let r = i as f64 / 200.0;
                    let t = j as f64 * std::f64::consts::PI / 180.0;
                    [r * t.cos(), r * t.sin()]
                })
            })
            .collect();
        let oracle = (0..=200)
            .map(|i| -1.0 + i as f64 / 100.0)
            .map(|t0| {
                pts.iter()
                    .map(|x| abs_pow(x[0] - t0, field.evaluate(x)))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(k.inf_sup >= oracle - 1e-12);
        assert!(k.inf_sup <= oracle * 1.01);
        assert_eq!(k.kappa, 4.0);
    }

    #[test]
    fn profile_clipping() {
        let p = AffineProfile::new(2.0, -0.5, 2.0).unwrap();
        assert_eq!(p.evaluate(10.0), 1.0);
        assert_eq!(p.derivative(10.0), 0.0);
        assert_eq!(p.derivative(1.0), -0.5);
        assert_eq!(p.evaluate(f64::INFINITY), 1.0);
        assert_eq!(p.monotonicity(), Monotonicity::Decreasing);
    }

    #[test]
    fn along_range_on_aligned_box() {
        let field = ExponentField::along(
            Direction::axis(2, 0),
            vec![0.0, 0.0],
            AffineProfile::new(1.0, 1.0, 4.0).unwrap(),
        )
        .unwrap();
        let b = Domain::cuboid(vec![-5.0, 0.5], vec![5.0, 2.0]).unwrap();
        assert_eq!(field.range_on(&b), Interval { lo: 1.5, hi: 3.0 });
    }
}
