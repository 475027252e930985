//! Open subsets of `R^N` built from closed-form primitives, and the geometric
//! quantities that enter the inequality constants: projection widths,
//! circumradius, diameter and the best direction of a basis.
//!
//! Every primitive has an exact indicator and an exact support function
//! `h(σ) = sup_{x∈Ω} x·σ`, so the constants carry no discretization error.
//! Unions are handled through their members: support functions and far
//! distances of a union are maxima over members, near distances minima.
//!
//! Distances to a point are reported as infima and suprema over the open set.
//! They coincide with the min and max over the closure, which is what gets
//! computed.

use crate::error::{check_dim, invalid, Result};
use crate::numeric::{distance, dot, norm};

const UNIT_TOL: f64 = 1e-12;

/// A unit vector `σ ∈ S^{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Accepts `v` only if it is a unit vector within `1e-12`.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.iter().any(|c| !c.is_finite()) {
            return Err(invalid("direction", "must be a non-empty finite vector"));
        }
        let n = norm(&v);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(invalid("direction", format!("norm is {n}, expected 1")));
        }
        Ok(Self(v))
    }

    /// Normalizes `v` to unit length.
    pub fn normalized(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.iter().any(|c| !c.is_finite()) {
            return Err(invalid("direction", "must be a non-empty finite vector"));
        }
        let n = norm(&v);
        if n == 0.0 {
            return Err(invalid("direction", "zero vector has no direction"));
        }
        Ok(Self(v.into_iter().map(|c| c / n).collect()))
    }

    /// The coordinate direction `e_axis` in `R^dim`.
    pub fn axis(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        Self(v)
    }

    /// The coordinate basis `e_1, ..., e_N`.
    pub fn coordinate_basis(dim: usize) -> Vec<Self> {
        (0..dim).map(|k| Self::axis(dim, k)).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    /// Index of the coordinate axis this direction is parallel to, if any.
    pub fn aligned_axis(&self) -> Option<usize> {
        let k = self
            .0
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, _)| k)?;
        let off_axis = self.0.iter().enumerate().all(|(j, c)| j == k || c.abs() <= UNIT_TOL);
        off_axis.then_some(k)
    }

    /// Component of `x` orthogonal to this direction.
    pub fn transverse(&self, x: &[f64], out: &mut [f64]) {
        let s = self.dot(x);
        for ((o, xi), si) in out.iter_mut().zip(x).zip(&self.0) {
            *o = xi - s * si;
        }
    }
}

/// A closed interval `[lo, hi]` of the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn hull(self, other: Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// Shape of a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Axis-aligned box `∏ (lo_i, hi_i)`, bounds possibly infinite.
    Cuboid {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `{ inner < |x - center| < outer }`.
    Annulus {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
    },
    /// `{ lower < x·direction < upper }`, unbounded transversally.
    Strip {
        direction: Direction,
        lower: f64,
        upper: f64,
    },
    Union(Vec<Domain>),
}

/// An open subset of `R^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    dim: usize,
    shape: Shape,
}

/// Smallest enclosing ball of a domain, with a certified lower bound on the
/// circumradius.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub center: Vec<f64>,
    pub radius: f64,
    pub lower_bound: f64,
}

impl Enclosure {
    pub fn bracket_width(&self) -> f64 {
        self.radius - self.lower_bound
    }
}

fn check_finite_point(name: &'static str, x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(invalid(name, "dimension must be at least 1"));
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(invalid(name, "coordinates must be finite"));
    }
    Ok(())
}

impl Domain {
    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(invalid("lo", "dimension must be at least 1"));
        }
        check_dim("hi", lo.len(), hi.len())?;
        for (k, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if a.is_nan() || b.is_nan() || *a == f64::INFINITY || *b == f64::NEG_INFINITY {
                return Err(invalid("lo/hi", format!("axis {k} has invalid bounds")));
            }
            if a >= b {
                return Err(invalid("lo/hi", format!("axis {k}: need lo < hi, got {a} >= {b}")));
            }
        }
        Ok(Self {
            dim: lo.len(),
            shape: Shape::Cuboid { lo, hi },
        })
    }

    /// The open interval `(a, b) ⊂ R`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::cuboid(vec![a], vec![b])
    }

    /// The unit cube `(0, 1)^dim`.
    pub fn unit_cube(dim: usize) -> Self {
        Self::cuboid(vec![0.0; dim], vec![1.0; dim]).expect("unit cube is valid")
    }

    /// All of `R^dim`, as a box with infinite bounds.
    pub fn whole_space(dim: usize) -> Self {
        Self::cuboid(vec![f64::NEG_INFINITY; dim], vec![f64::INFINITY; dim]).expect("whole space is valid")
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_finite_point("center", &center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("radius", format!("must be positive and finite, got {radius}")));
        }
        Ok(Self {
            dim: center.len(),
            shape: Shape::Ball { center, radius },
        })
    }

    pub fn annulus(center: Vec<f64>, inner: f64, outer: f64) -> Result<Self> {
        check_finite_point("center", &center)?;
        if !(inner > 0.0 && inner < outer && outer.is_finite()) {
            return Err(invalid(
                "inner/outer",
                format!("need 0 < inner < outer < inf, got {inner}, {outer}"),
            ));
        }
        Ok(Self {
            dim: center.len(),
            shape: Shape::Annulus { center, inner, outer },
        })
    }

    pub fn strip(direction: Direction, lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(invalid(
                "lower/upper",
                format!("need finite lower < upper, got {lower}, {upper}"),
            ));
        }
        Ok(Self {
            dim: direction.dim(),
            shape: Shape::Strip {
                direction,
                lower,
                upper,
            },
        })
    }

    pub fn union(members: Vec<Domain>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| invalid("members", "a union needs at least one member"))?;
        let dim = first.dim;
        for m in &members {
            check_dim("union member", dim, m.dim)?;
        }
        Ok(Self {
            dim,
            shape: Shape::Union(members),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_primitive(&self) -> bool {
        !matches!(self.shape, Shape::Union(_))
    }

    /// Primitives are connected, except a one-dimensional annulus, which is
    /// two disjoint intervals. Unions are conservatively reported as not
    /// connected.
    pub fn is_connected(&self) -> bool {
        match &self.shape {
            Shape::Union(_) => false,
            Shape::Annulus { .. } => self.dim > 1,
            _ => true,
        }
    }

    /// Exact indicator of the open set.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Cuboid { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(xi, (a, b))| a < xi && xi < b),
            Shape::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 < radius * radius
            }
            Shape::Annulus { center, inner, outer } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                inner * inner < d2 && d2 < outer * outer
            }
            Shape::Strip {
                direction,
                lower,
                upper,
            } => {
                let s = direction.dot(x);
                *lower < s && s < *upper
            }
            Shape::Union(members) => members.iter().any(|m| m.contains(x)),
        }
    }

    /// Support function `sup_{x∈Ω} x·v` for an arbitrary vector `v`.
    pub fn support(&self, v: &[f64]) -> f64 {
        match &self.shape {
            Shape::Cuboid { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(v)
                .map(|((a, b), c)| {
                    if *c > 0.0 {
                        c * b
                    } else if *c < 0.0 {
                        c * a
                    } else {
                        0.0
                    }
                })
                .sum(),
            Shape::Ball { center, radius }
            | Shape::Annulus {
                center, outer: radius, ..
            } => dot(center, v) + radius * norm(v),
            Shape::Strip {
                direction,
                lower,
                upper,
            } => {
                let c = direction.dot(v);
                let n = norm(v);
                let parallel = self.dim == 1 || (c.abs() >= n * (1.0 - UNIT_TOL));
                if n == 0.0 {
                    0.0
                } else if !parallel {
                    f64::INFINITY
                } else if c > 0.0 {
                    c * upper
                } else {
                    c * lower
                }
            }
            Shape::Union(members) => members.iter().map(|m| m.support(v)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Closed hull of `{x·σ : x ∈ Ω}`.
    pub fn projection_interval(&self, sigma: &Direction) -> Interval {
        match &self.shape {
            Shape::Union(members) => members
                .iter()
                .map(|m| m.projection_interval(sigma))
                .reduce(Interval::hull)
                .expect("union is non-empty"),
            _ => Interval {
                lo: -self.support(sigma.negated().as_slice()),
                hi: self.support(sigma.as_slice()),
            },
        }
    }

    /// `c_{Ω,σ} = inf_{x0} sup_{x∈Ω} |(x - x0)·σ|`, half the width of the
    /// projection onto `σ`; `+∞` if `Ω` is unbounded along `σ`.
    pub fn directional_constant(&self, sigma: &Direction) -> f64 {
        let iv = self.projection_interval(sigma);
        if iv.is_finite() {
            0.5 * iv.width()
        } else {
            f64::INFINITY
        }
    }

    /// Per-axis bounds of the smallest enclosing axis-aligned box.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        (0..self.dim)
            .map(|k| {
                let iv = self.projection_interval(&Direction::axis(self.dim, k));
                (iv.lo, iv.hi)
            })
            .unzip()
    }

    pub fn is_bounded(&self) -> bool {
        let (lo, hi) = self.bounding_box();
        lo.iter().chain(&hi).all(|c| c.is_finite())
    }

    /// `sup_{x∈Ω} |x - x0|`.
    pub fn sup_distance(&self, x0: &[f64]) -> f64 {
        match &self.shape {
            Shape::Cuboid { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(x0)
                .map(|((a, b), c)| {
                    let d = (c - a).abs().max((b - c).abs());
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Shape::Ball { center, radius }
            | Shape::Annulus {
                center, outer: radius, ..
            } => distance(center, x0) + radius,
            Shape::Strip {
                direction,
                lower,
                upper,
            } => {
                if self.dim == 1 {
                    let t = direction.dot(x0);
                    (t - lower).abs().max((upper - t).abs())
                } else {
                    f64::INFINITY
                }
            }
            Shape::Union(members) => members.iter().map(|m| m.sup_distance(x0)).fold(0.0, f64::max),
        }
    }

    /// `inf_{x∈Ω} |x - x0|` (attained on the closure).
    pub fn inf_distance(&self, x0: &[f64]) -> f64 {
        match &self.shape {
            Shape::Cuboid { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(x0)
                .map(|((a, b), c)| {
                    let d = if c < a {
                        a - c
                    } else if c > b {
                        c - b
                    } else {
                        0.0
                    };
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            Shape::Ball { center, radius } => (distance(center, x0) - radius).max(0.0),
            Shape::Annulus { center, inner, outer } => {
                let d = distance(center, x0);
                if d < *inner {
                    inner - d
                } else if d > *outer {
                    d - outer
                } else {
                    0.0
                }
            }
            Shape::Strip {
                direction,
                lower,
                upper,
            } => {
                let t = direction.dot(x0);
                if t < *lower {
                    lower - t
                } else if t > *upper {
                    t - upper
                } else {
                    0.0
                }
            }
            Shape::Union(members) => members.iter().map(|m| m.inf_distance(x0)).fold(f64::INFINITY, f64::min),
        }
    }

    /// `c_Ω = inf_{x0} sup_{x∈Ω} |x - x0|`.
    pub fn circumradius(&self) -> f64 {
        self.smallest_enclosing_ball().radius
    }

    /// Smallest ball containing the closure of `Ω`. Exact for primitives. For
    /// unions the convex far-distance function is minimized over a candidate
    /// grid that is refined around the best candidate until the certified
    /// bracket is below `1e-9 · diam`.
    pub fn smallest_enclosing_ball(&self) -> Enclosure {
        let exact = |center: Vec<f64>, radius: f64| Enclosure {
            center,
            radius,
            lower_bound: radius,
        };
        let unbounded = || Enclosure {
            center: vec![0.0; self.dim],
            radius: f64::INFINITY,
            lower_bound: f64::INFINITY,
        };
        match &self.shape {
            Shape::Cuboid { lo, hi } => {
                if !self.is_bounded() {
                    return unbounded();
                }
                let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let r = 0.5 * distance(lo, hi);
                exact(center, r)
            }
            Shape::Ball { center, radius }
            | Shape::Annulus {
                center, outer: radius, ..
            } => exact(center.clone(), *radius),
            Shape::Strip {
                direction,
                lower,
                upper,
            } => {
                if self.dim != 1 {
                    return unbounded();
                }
                let mid = 0.5 * (lower + upper) * direction.as_slice()[0];
                exact(vec![mid], 0.5 * (upper - lower))
            }
            Shape::Union(_) => {
                if !self.is_bounded() {
                    return unbounded();
                }
                self.refine_enclosing_center()
            }
        }
    }

    fn refine_enclosing_center(&self) -> Enclosure {
        let dim = self.dim;
        let (lo, hi) = self.bounding_box();
        let diam = self.diameter();
        let mut center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut spacing = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max) / 8.0;
        const HALF: i64 = 4;
        let side = (2 * HALF + 1) as usize;
        let total = side.pow(dim as u32);
        let mut best = self.sup_distance(&center);
        let mut lower = 0.0;
        let mut candidate = vec![0.0; dim];
        for _ in 0..200 {
            let origin = center.clone();
            for idx in 0..total {
                let mut rem = idx;
                for (k, c) in candidate.iter_mut().enumerate() {
                    let offset = (rem % side) as i64 - HALF;
                    rem /= side;
                    *c = origin[k] + offset as f64 * spacing;
                }
                let value = self.sup_distance(&candidate);
                if value < best {
                    best = value;
                    center.copy_from_slice(&candidate);
                }
            }
            // The far-distance function is 1-Lipschitz, so every point of the
            // candidate region lies within half a grid diagonal of a sample.
            lower = (best - 0.5 * spacing * (dim as f64).sqrt()).max(0.0);
            if best - lower <= 1e-9 * diam {
                break;
            }
            spacing *= 0.5;
        }
        Enclosure {
            center,
            radius: best,
            lower_bound: lower,
        }
    }

    /// `sup_{x,y∈Ω} |x - y|`, exact for primitives and finite unions.
    pub fn diameter(&self) -> f64 {
        let parts = self.far_parts();
        let mut best: f64 = 0.0;
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i..] {
                best = best.max(FarPart::pair_sup(a, b));
            }
        }
        best
    }

    fn far_parts(&self) -> Vec<FarPart> {
        match &self.shape {
            Shape::Cuboid { lo, hi } => vec![FarPart::Cuboid(lo.clone(), hi.clone())],
            Shape::Ball { center, radius }
            | Shape::Annulus {
                center, outer: radius, ..
            } => vec![FarPart::Ball(center.clone(), *radius)],
            Shape::Strip {
                direction,
                lower,
                upper,
            } => {
                if self.dim == 1 {
                    let s = direction.as_slice()[0];
                    let (a, b) = if s > 0.0 {
                        (lower * s, upper * s)
                    } else {
                        (upper * s, lower * s)
                    };
                    vec![FarPart::Cuboid(vec![a], vec![b])]
                } else {
                    vec![FarPart::Unbounded]
                }
            }
            Shape::Union(members) => members.iter().flat_map(|m| m.far_parts()).collect(),
        }
    }

    /// `Ω + t`.
    pub fn translated(&self, t: &[f64]) -> Self {
        assert_eq!(t.len(), self.dim, "translation dimension");
        let shift = |c: &[f64]| c.iter().zip(t).map(|(a, b)| a + b).collect::<Vec<_>>();
        let shape = match &self.shape {
            Shape::Cuboid { lo, hi } => Shape::Cuboid {
                lo: shift(lo),
                hi: shift(hi),
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: shift(center),
                radius: *radius,
            },
            Shape::Annulus { center, inner, outer } => Shape::Annulus {
                center: shift(center),
                inner: *inner,
                outer: *outer,
            },
            Shape::Strip {
                direction,
                lower,
                upper,
            } => {
                let s = direction.dot(t);
                Shape::Strip {
                    direction: direction.clone(),
                    lower: lower + s,
                    upper: upper + s,
                }
            }
            Shape::Union(members) => Shape::Union(members.iter().map(|m| m.translated(t)).collect()),
        };
        Self { dim: self.dim, shape }
    }

    /// `s Ω` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid("scale", format!("must be positive and finite, got {s}")));
        }
        let mul = |c: &[f64]| c.iter().map(|a| a * s).collect::<Vec<_>>();
        let shape = match &self.shape {
            Shape::Cuboid { lo, hi } => Shape::Cuboid {
                lo: mul(lo),
                hi: mul(hi),
            },
            Shape::Ball { center, radius } => Shape::Ball {
                center: mul(center),
                radius: radius * s,
            },
            Shape::Annulus { center, inner, outer } => Shape::Annulus {
                center: mul(center),
                inner: inner * s,
                outer: outer * s,
            },
            Shape::Strip {
                direction,
                lower,
                upper,
            } => Shape::Strip {
                direction: direction.clone(),
                lower: lower * s,
                upper: upper * s,
            },
            Shape::Union(members) => Shape::Union(members.iter().map(|m| m.scaled(s)).collect::<Result<Vec<_>>>()?),
        };
        Ok(Self { dim: self.dim, shape })
    }
}

/// Members of a union reduced to what matters for far distances: annuli act
/// like their outer ball, a one-dimensional strip like an interval.
enum FarPart {
    Cuboid(Vec<f64>, Vec<f64>),
    Ball(Vec<f64>, f64),
    Unbounded,
}

impl FarPart {
    fn sup_distance(&self, x: &[f64]) -> f64 {
        match self {
            FarPart::Cuboid(lo, hi) => lo
                .iter()
                .zip(hi)
                .zip(x)
                .map(|((a, b), c)| {
                    let d = (c - a).abs().max((b - c).abs());
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            FarPart::Ball(c, r) => distance(c, x) + r,
            FarPart::Unbounded => f64::INFINITY,
        }
    }

    fn pair_sup(a: &FarPart, b: &FarPart) -> f64 {
        match (a, b) {
            (FarPart::Unbounded, _) | (_, FarPart::Unbounded) => f64::INFINITY,
            (FarPart::Ball(c, r), other) | (other, FarPart::Ball(c, r)) => other.sup_distance(c) + r,
            (FarPart::Cuboid(lo1, hi1), FarPart::Cuboid(lo2, hi2)) => (0..lo1.len())
                .map(|k| {
                    let d = (hi1[k] - lo2[k]).abs().max((hi2[k] - lo1[k]).abs());
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Picks the basis direction with the smallest directional constant; ties go
/// to the lowest index.
pub fn best_direction(domain: &Domain, basis: &[Direction]) -> Result<(usize, Direction, f64)> {
    if basis.is_empty() {
        return Err(invalid("basis", "must contain at least one direction"));
    }
    for sigma in basis {
        check_dim("basis direction", domain.dim(), sigma.dim())?;
    }
    let mut best = (0, domain.directional_constant(&basis[0]));
    for (k, sigma) in basis.iter().enumerate().skip(1) {
        let c = domain.directional_constant(sigma);
        if c < best.1 {
            best = (k, c);
        }
    }
    Ok((best.0, basis[best.0].clone(), best.1))
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.shape {
            Shape::Cuboid { lo, hi } => write!(f, "box(lo={lo:?}, hi={hi:?})"),
            Shape::Ball { center, radius } => write!(f, "ball(center={center:?}, r={radius})"),
            Shape::Annulus { center, inner, outer } => write!(f, "annulus(center={center:?}, r={inner}..{outer})"),
            Shape::Strip {
                direction,
                lower,
                upper,
            } => write!(f, "strip({lower} < x·{:?} < {upper})", direction.as_slice()),
            Shape::Union(members) => {
                write!(f, "union(")?;
                for (k, m) in members.iter().enumerate() {
                    if k > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn e(dim: usize, k: usize) -> Direction {
        Direction::axis(dim, k)
    }

    #[test]
    fn projection_of_unit_square() {
        let sq = Domain::unit_cube(2);
        assert_eq!(sq.projection_interval(&e(2, 0)), Interval { lo: 0.0, hi: 1.0 });
        let diag = Direction::normalized(vec![1.0, 1.0]).unwrap();
        let iv = sq.projection_interval(&diag);
        assert!(iv.lo.abs() < 1e-15);
        assert!((iv.hi - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn projection_of_ball_is_symmetric() {
        let b = Domain::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let sigma = Direction::normalized(vec![0.3, -1.2, 0.7]).unwrap();
        let iv = b.projection_interval(&sigma);
        assert!((iv.lo + 1.0).abs() < 1e-15 && (iv.hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn directional_constants() {
        assert_eq!(Domain::unit_cube(2).directional_constant(&e(2, 0)), 0.5);
        let strip = Domain::strip(e(2, 1), 0.0, 3.0).unwrap();
        assert_eq!(strip.directional_constant(&e(2, 1)), 1.5);
        assert_eq!(strip.directional_constant(&e(2, 0)), f64::INFINITY);
        let tilted = Direction::normalized(vec![1.0, 1.0]).unwrap();
        assert_eq!(strip.directional_constant(&tilted), f64::INFINITY);
    }

    #[test]
    fn union_of_intervals_matches_bruteforce_minimax() {
        let u = Domain::union(vec![
            Domain::interval(0.0, 1.0).unwrap(),
            Domain::interval(2.0, 3.0).unwrap(),
        ])
        .unwrap();
        // brute force: x0 on a grid in [-1, 4], x sampled densely in the closure
        let xs: Vec<f64> = (0..=2000)
            .map(|k| k as f64 * 3.0 / 2000.0)
            .filter(|x| *x <= 1.0 || *x >= 2.0)
            .collect();
        let oracle = (0..=5000)
            .map(|k| -1.0 + 5.0 * k as f64 / 5000.0)
            .map(|x0| xs.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        assert!((oracle - 1.5).abs() < 1e-12);
        assert_eq!(u.directional_constant(&e(1, 0)), 1.5);
    }

    #[test]
    fn circumradius_and_diameter_of_primitives() {
        let sq = Domain::unit_cube(2);
        assert!((sq.circumradius() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((sq.diameter() - SQRT_2).abs() < 1e-15);
        let b = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.circumradius(), 1.0);
        assert_eq!(b.diameter(), 2.0);
        let a = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        assert_eq!(a.diameter(), 2.0);
        assert_eq!(a.circumradius(), 1.0);
        let strip = Domain::strip(e(2, 0), 0.0, 1.0).unwrap();
        assert_eq!(strip.diameter(), f64::INFINITY);
        assert_eq!(strip.circumradius(), f64::INFINITY);
        assert!(!strip.is_bounded());
    }

    #[test]
    fn circumradius_of_two_balls() {
        let u = Domain::union(vec![
            Domain::ball(vec![0.0, 0.0], 1.0).unwrap(),
            Domain::ball(vec![3.0, 0.0], 1.0).unwrap(),
        ])
        .unwrap();
        // oracle: farthest boundary sample from candidate centers on a fine grid
        let boundary: Vec<[f64; 2]> = (0..720)
            .flat_map(|k| {
                let t = k as f64 * std::f64::consts::PI / 360.0;
                [[t.cos(), t.sin()], [3.0 + t.cos(), t.sin()]]
            })
            .collect();
        let mut oracle = f64::INFINITY;
        for i in 0..=300 {
            for j in 0..=40 {
                let c = [i as f64 * 0.01, -0.2 + j as f64 * 0.01];
                let far = boundary
                    .iter()
                    .map(|b| ((b[0] - c[0]).powi(2) + (b[1] - c[1]).powi(2)).sqrt())
                    .fold(0.0, f64::max);
                oracle = oracle.min(far);
            }
        }
        assert!((oracle - 2.5).abs() < 1e-4);
        let enc = u.smallest_enclosing_ball();
        assert!((enc.radius - 2.5).abs() < 1e-9);
        assert!(enc.bracket_width() <= 1e-9 * u.diameter());
        assert!(enc.lower_bound <= 2.5 + 1e-15);
        assert_eq!(u.diameter(), 5.0);
    }

    #[test]
    fn diameter_of_mixed_union() {
        let u = Domain::union(vec![Domain::unit_cube(2), Domain::ball(vec![3.0, 0.5], 0.5).unwrap()]).unwrap();
        // farthest pair: a left corner of the square and the far side of the ball
        let expected = (3.0f64.powi(2) + 0.5f64.powi(2)).sqrt() + 0.5;
        assert!((u.diameter() - expected).abs() < 1e-14);
        assert!(u.circumradius() <= u.diameter());
    }

    #[test]
    fn best_direction_rules() {
        let r = Domain::cuboid(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
        let basis = Direction::coordinate_basis(2);
        let (k, s, c) = best_direction(&r, &basis).unwrap();
        assert_eq!((k, c), (1, 0.5));
        assert_eq!(s, e(2, 1));
        let (k, _, c) = best_direction(&Domain::unit_cube(2), &basis).unwrap();
        assert_eq!((k, c), (0, 0.5));
        let strip = Domain::strip(e(2, 1), -1.0, 1.0).unwrap();
        let (k, _, c) = best_direction(&strip, &basis).unwrap();
        assert_eq!(k, 1);
        assert!(c.is_finite());
        assert!(best_direction(&strip, &[]).is_err());
    }

    #[test]
    fn distances_to_a_point() {
        let a = Domain::annulus(vec![0.0, 0.0, 0.0], 1.0, 2.0).unwrap();
        assert_eq!(a.inf_distance(&[0.0, 0.0, 0.0]), 1.0);
        assert_eq!(a.sup_distance(&[0.0, 0.0, 0.0]), 2.0);
        let sq = Domain::unit_cube(2);
        assert_eq!(sq.inf_distance(&[0.5, 0.5]), 0.0);
        assert!((sq.inf_distance(&[2.0, 2.0]) - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn constructor_validation() {
        assert!(Domain::cuboid(vec![1.0], vec![0.0]).is_err());
        assert!(Domain::ball(vec![0.0], 0.0).is_err());
        assert!(Domain::annulus(vec![0.0], 1.0, 1.0).is_err());
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        assert!(Direction::new(vec![0.6, 0.8]).is_ok());
        assert!(Domain::union(vec![]).is_err());
        assert!(Domain::union(vec![Domain::unit_cube(1), Domain::unit_cube(2)]).is_err());
    }

    #[test]
    fn indicator_is_open() {
        let sq = Domain::unit_cube(2);
        assert!(sq.contains(&[0.5, 0.5]));
        assert!(!sq.contains(&[0.0, 0.5]));
        let a = Domain::annulus(vec![0.0, 0.0], 0.5, 1.0).unwrap();
        assert!(!a.contains(&[0.0, 0.0]));
        assert!(a.contains(&[0.75, 0.0]));
        assert!(!a.contains(&[1.0, 0.0]));
    }
}
