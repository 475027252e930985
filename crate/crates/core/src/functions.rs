//! Compactly supported test functions with closed-form values and gradients.
//!
//! Three base families are available: the radial mollifier bump, a tensor
//! product of one-dimensional bumps filling a box exactly, and a truncated
//! power family that approaches the Hardy extremal. A [`TestFunction`] is a
//! base profile composed with an amplitude, a dilation and a translation:
//! `u(x) = scale · base((x - offset) / dilation)`.

use std::f64::consts::E;
use std::fmt;

use crate::error::{hypothesis, invalid, Result};
use crate::geometry::{Domain, Shape};
use crate::numeric::norm;
use crate::weights::SHARP_HARDY_RESULT;

/// Largest dimension for which gradients are evaluated into stack buffers.
pub const MAX_DIM: usize = 8;

/// A real function on `R^N` with an analytic gradient.
pub trait ScalarField {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

/// One-dimensional bump `exp(-1/(1-t²))` on `(-1, 1)`.
fn bump_1d(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q > 0.0 {
        (-1.0 / q).exp()
    } else {
        0.0
    }
}

fn bump_1d_derivative(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q > 0.0 {
        -(-1.0 / q).exp() * 2.0 * t / (q * q)
    } else {
        0.0
    }
}

/// `ψ(s) = exp(-1/s)` for `s > 0`, else 0.
fn psi(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

fn psi_derivative(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp() / (s * s)
    } else {
        0.0
    }
}

/// Smooth cutoff equal to 1 on `[0, 1/2]` and 0 on `[1, ∞)`.
fn cutoff(t: f64) -> f64 {
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = psi(1.0 - t);
        a / (a + psi(t - 0.5))
    }
}

fn cutoff_derivative(t: f64) -> f64 {
    if t <= 0.5 || t >= 1.0 {
        0.0
    } else {
        let a = psi(1.0 - t);
        let b = psi(t - 0.5);
        let da = -psi_derivative(1.0 - t);
        let db = psi_derivative(t - 0.5);
        (da * b - a * db) / ((a + b) * (a + b))
    }
}

/// Maximum of `|bump_1d'|` on `(-1, 1)`, located by a dense scan refined with
/// golden-section search.
fn bump_1d_slope_max() -> f64 {
    let f = |t: f64| -bump_1d_derivative(t).abs();
    let coarse = (1..1000)
        .map(|k| k as f64 / 1000.0)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(0.5);
    let (_, m, _) = crate::numeric::golden_section_min(f, coarse - 1e-3, coarse + 1e-3, 1e-12);
    -m
}

#[derive(Debug, Clone, PartialEq)]
enum Base {
    /// Radial bump on the unit ball.
    Bump { dim: usize },
    /// `∏ bump_1d(y_i / w_i)` on `∏ (-w_i, w_i)`.
    TensorBump { half_widths: Vec<f64> },
    /// `g(max(r, δ)) η(r/R)`, `g(r) = r^e`, `e = -(N-p)/p + ε`.
    Hardy {
        dim: usize,
        p: f64,
        eps: f64,
        delta: f64,
        radius: f64,
    },
}

impl Base {
    fn dim(&self) -> usize {
        match self {
            Base::Bump { dim } | Base::Hardy { dim, .. } => *dim,
            Base::TensorBump { half_widths } => half_widths.len(),
        }
    }

    fn value(&self, y: &[f64]) -> f64 {
        match self {
            Base::Bump { .. } => {
                let q = 1.0 - y.iter().map(|c| c * c).sum::<f64>();
                if q > 0.0 {
                    (-1.0 / q).exp()
                } else {
                    0.0
                }
            }
            Base::TensorBump { half_widths } => y.iter().zip(half_widths).map(|(t, w)| bump_1d(t / w)).product(),
            Base::Hardy { .. } => {
                let r = norm(y);
                let (g, _) = self.hardy_radial(r);
                g
            }
        }
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        match self {
            Base::Bump { .. } => {
                let q = 1.0 - y.iter().map(|c| c * c).sum::<f64>();
                if q > 0.0 {
                    let u = (-1.0 / q).exp();
                    let factor = -2.0 * u / (q * q);
                    for (o, c) in out.iter_mut().zip(y) {
                        *o = factor * c;
                    }
                } else {
                    out.fill(0.0);
                }
            }
            Base::TensorBump { half_widths } => {
                let dim = half_widths.len();
                let mut vals = [0.0; MAX_DIM];
                for ((v, t), w) in vals.iter_mut().zip(y).zip(half_widths) {
                    *v = bump_1d(t / w);
                }
                for k in 0..dim {
                    let mut prod = bump_1d_derivative(y[k] / half_widths[k]) / half_widths[k];
                    for (j, v) in vals[..dim].iter().enumerate() {
                        if j != k {
                            prod *= v;
                        }
                    }
                    out[k] = prod;
                }
            }
            Base::Hardy { .. } => {
                let r = norm(y);
                let (_, dr) = self.hardy_radial(r);
                if r == 0.0 || dr == 0.0 {
                    out.fill(0.0);
                } else {
                    for (o, c) in out.iter_mut().zip(y) {
                        *o = dr * c / r;
                    }
                }
            }
        }
    }

    fn hardy_exponent(&self) -> f64 {
        match self {
            Base::Hardy { dim, p, eps, .. } => -(*dim as f64 - p) / p + eps,
            _ => unreachable!("only the Hardy family has a power profile"),
        }
    }

    /// Radial profile and its derivative in `r` (one-sided at the kink
    /// `r = δ`, where the plateau derivative 0 is used).
    fn hardy_radial(&self, r: f64) -> (f64, f64) {
        let Base::Hardy { delta, radius, .. } = self else {
            unreachable!("only the Hardy family has a radial profile")
        };
        let t = r / radius;
        if t >= 1.0 {
            return (0.0, 0.0);
        }
        let e = self.hardy_exponent();
        let eta = cutoff(t);
        let deta = cutoff_derivative(t) / radius;
        if r <= *delta {
            let g = delta.powf(e);
            (g * eta, g * deta)
        } else {
            let g = r.powf(e);
            let dg = e * g / r;
            (g * eta, dg * eta + g * deta)
        }
    }

    fn sup_bound(&self) -> f64 {
        match self {
            Base::Bump { .. } => E.recip(),
            Base::TensorBump { half_widths } => (-(half_widths.len() as f64)).exp(),
            Base::Hardy { delta, radius, .. } => {
                let e = self.hardy_exponent();
                delta.powf(e).max(radius.powf(e))
            }
        }
    }

    /// Upper bound on the Euclidean norm of the gradient.
    fn gradient_sup_bound(&self) -> f64 {
        match self {
            Base::Bump { .. } => bump_1d_slope_max(),
            Base::TensorBump { half_widths } => {
                let n = half_widths.len() as f64;
                let inv: f64 = half_widths.iter().map(|w| w.powi(-2)).sum();
                inv.sqrt() * bump_1d_slope_max() * (1.0 - n).exp()
            }
            Base::Hardy { delta, radius, .. } => {
                // |g'η| ≤ |e| δ^{e-1} and |g η'| ≤ sup g · sup|η'| / R
                let e = self.hardy_exponent();
                let g_sup = self.sup_bound();
                let slope = (1..2000)
                    .map(|k| cutoff_derivative(0.5 + k as f64 / 4000.0).abs())
                    .fold(0.0, f64::max);
                let g_slope = e.abs() * delta.powf(e - 1.0).max(radius.powf(e - 1.0));
                g_slope + 1.01 * g_sup * slope / radius
            }
        }
    }

    fn support(&self) -> Domain {
        let dim = self.dim();
        match self {
            Base::Bump { .. } => Domain::ball(vec![0.0; dim], 1.0).expect("unit ball"),
            Base::TensorBump { half_widths } => {
                Domain::cuboid(half_widths.iter().map(|w| -w).collect(), half_widths.clone())
                    .expect("positive half widths")
            }
            Base::Hardy { radius, .. } => Domain::ball(vec![0.0; dim], *radius).expect("positive radius"),
        }
    }
}

/// A compactly supported test function `scale · base((x - offset)/dilation)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    base: Base,
    scale: f64,
    offset: Vec<f64>,
    dilation: f64,
    name: &'static str,
}

impl TestFunction {
    /// `exp(-1/(1-|y|²))` with `y = (x - center)/radius`.
    pub fn bump(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || center.len() > MAX_DIM {
            return Err(invalid("center", format!("dimension must be in 1..={MAX_DIM}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("center", "coordinates must be finite"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("radius", format!("must be positive, got {radius}")));
        }
        Ok(Self {
            base: Base::Bump { dim: center.len() },
            scale: 1.0,
            offset: center,
            dilation: radius,
            name: "bump",
        })
    }

    /// Product of one-dimensional bumps supported exactly on a finite box.
    pub fn tensor_bump(support: &Domain) -> Result<Self> {
        let Shape::Cuboid { lo, hi } = support.shape() else {
            return Err(invalid("support", "tensor bumps need an axis-aligned box"));
        };
        if !support.is_bounded() {
            return Err(invalid("support", "tensor bumps need a bounded box"));
        }
        if lo.len() > MAX_DIM {
            return Err(invalid("support", format!("dimension must be <= {MAX_DIM}")));
        }
        Ok(Self {
            base: Base::TensorBump {
                half_widths: lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect(),
            },
            scale: 1.0,
            offset: lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            dilation: 1.0,
            name: "tensor_bump",
        })
    }

    /// Truncated power `g(max(|x|, δ)) η(|x|/R)` with `g(r) = r^{-(N-p)/p+ε}`,
    /// centered at the origin.
    pub fn hardy_family(dim: usize, p: f64, eps: f64, delta: f64, radius: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid("dim", format!("must be in 1..={MAX_DIM}")));
        }
        if !(p >= 1.0 && p < dim as f64) {
            return Err(hypothesis(
                SHARP_HARDY_RESULT,
                format!("Hardy family requires 1 <= p < N, got p = {p} with N = {dim}"),
            ));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(invalid("eps", format!("must be nonnegative, got {eps}")));
        }
        if !(delta > 0.0 && delta < radius && radius.is_finite()) {
            return Err(invalid(
                "delta/radius",
                format!("need 0 < delta < radius, got {delta}, {radius}"),
            ));
        }
        Ok(Self {
            base: Base::Hardy {
                dim,
                p,
                eps,
                delta,
                radius,
            },
            scale: 1.0,
            offset: vec![0.0; dim],
            dilation: 1.0,
            name: "hardy",
        })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `c · u`.
    pub fn scaled_by(&self, c: f64) -> Self {
        Self {
            scale: self.scale * c,
            ..self.clone()
        }
    }

    /// `u / max(1, sup|u|)`, so that `|u| ≤ 1` everywhere.
    pub fn clamp_unit(&self) -> Self {
        let bound = self.sup_norm_bound();
        if bound > 1.0 {
            self.scaled_by(1.0 / bound)
        } else {
            self.clone()
        }
    }

    /// `x ↦ u(x - t)`.
    pub fn translated(&self, t: &[f64]) -> Self {
        assert_eq!(t.len(), self.dim(), "translation dimension");
        Self {
            offset: self.offset.iter().zip(t).map(|(a, b)| a + b).collect(),
            ..self.clone()
        }
    }

    /// `x ↦ u(x / s)` about the origin.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid("dilation", format!("must be positive, got {s}")));
        }
        Ok(Self {
            offset: self.offset.iter().map(|c| c * s).collect(),
            dilation: self.dilation * s,
            ..self.clone()
        })
    }

    /// Closed support, as a primitive domain.
    pub fn support(&self) -> Domain {
        self.base
            .support()
            .scaled(self.dilation)
            .expect("dilation is positive")
            .translated(&self.offset)
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.scale.abs() * self.base.sup_bound()
    }

    /// Upper bound on `|∇u|` (Euclidean).
    pub fn gradient_sup_bound(&self) -> f64 {
        self.scale.abs() * self.base.gradient_sup_bound() / self.dilation
    }

    fn local(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), oi) in y.iter_mut().zip(x).zip(&self.offset) {
            *yi = (xi - oi) / self.dilation;
        }
    }
}

impl ScalarField for TestFunction {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut buf = [0.0; MAX_DIM];
        let y = &mut buf[..self.dim()];
        self.local(x, y);
        self.scale * self.base.value(y)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let mut buf = [0.0; MAX_DIM];
        let y = &mut buf[..self.dim()];
        self.local(x, y);
        self.base.gradient(y, out);
        let c = self.scale / self.dilation;
        for o in out.iter_mut() {
            *o *= c;
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.base {
            Base::Bump { .. } => write!(f, "bump(center={:?}, r={})", self.offset, self.dilation)?,
            Base::TensorBump { half_widths } => write!(
                f,
                "tensor_bump(center={:?}, half_widths={:?})",
                self.offset,
                half_widths.iter().map(|w| w * self.dilation).collect::<Vec<_>>()
            )?,
            Base::Hardy {
                p, eps, delta, radius, ..
            } => write!(
                f,
                "hardy(p={p}, eps={eps}, delta={}, R={}, center={:?})",
                delta * self.dilation,
                radius * self.dilation,
                self.offset
            )?,
        }
        if self.scale != 1.0 {
            write!(f, " x {}", self.scale)?;
        }
        Ok(())
    }
}
