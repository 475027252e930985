//! Tensor-grid midpoint quadrature with Richardson error estimates, cell
//! exclusion around an integrable point singularity, and a radial Simpson
//! fast path.
//!
//! Every integral is computed at `n` and `2n` cells per axis. The fine value
//! is reported; the error estimate is `|fine - coarse| / 3`, plus the mass of
//! cells cut by the domain boundary, plus a bound on the mass of excluded
//! cells when a singularity is declared. Cell sums are
//! formed in fixed-size blocks combined by pairwise summation, so results do
//! not depend on the number of worker threads.

use rayon::prelude::*;

use crate::error::{check_dim, invalid, Error, Result};
use crate::exponents::ExponentField;
use crate::functions::{ScalarField, MAX_DIM};
use crate::geometry::{Direction, Domain};
use crate::numeric::{abs_pow, distance, pairwise_sum, unit_sphere_area};

const BLOCK: usize = 4096;

/// A point singularity `|x - center|^{-gamma}` of the integrand, together with
/// a bound on the remaining factor near `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Singularity {
    pub center: Vec<f64>,
    pub gamma: f64,
    /// `sup |f(x)| |x - center|^gamma` near the center.
    pub factor_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: usize,
    singularity: Option<Singularity>,
    exclusion_multiplier: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
}

impl IntegralResult {
    pub const ZERO: IntegralResult = IntegralResult {
        value: 0.0,
        error_estimate: 0.0,
    };

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error_estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error_estimate / self.value.abs()
        }
    }
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: usize) -> Result<Self> {
        if lo.is_empty() || lo.len() > MAX_DIM {
            return Err(invalid("grid", format!("dimension must be in 1..={MAX_DIM}")));
        }
        check_dim("grid hi", lo.len(), hi.len())?;
        if n < 8 {
            return Err(invalid("grid_n", format!("need at least 8 cells per axis, got {n}")));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(invalid("grid", format!("need finite lo < hi, got {a}, {b}")));
            }
        }
        Ok(Self {
            lo,
            hi,
            n,
            singularity: None,
            exclusion_multiplier: 2.0,
        })
    }

    /// Box covering `support ∩ domain`, which must be finite.
    pub fn covering(domain: &Domain, support: &Domain, n: usize) -> Result<Self> {
        check_dim("support", domain.dim(), support.dim())?;
        let (dlo, dhi) = domain.bounding_box();
        let (slo, shi) = support.bounding_box();
        let lo: Vec<f64> = dlo.iter().zip(&slo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = dhi.iter().zip(&shi).map(|(a, b)| a.min(*b)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::Degenerate("support does not meet the domain".to_string()));
        }
        Self::new(lo, hi, n)
    }

    pub fn with_singularity(mut self, singularity: Singularity) -> Result<Self> {
        check_dim("singular point", self.dim(), singularity.center.len())?;
        self.singularity = Some(singularity);
        Ok(self)
    }

    pub fn with_exclusion_multiplier(mut self, multiplier: f64) -> Result<Self> {
        if !(multiplier > 0.0 && multiplier.is_finite()) {
            return Err(invalid(
                "exclusion_multiplier",
                format!("must be positive, got {multiplier}"),
            ));
        }
        self.exclusion_multiplier = multiplier;
        Ok(self)
    }

    pub fn translated(&self, t: &[f64]) -> Self {
        let shift = |v: &[f64]| v.iter().zip(t).map(|(a, b)| a + b).collect::<Vec<_>>();
        Self {
            lo: shift(&self.lo),
            hi: shift(&self.hi),
            n: self.n,
            singularity: self.singularity.as_ref().map(|s| Singularity {
                center: shift(&s.center),
                ..s.clone()
            }),
            exclusion_multiplier: self.exclusion_multiplier,
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn singularity(&self) -> Option<&Singularity> {
        self.singularity.as_ref()
    }

    pub fn exclusion_multiplier(&self) -> f64 {
        self.exclusion_multiplier
    }

    fn max_spacing(&self, n: usize) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a) / n as f64)
            .fold(0.0, f64::max)
    }

    /// Radius within which cells are excluded at resolution `n`.
    pub fn exclusion_radius(&self, n: usize) -> f64 {
        self.exclusion_multiplier * self.max_spacing(n)
    }
}

/// Midpoint sum over cells whose centers lie in `domain`, skipping cells that
/// come within `exclusion.1` of `exclusion.0`.
///
/// Also returns the summed magnitude of counted cells that the boundary of
/// `domain` cuts through (some corner outside). Counting such a cell fully is
/// the dominant error for integrands that do not vanish at the boundary.
fn midpoint_sum<F>(
    f: &F,
    domain: &Domain,
    lo: &[f64],
    hi: &[f64],
    n: usize,
    exclusion: Option<(&[f64], f64)>,
) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = lo.len();
    let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / n as f64).collect();
    let volume: f64 = h.iter().product();
    let total = n.pow(dim as u32);
    let blocks = total.div_ceil(BLOCK);
    let corners = 1usize << dim;
    let partial: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(total);
            let mut x = [0.0; MAX_DIM];
            let x = &mut x[..dim];
            let mut corner = [0.0; MAX_DIM];
            let corner = &mut corner[..dim];
            let mut values = Vec::with_capacity(end - start);
            let mut cut = Vec::new();
            for idx in start..end {
                let mut rem = idx;
                for k in (0..dim).rev() {
                    let i = rem % n;
                    rem /= n;
                    x[k] = lo[k] + (i as f64 + 0.5) * h[k];
                }
                if let Some((c, rho)) = exclusion {
                    let d2: f64 = (0..dim)
                        .map(|k| {
                            let gap = ((x[k] - c[k]).abs() - 0.5 * h[k]).max(0.0);
                            gap * gap
                        })
                        .sum();
                    if d2 < rho * rho {
                        continue;
                    }
                }
                if !domain.contains(x) {
                    continue;
                }
                let v = f(x);
                values.push(v);
                if v != 0.0 {
                    // corners pulled in slightly so faces aligned with the grid count as inside
                    let straddles = (0..corners).any(|mask| {
                        for k in 0..dim {
                            let side = if mask >> k & 1 == 1 { 0.5 } else { -0.5 };
                            corner[k] = x[k] + side * (1.0 - 1e-9) * h[k];
                        }
                        !domain.contains(corner)
                    });
                    if straddles {
                        cut.push(v.abs());
                    }
                }
            }
            (pairwise_sum(&values), pairwise_sum(&cut))
        })
        .collect();
    let sums: Vec<f64> = partial.iter().map(|p| p.0).collect();
    let cuts: Vec<f64> = partial.iter().map(|p| p.1).collect();
    (pairwise_sum(&sums) * volume, pairwise_sum(&cuts) * volume)
}

/// `∫_Ω f` by the midpoint rule at `n` and `2n` cells per axis.
pub fn integrate<F>(f: F, domain: &Domain, grid: &Grid) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_dim("grid", domain.dim(), grid.dim())?;
    let dim = grid.dim();
    let n = grid.n;
    let mut exclusion_bound = 0.0;
    let ((coarse, _), (fine, boundary)) = match &grid.singularity {
        None => (
            midpoint_sum(&f, domain, &grid.lo, &grid.hi, n, None),
            midpoint_sum(&f, domain, &grid.lo, &grid.hi, 2 * n, None),
        ),
        Some(s) => {
            let nf = dim as f64;
            if s.gamma >= nf {
                return Err(Error::NonIntegrable { gamma: s.gamma, dim });
            }
            let rho_c = grid.exclusion_radius(n);
            let rho_f = grid.exclusion_radius(2 * n);
            // excluded cells lie within the exclusion radius plus one cell
            // diagonal of the singular point
            let reach = rho_f + nf.sqrt() * grid.max_spacing(2 * n);
            exclusion_bound = if s.gamma > 0.0 {
                s.factor_bound * unit_sphere_area(dim) * reach.powf(nf - s.gamma) / (nf - s.gamma)
            } else {
                s.factor_bound * unit_sphere_area(dim) * reach.powf(nf) / nf
            };
            (
                midpoint_sum(&f, domain, &grid.lo, &grid.hi, n, Some((&s.center, rho_c))),
                midpoint_sum(&f, domain, &grid.lo, &grid.hi, 2 * n, Some((&s.center, rho_f))),
            )
        }
    };
    Ok(IntegralResult {
        value: fine,
        // cut cells with a center outside are not seen; doubling the inside
        // ones accounts for them
        error_estimate: (fine - coarse).abs() / 3.0 + 2.0 * boundary + exclusion_bound,
    })
}

/// A weight factor inside a modular.
pub type WeightFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// `∫_Ω |u|^{p(x)} w(x) dx`.
pub fn modular_integral<U>(
    u: &U,
    field: &ExponentField,
    weight: Option<WeightFn<'_>>,
    domain: &Domain,
    grid: &Grid,
) -> Result<IntegralResult>
where
    U: ScalarField + Sync + ?Sized,
{
    check_dim("test function", domain.dim(), u.dim())?;
    integrate(
        |x| {
            let v = abs_pow(u.value(x), field.evaluate(x));
            match weight {
                Some(w) if v != 0.0 => v * w(x),
                _ => v,
            }
        },
        domain,
        grid,
    )
}

/// Which gradient expression a gradient-side modular integrates.
#[derive(Debug, Clone, Copy)]
pub enum GradientForm<'a> {
    /// `Σ_i |∂_i u|^{p(x)} |x - x0|^s`; the distance factor is dropped when
    /// `s = 0`.
    Full { x0: &'a [f64], radial_power: f64 },
    /// `|∂_σ u|^{p(x)}`, times `|(x - x0)·σ|^{p(x)}` when `x0` is given.
    Directional {
        sigma: &'a Direction,
        x0: Option<&'a [f64]>,
    },
}

/// Gradient-side modular `∫_Ω G(x) w(x) dx` for the chosen [`GradientForm`],
/// using the ℓ^p convention `|∇u|^p = Σ_i |∂_i u|^p`.
pub fn gradient_modular_integral<U>(
    u: &U,
    field: &ExponentField,
    weight: Option<WeightFn<'_>>,
    form: GradientForm<'_>,
    domain: &Domain,
    grid: &Grid,
) -> Result<IntegralResult>
where
    U: ScalarField + Sync + ?Sized,
{
    let dim = domain.dim();
    check_dim("test function", dim, u.dim())?;
    match form {
        GradientForm::Full { x0, .. } => check_dim("x0", dim, x0.len())?,
        GradientForm::Directional { sigma, x0 } => {
            check_dim("direction", dim, sigma.dim())?;
            if let Some(x0) = x0 {
                check_dim("x0", dim, x0.len())?;
            }
        }
    }
    integrate(
        |x| {
            let mut g = [0.0; MAX_DIM];
            let g = &mut g[..dim];
            u.gradient(x, g);
            let p = field.evaluate(x);
            let v = match form {
                GradientForm::Full { x0, radial_power } => {
                    let s: f64 = g.iter().map(|c| abs_pow(*c, p)).sum();
                    if s == 0.0 || radial_power == 0.0 {
                        s
                    } else {
                        s * distance(x, x0).powf(radial_power)
                    }
                }
                GradientForm::Directional { sigma, x0 } => {
                    let d = abs_pow(sigma.dot(g), p);
                    match x0 {
                        Some(x0) if d != 0.0 => {
                            let t: f64 = x
                                .iter()
                                .zip(x0)
                                .zip(sigma.as_slice())
                                .map(|((a, b), s)| (a - b) * s)
                                .sum();
                            d * abs_pow(t, p)
                        }
                        _ => d,
                    }
                }
            };
            match weight {
                Some(w) if v != 0.0 => v * w(x),
                _ => v,
            }
        },
        domain,
        grid,
    )
}

fn simpson<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64, n: usize, g_a: f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut odd = Vec::with_capacity(n / 2);
    let mut even = Vec::with_capacity(n / 2);
    for k in 1..n {
        let v = g(a + k as f64 * h);
        if k % 2 == 1 {
            odd.push(v);
        } else {
            even.push(v);
        }
    }
    h / 3.0 * (g_a + 4.0 * pairwise_sum(&odd) + 2.0 * pairwise_sum(&even) + g(b))
}

/// `angular · ∫_{r_lo}^{r_hi} f(r) r^{N-1} dr` by composite Simpson at `n`
/// and `2n` panels with a fourth-order Richardson estimate.
///
/// If the radial integrand is not finite at `r_lo` (an integrable singularity
/// at the origin), the endpoint value is extrapolated from interior samples.
pub fn radial_integrate_with<F>(
    f: F,
    dim: usize,
    angular: f64,
    r_lo: f64,
    r_hi: f64,
    n: usize,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    if !(r_lo >= 0.0 && r_lo < r_hi && r_hi.is_finite()) {
        return Err(invalid(
            "r_lo/r_hi",
            format!("need 0 <= r_lo < r_hi < inf, got {r_lo}, {r_hi}"),
        ));
    }
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    let n = n.max(2).next_multiple_of(2);
    let power = dim as i32 - 1;
    let g = |r: f64| {
        let v = f(r);
        if v == 0.0 {
            0.0
        } else {
            v * r.powi(power)
        }
    };
    let endpoint = |h: f64| {
        let v = g(r_lo);
        if v.is_finite() {
            v
        } else {
            3.0 * g(r_lo + 0.5 * h) - 3.0 * g(r_lo + h) + g(r_lo + 1.5 * h)
        }
    };
    let h_coarse = (r_hi - r_lo) / n as f64;
    let coarse = simpson(&g, r_lo, r_hi, n, endpoint(h_coarse));
    let fine = simpson(&g, r_lo, r_hi, 2 * n, endpoint(0.5 * h_coarse));
    Ok(IntegralResult {
        value: angular * fine,
        error_estimate: angular * (fine - coarse).abs() / 15.0,
    })
}

/// `|S^{N-1}| · ∫_{r_lo}^{r_hi} f(r) r^{N-1} dr`, the integral of a radial
/// function over a ball or shell.
pub fn radial_integrate<F>(f: F, dim: usize, r_lo: f64, r_hi: f64, n: usize) -> Result<IntegralResult>
where
    F: Fn(f64) -> f64,
{
    radial_integrate_with(f, dim, unit_sphere_area(dim), r_lo, r_hi, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_on_unit_square_is_exact() {
        let sq = Domain::unit_cube(2);
        let grid = Grid::new(vec![0.0; 2], vec![1.0; 2], 256).unwrap();
        let r = integrate(|_| 1.0, &sq, &grid).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn disc_area() {
        let disc = Domain::ball(vec![0.0; 2], 1.0).unwrap();
        let grid = Grid::new(vec![-1.0; 2], vec![1.0; 2], 512).unwrap();
        let r = integrate(|_| 1.0, &disc, &grid).unwrap();
        assert!((r.value - PI).abs() <= 1e-3);
        assert!((r.value - PI).abs() <= 3.0 * r.error_estimate);
    }

    #[test]
    fn rejects_non_integrable_singularity() {
        let ball = Domain::ball(vec![0.0; 2], 1.0).unwrap();
        let grid = Grid::new(vec![-1.0; 2], vec![1.0; 2], 16)
            .unwrap()
            .with_singularity(Singularity {
                center: vec![0.0; 2],
                gamma: 2.0,
                factor_bound: 1.0,
            })
            .unwrap();
        assert!(matches!(
            integrate(|_| 1.0, &ball, &grid),
            Err(Error::NonIntegrable { .. })
        ));
    }

    #[test]
    fn radial_examples() {
        let v = radial_integrate(|_| 1.0, 3, 0.0, 1.0, 64).unwrap();
        assert!((v.value - 4.0 * PI / 3.0).abs() < 1e-12);
        let s = radial_integrate(|r| r.powi(-2), 3, 0.0, 1.0, 64).unwrap();
        assert!((s.value - 4.0 * PI).abs() < 1e-12);
        let d = radial_integrate(|_| 1.0, 2, 0.0, 1.0, 64).unwrap();
        assert!((d.value - PI).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(vec![0.0], vec![1.0], 4).is_err());
        assert!(Grid::new(vec![0.0], vec![f64::INFINITY], 16).is_err());
        assert!(Grid::new(vec![1.0], vec![0.0], 16).is_err());
    }
}
