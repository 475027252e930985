//! Estimates of optimal constants by discrete variational methods.
//!
//! Instances are discretized with finite differences on a tensor grid:
//! node values carry the left-hand modular with the instance's left weight,
//! forward differences along each admissible axis carry the gradient
//! modular with the right weight sampled at edge midpoints. For `p = 2`
//! the optimal constant is the reciprocal of the smallest generalized
//! eigenvalue; for other `p` a ratio ascent gives lower bounds.

use rayon::prelude::*;

use crate::error::{check_dim, invalid, Error, Result};
use crate::functions::{ScalarField, TestFunction};
use crate::numeric::{abs_pow, lp_angular_factor, pairwise_sum, sign, unit_sphere_area};
use crate::quadrature::{radial_integrate_with, IntegralResult};
use crate::verifier::{
    certified_constant_for, check_support, modular_sides, GradientShape, GridSettings, InequalityInstance,
};

const NONE: u32 = u32::MAX;
const CHUNK: usize = 4096;

/// Tensor grid with `n` cells per axis over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalGrid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: usize,
}

impl ExtremalGrid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, n: usize) -> Result<Self> {
        check_dim("grid upper corner", lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(invalid("grid", "dimension must be at least 1"));
        }
        if n < 2 {
            return Err(invalid("n", "need at least 2 cells per axis"));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b))
        {
            return Err(invalid("grid", "corners must be finite with lo < hi"));
        }
        Ok(Self { lo, hi, n })
    }

    /// Grid over the bounding box of a bounded domain.
    pub fn bounding(domain: &crate::geometry::Domain, n: usize) -> Result<Self> {
        let (lo, hi) = domain.bounding_box();
        Self::new(lo, hi, n)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a) / self.n as f64)
            .collect()
    }

    fn node_count(&self) -> usize {
        (self.n + 1).pow(self.dim() as u32)
    }

    fn multi_index(&self, mut idx: usize, out: &mut [usize]) {
        for slot in out.iter_mut() {
            *slot = idx % (self.n + 1);
            idx /= self.n + 1;
        }
    }

    fn stride(&self, axis: usize) -> usize {
        (self.n + 1).pow(axis as u32)
    }
}

/// Node values on a tensor grid, zero at every node whose dual cell is not
/// inside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Nodes per axis, axis 0 varying fastest in [`Self::values`].
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Samples `u` at the admissible nodes of the instance's discretization.
    pub fn sample(instance: &InequalityInstance, grid: &ExtremalGrid, u: &TestFunction) -> Result<Self> {
        check_dim("test function", grid.dim(), u.dim())?;
        let disc = Discretization::new(instance, grid, instance.p().unwrap_or(2.0))?;
        let x = disc.gather_from(|node| u.value(node));
        Ok(disc.to_grid_function(&x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub parameter: f64,
    pub lhs: IntegralResult,
    pub rhs: IntegralResult,
    /// `L(u) / R(u)` without the certified constant.
    pub ratio: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalResult {
    pub estimated_optimal_constant: f64,
    pub certified_constant: f64,
    pub sharpness: f64,
    pub iterations: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub best: String,
    pub curve: Vec<CurvePoint>,
    pub best_function: Option<GridFunction>,
}

impl ExtremalResult {
    fn assemble(estimate: f64, certified: f64, iterations: usize, residual: f64, tolerance: f64, best: String) -> Self {
        Self {
            estimated_optimal_constant: estimate,
            certified_constant: certified,
            sharpness: estimate / certified,
            iterations,
            residual,
            tolerance,
            best,
            curve: Vec::new(),
            best_function: None,
        }
    }

    /// `estimate ≤ certified · (1 + tolerance)`.
    pub fn within_certified(&self) -> bool {
        self.estimated_optimal_constant <= self.certified_constant * (1.0 + self.tolerance)
    }
}

fn par_dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    pairwise_sum(&partial)
}

fn par_sum_by<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partial: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f).sum::<f64>())
        .collect();
    pairwise_sum(&partial)
}

/// One finite-difference slot of an unknown: the neighbour across an edge
/// and the edge weights for exponent `p` and for exponent 2.
#[derive(Debug, Clone, Copy)]
struct Slot {
    neighbour: u32,
    forward: bool,
    weight_p: f64,
    weight_2: f64,
}

struct Discretization {
    grid: ExtremalGrid,
    p: f64,
    nodes: Vec<usize>,
    unknown_of: Vec<u32>,
    mass: Vec<f64>,
    slots_per_node: usize,
    slots: Vec<Slot>,
}

impl Discretization {
    fn new(instance: &InequalityInstance, grid: &ExtremalGrid, p: f64) -> Result<Self> {
        let dim = instance.dim();
        check_dim("extremal grid", dim, grid.dim())?;
        let h = grid.spacing();
        let volume: f64 = h.iter().product();
        let axes: Vec<usize> = match instance.gradient_shape() {
            GradientShape::Full => (0..dim).collect(),
            GradientShape::Directional { sigma, .. } => match sigma.aligned_axis() {
                Some(k) => vec![k],
                None => {
                    return Err(invalid(
                        "sigma",
                        "the finite-difference discretization needs a coordinate direction",
                    ))
                }
            },
        };
        let dir_weight = match instance.gradient_shape() {
            GradientShape::Directional { sigma, x0: Some(x0) } => Some((sigma, x0)),
            _ => None,
        };
        let singular_center = instance
            .x0()
            .filter(|_| instance.lhs_singular_power().is_some() || instance.rhs_singular_power().is_some());
        let min_h = h.iter().cloned().fold(f64::INFINITY, f64::min);
        let domain = instance.domain();

        let total = grid.node_count();
        let mut unknown_of = vec![NONE; total];
        let mut nodes = Vec::new();
        let mut mass = Vec::new();
        let mut index = vec![0usize; dim];
        let mut x = vec![0.0; dim];
        let mut corner = vec![0.0; dim];
        'nodes: for node in 0..total {
            grid.multi_index(node, &mut index);
            if index.iter().any(|&i| i == 0 || i == grid.n) {
                continue;
            }
            for k in 0..dim {
                x[k] = grid.lo[k] + index[k] as f64 * h[k];
            }
            if !domain.contains(&x) {
                continue;
            }
            for mask in 0..(1usize << dim) {
                for k in 0..dim {
                    let s = if mask >> k & 1 == 1 { 0.5 } else { -0.5 };
                    corner[k] = x[k] + s * h[k] * (1.0 - 1e-9);
                }
                if !domain.contains(&corner) {
                    continue 'nodes;
                }
            }
            if let Some(c) = singular_center {
                if crate::numeric::distance(&x, c) <= 1e-9 * min_h {
                    continue;
                }
            }
            let w = instance.lhs_weight(&x);
            if !w.is_finite() {
                continue;
            }
            unknown_of[node] = nodes.len() as u32;
            nodes.push(node);
            mass.push(w * volume);
        }
        if nodes.is_empty() {
            return Err(Error::Degenerate("no grid node lies inside the domain".into()));
        }
        if mass.iter().all(|&m| m == 0.0) {
            return Err(Error::Degenerate("mass matrix vanishes on the grid".into()));
        }

        let slots_per_node = 2 * axes.len();
        let mut slots = Vec::with_capacity(nodes.len() * slots_per_node);
        let mut mid = vec![0.0; dim];
        for &node in &nodes {
            grid.multi_index(node, &mut index);
            for &k in &axes {
                for forward in [true, false] {
                    let neighbour_node = if forward {
                        node + grid.stride(k)
                    } else {
                        node - grid.stride(k)
                    };
                    for j in 0..dim {
                        mid[j] = grid.lo[j] + index[j] as f64 * h[j];
                    }
                    mid[k] += if forward { 0.5 * h[k] } else { -0.5 * h[k] };
                    let mut w = instance.rhs_weight(&mid) * volume;
                    if let Some((sigma, x0)) = &dir_weight {
                        let t: f64 = mid
                            .iter()
                            .zip(x0)
                            .zip(sigma.as_slice())
                            .map(|((a, b), s)| (a - b) * s)
                            .sum();
                        w *= t.abs().powf(p);
                    }
                    if !w.is_finite() {
                        return Err(Error::Degenerate(format!(
                            "gradient weight is not finite at edge midpoint {mid:?}"
                        )));
                    }
                    slots.push(Slot {
                        neighbour: unknown_of[neighbour_node],
                        forward,
                        weight_p: w / h[k].powf(p),
                        weight_2: w / (h[k] * h[k]),
                    });
                }
            }
        }
        Ok(Self {
            grid: grid.clone(),
            p,
            nodes,
            unknown_of,
            mass,
            slots_per_node,
            slots,
        })
    }

    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn slots(&self, i: usize) -> &[Slot] {
        &self.slots[i * self.slots_per_node..(i + 1) * self.slots_per_node]
    }

    fn node_point(&self, node: usize) -> Vec<f64> {
        let h = self.grid.spacing();
        let mut index = vec![0; self.grid.dim()];
        self.grid.multi_index(node, &mut index);
        index
            .iter()
            .enumerate()
            .map(|(k, &i)| self.grid.lo[k] + i as f64 * h[k])
            .collect()
    }

    fn gather_from<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&node| f(&self.node_point(node))).collect()
    }

    fn to_grid_function(&self, x: &[f64]) -> GridFunction {
        let mut values = vec![0.0; self.grid.node_count()];
        for (&node, &v) in self.nodes.iter().zip(x) {
            values[node] = v;
        }
        GridFunction {
            origin: self.grid.lo.clone(),
            spacing: self.grid.spacing(),
            shape: vec![self.grid.n + 1; self.grid.dim()],
            values,
        }
    }

    fn unknowns_of(&self, u: &GridFunction) -> Result<Vec<f64>> {
        if u.values.len() != self.grid.node_count() || u.origin != self.grid.lo {
            return Err(invalid("u0", "grid function does not live on this grid"));
        }
        for (node, &v) in u.values.iter().enumerate() {
            if v != 0.0 && self.unknown_of[node] == NONE {
                return Err(invalid("u0", "grid function is nonzero outside the admissible nodes"));
            }
        }
        Ok(self.nodes.iter().map(|&node| u.values[node]).collect())
    }

    /// Stiffness operator of the `p = 2` form.
    fn apply_stiffness(&self, x: &[f64], out: &mut [f64]) {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, block)| {
            for (off, o) in block.iter_mut().enumerate() {
                let i = c * CHUNK + off;
                let xi = x[i];
                *o = self
                    .slots(i)
                    .iter()
                    .map(|s| {
                        let xj = if s.neighbour == NONE {
                            0.0
                        } else {
                            x[s.neighbour as usize]
                        };
                        s.weight_2 * (xi - xj)
                    })
                    .sum();
            }
        });
    }

    fn stiffness_diagonal(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.slots(i).iter().map(|s| s.weight_2).sum())
            .collect()
    }

    fn lhs(&self, x: &[f64]) -> f64 {
        let p = self.p;
        par_sum_by(self.len(), |i| self.mass[i] * abs_pow(x[i], p))
    }

    /// Each edge counted once: from its lower end, or from its upper end when
    /// the lower end is pinned to zero.
    fn rhs(&self, x: &[f64]) -> f64 {
        let p = self.p;
        par_sum_by(self.len(), |i| {
            self.slots(i)
                .iter()
                .filter(|s| s.forward || s.neighbour == NONE)
                .map(|s| {
                    let xj = if s.neighbour == NONE {
                        0.0
                    } else {
                        x[s.neighbour as usize]
                    };
                    s.weight_p * abs_pow(x[i] - xj, p)
                })
                .sum()
        })
    }

    fn odd_pow(d: f64, q: f64) -> f64 {
        if d == 0.0 {
            0.0
        } else {
            sign(d) * abs_pow(d, q)
        }
    }

    /// Gradient of `L/R` at `x`, given `L` and `R`.
    fn ratio_gradient(&self, x: &[f64], l: f64, r: f64) -> Vec<f64> {
        let p = self.p;
        let j = l / r;
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let dl = p * self.mass[i] * Self::odd_pow(x[i], p - 1.0);
                let dr: f64 = self
                    .slots(i)
                    .iter()
                    .map(|s| {
                        let xj = if s.neighbour == NONE {
                            0.0
                        } else {
                            x[s.neighbour as usize]
                        };
                        p * s.weight_p * Self::odd_pow(x[i] - xj, p - 1.0)
                    })
                    .sum();
                (dl - j * dr) / r
            })
            .collect()
    }

    /// Preconditioned conjugate gradients for the stiffness operator.
    fn solve(&self, diag: &[f64], b: &[f64], x: &mut [f64], rtol: f64, max_iter: usize) -> (usize, f64) {
        let m = self.len();
        let b_norm = par_dot(b, b).sqrt();
        if b_norm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return (0, 0.0);
        }
        let mut r = vec![0.0; m];
        self.apply_stiffness(x, &mut r);
        r.par_iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        let mut z: Vec<f64> = r.iter().zip(diag).map(|(a, d)| a / d).collect();
        let mut d = z.clone();
        let mut rz = par_dot(&r, &z);
        let mut q = vec![0.0; m];
        let mut rel = par_dot(&r, &r).sqrt() / b_norm;
        for it in 0..max_iter {
            if rel <= rtol {
                return (it, rel);
            }
            self.apply_stiffness(&d, &mut q);
            let alpha = rz / par_dot(&d, &q);
            x.par_iter_mut().zip(&d).for_each(|(xi, di)| *xi += alpha * di);
            r.par_iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= alpha * qi);
            z.par_iter_mut()
                .zip(&r)
                .zip(diag)
                .for_each(|((zi, ri), di)| *zi = ri / di);
            let rz_new = par_dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            d.par_iter_mut().zip(&z).for_each(|(di, zi)| *di = zi + beta * *di);
            rel = par_dot(&r, &r).sqrt() / b_norm;
        }
        (max_iter, rel)
    }
}

/// Settings for inverse power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSettings {
    /// Relative change of the Rayleigh quotient at which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative residual of the inner conjugate-gradient solves.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for EigenSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            cg_tol: 1e-10,
            cg_max_iter: 20_000,
        }
    }
}

/// Smallest generalized eigenvalue `λ` of `K v = λ M v` by inverse power
/// iteration; the optimal modular constant is `1/λ`.
pub fn optimal_constant_p2(
    instance: &InequalityInstance,
    grid: &ExtremalGrid,
    settings: &EigenSettings,
) -> Result<ExtremalResult> {
    match instance.p() {
        Some(2.0) => {}
        _ => return Err(invalid("p", "the eigenvalue method needs the constant exponent p = 2")),
    }
    let certified = certified_constant_for(instance)?;
    let disc = Discretization::new(instance, grid, 2.0)?;
    let m = disc.len();
    let diag = disc.stiffness_diagonal();
    let mut x = vec![1.0; m];
    let mut y = vec![0.0; m];
    let mut ky = vec![0.0; m];
    let mut lambda = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for iteration in 1..=settings.max_iter {
        let b: Vec<f64> = x.iter().zip(&disc.mass).map(|(a, w)| a * w).collect();
        // warm start from the current eigenvector estimate
        if lambda.is_finite() {
            y.par_iter_mut().zip(&x).for_each(|(yi, xi)| *yi = xi / lambda);
        }
        disc.solve(&diag, &b, &mut y, settings.cg_tol, settings.cg_max_iter);
        disc.apply_stiffness(&y, &mut ky);
        let num = par_dot(&y, &ky);
        let my: Vec<f64> = y.iter().zip(&disc.mass).map(|(a, w)| a * w).collect();
        let den = par_dot(&y, &my);
        if !(den > 0.0) {
            return Err(Error::Degenerate("iterate has vanishing weighted mass".into()));
        }
        let next = num / den;
        let scale = den.sqrt();
        x.par_iter_mut().zip(&y).for_each(|(xi, yi)| *xi = yi / scale);
        let r: Vec<f64> = ky.iter().zip(&my).map(|(k, w)| k - next * w).collect();
        residual = par_dot(&r, &r).sqrt() / (next * par_dot(&my, &my).sqrt());
        let change = ((next - lambda) / next).abs();
        lambda = next;
        if change < settings.tol {
            let mut result = ExtremalResult::assemble(
                1.0 / lambda,
                certified,
                iteration,
                residual,
                settings.tol + 1e-9,
                format!("discrete eigenfunction, lambda_min = {lambda:.12e}, {m} unknowns"),
            );
            result.best_function = Some(disc.to_grid_function(&x));
            return Ok(result);
        }
    }
    Err(Error::NoConvergence {
        iterations: settings.max_iter,
        residual,
    })
}

/// Settings for [`ratio_ascent`]. Steps halve from 1.0 until the ratio
/// improves or the step drops below `min_step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentSettings {
    pub steps: usize,
    pub min_step: f64,
    pub preconditioner_tol: f64,
}

impl Default for AscentSettings {
    fn default() -> Self {
        Self {
            steps: 200,
            min_step: 1e-8,
            preconditioner_tol: 1e-6,
        }
    }
}

/// Trace of the objective at accepted steps, starting with `J(u0)`.
pub type AscentTrace = Vec<f64>;

/// Maximizes the discrete ratio `L_h(u)/R_h(u)` from `u0` by gradient
/// ascent in the metric of the `p = 2` stiffness form.
pub fn ratio_ascent(
    instance: &InequalityInstance,
    u0: &GridFunction,
    grid: &ExtremalGrid,
    settings: &AscentSettings,
) -> Result<(ExtremalResult, AscentTrace)> {
    let p = instance
        .p()
        .ok_or_else(|| invalid("p", "ratio ascent needs a constant exponent"))?;
    let certified = certified_constant_for(instance)?;
    let disc = Discretization::new(instance, grid, p)?;
    let diag = disc.stiffness_diagonal();
    let mut u = disc.unknowns_of(u0)?;
    let norm = par_dot(&u, &u).sqrt();
    let mut r = disc.rhs(&u);
    if !(r > 0.0) || norm == 0.0 {
        return Err(Error::Degenerate("gradient modular of u0 vanishes".into()));
    }
    u.iter_mut().for_each(|v| *v /= norm);
    r = disc.rhs(&u);
    let mut l = disc.lhs(&u);
    let mut j = l / r;
    let mut trace = vec![j];
    let mut iterations = 0;
    let mut last_gain = 0.0;
    let mut s = vec![0.0; disc.len()];
    for _ in 0..settings.steps {
        let g = disc.ratio_gradient(&u, l, r);
        s.iter_mut().for_each(|v| *v = 0.0);
        disc.solve(&diag, &g, &mut s, settings.preconditioner_tol, 10_000);
        let s_norm = par_dot(&s, &s).sqrt();
        if !(s_norm > 0.0) {
            break;
        }
        let mut t = 1.0;
        let mut accepted = None;
        while t >= settings.min_step {
            let c = t / s_norm;
            let v: Vec<f64> = u.iter().zip(&s).map(|(a, b)| a + c * b).collect();
            let rv = disc.rhs(&v);
            if rv > 0.0 {
                let lv = disc.lhs(&v);
                if lv / rv > j {
                    accepted = Some((v, lv, rv));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((v, lv, rv)) = accepted else { break };
        let v_norm = par_dot(&v, &v).sqrt();
        u = v.into_iter().map(|a| a / v_norm).collect();
        let scale = v_norm.powf(p);
        l = lv / scale;
        r = rv / scale;
        let next = l / r;
        last_gain = (next - j) / next;
        j = next;
        trace.push(j);
        iterations += 1;
    }
    let mut result = ExtremalResult::assemble(
        j,
        certified,
        iterations,
        last_gain,
        1e-9,
        format!("ratio ascent, {iterations} accepted steps, p = {p}"),
    );
    result.best_function = Some(disc.to_grid_function(&u));
    Ok((result, trace))
}

/// One-parameter families of test functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Truncated Hardy profile centered at the instance's `x0`, parameter `ε`.
    Hardy { delta: f64, radius: f64 },
    /// Mollifier bumps at a fixed center, parameter the radius.
    BumpRadius { center: Vec<f64> },
    /// Bump of fixed center and radius, parameter the amplitude.
    BumpAmplitude { center: Vec<f64>, radius: f64 },
}

impl Family {
    fn member(&self, instance: &InequalityInstance, parameter: f64) -> Result<TestFunction> {
        match self {
            Family::Hardy { delta, radius } => {
                let p = instance
                    .p()
                    .ok_or_else(|| invalid("p", "the Hardy family needs a constant exponent"))?;
                let u = TestFunction::hardy_family(instance.dim(), p, parameter, *delta, *radius)?;
                Ok(match instance.x0() {
                    Some(x0) => u.translated(x0),
                    None => u,
                })
            }
            Family::BumpRadius { center } => TestFunction::bump(center.clone(), parameter),
            Family::BumpAmplitude { center, radius } => {
                Ok(TestFunction::bump(center.clone(), *radius)?.scaled_by(parameter))
            }
        }
    }

    /// Radii at which a radial profile of this family has kinks or changes
    /// of scale, used to split the radial quadrature.
    fn breakpoints(&self, parameter: f64) -> Vec<f64> {
        match self {
            Family::Hardy { delta, radius } => vec![*delta, 0.5 * radius, *radius],
            Family::BumpRadius { .. } => vec![parameter],
            Family::BumpAmplitude { radius, .. } => vec![*radius],
        }
    }

    fn center<'a>(&'a self, instance: &'a InequalityInstance) -> Option<&'a [f64]> {
        match self {
            Family::Hardy { .. } => Some(instance.x0().unwrap_or(&[])),
            Family::BumpRadius { center } | Family::BumpAmplitude { center, .. } => Some(center),
        }
    }
}

/// Settings for [`sharpness_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessSettings {
    /// Use one-dimensional radial quadrature.
    pub radial: bool,
    /// Simpson panels per radial segment.
    pub radial_n: usize,
    pub grid: GridSettings,
}

impl Default for SharpnessSettings {
    fn default() -> Self {
        Self {
            radial: false,
            radial_n: 100_000,
            grid: GridSettings::default(),
        }
    }
}

fn radial_sides(
    instance: &InequalityInstance,
    u: &TestFunction,
    center: &[f64],
    breakpoints: &[f64],
    n: usize,
) -> Result<(IntegralResult, IntegralResult)> {
    if instance.gradient_shape() != GradientShape::Full {
        return Err(invalid("radial", "radial quadrature needs the full gradient form"));
    }
    if let Some(x0) = instance.x0() {
        if x0 != center {
            return Err(invalid("radial", "radial quadrature needs the family centered at x0"));
        }
    }
    let p = instance
        .p()
        .ok_or_else(|| invalid("p", "radial quadrature needs a constant exponent"))?;
    let dim = instance.dim();
    let point = |r: f64| {
        let mut x = center.to_vec();
        x[0] += r;
        x
    };
    let lhs_f = |r: f64| {
        let x = point(r);
        let v = abs_pow(u.value(&x), p);
        if v == 0.0 {
            0.0
        } else {
            v * instance.lhs_weight(&x)
        }
    };
    let rhs_f = |r: f64| {
        let x = point(r);
        let mut g = vec![0.0; dim];
        u.gradient(&x, &mut g);
        let v = abs_pow(g[0], p);
        if v == 0.0 {
            0.0
        } else {
            v * instance.rhs_weight(&x)
        }
    };
    let sphere = unit_sphere_area(dim);
    let angular = lp_angular_factor(dim, p);
    let mut lhs = IntegralResult::ZERO;
    let mut rhs = IntegralResult::ZERO;
    let mut r_lo = 0.0;
    for &r_hi in breakpoints {
        if r_hi <= r_lo {
            continue;
        }
        let a = radial_integrate_with(lhs_f, dim, sphere, r_lo, r_hi, n)?;
        let b = radial_integrate_with(rhs_f, dim, angular, r_lo, r_hi, n)?;
        lhs = IntegralResult {
            value: lhs.value + a.value,
            error_estimate: lhs.error_estimate + a.error_estimate,
        };
        rhs = IntegralResult {
            value: rhs.value + b.value,
            error_estimate: rhs.error_estimate + b.error_estimate,
        };
        r_lo = r_hi;
    }
    Ok((lhs, rhs))
}

/// Ratio `L(u)/R(u)` along a family; the estimate is the family maximum.
pub fn sharpness_report(
    instance: &InequalityInstance,
    family: &Family,
    parameters: &[f64],
    settings: &SharpnessSettings,
) -> Result<ExtremalResult> {
    let certified = certified_constant_for(instance)?;
    let mut curve = Vec::with_capacity(parameters.len());
    let mut best: Option<(f64, String)> = None;
    let mut tolerance: f64 = 1e-9;
    for &parameter in parameters {
        let u = family.member(instance, parameter)?;
        let (lhs, rhs) = if settings.radial {
            check_support(instance.domain(), &u)?;
            let center = family
                .center(instance)
                .filter(|c| c.len() == instance.dim())
                .ok_or_else(|| invalid("radial", "family has no center in this dimension"))?;
            radial_sides(instance, &u, center, &family.breakpoints(parameter), settings.radial_n)?
        } else {
            let sides = modular_sides(instance, &u, &settings.grid)?;
            (sides.lhs, sides.rhs)
        };
        let ratio = if lhs.value == 0.0 { 0.0 } else { lhs.value / rhs.value };
        let relative_error = lhs.relative_error() + rhs.relative_error();
        tolerance = tolerance.max(relative_error + 1e-9);
        if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            best = Some((ratio, u.to_string()));
        }
        curve.push(CurvePoint {
            parameter,
            lhs,
            rhs,
            ratio,
            relative_error,
        });
    }
    let (estimate, descriptor) = best.unwrap_or((0.0, "empty family".into()));
    let mut result = ExtremalResult::assemble(estimate, certified, parameters.len(), 0.0, tolerance, descriptor);
    result.curve = curve;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Direction, Domain};
    use std::f64::consts::PI;

    fn unit_interval_poincare() -> InequalityInstance {
        InequalityInstance::directional_poincare(Domain::interval(0.0, 1.0).unwrap(), 2.0, Direction::axis(1, 0))
            .unwrap()
    }

    #[test]
    fn dirichlet_interval() {
        let inst = unit_interval_poincare();
        let grid = ExtremalGrid::bounding(inst.domain(), 256).unwrap();
        let r = optimal_constant_p2(&inst, &grid, &EigenSettings::default()).unwrap();
        // discrete eigenvalue of the three-point Laplacian
        let h = 1.0 / 256.0;
        let discrete = (2.0 / h * (PI * h / 2.0).sin()).powi(2);
        assert!((1.0 / r.estimated_optimal_constant - discrete).abs() / discrete < 1e-9);
        assert!(r.within_certified());
    }

    #[test]
    fn ascent_improves_and_matches_eigen() {
        let inst = unit_interval_poincare();
        let grid = ExtremalGrid::bounding(inst.domain(), 128).unwrap();
        let u = TestFunction::bump(vec![0.5], 0.5).unwrap();
        let u0 = GridFunction::sample(&inst, &grid, &u).unwrap();
        let (r, trace) = ratio_ascent(&inst, &u0, &grid, &AscentSettings::default()).unwrap();
        assert!(trace.windows(2).all(|w| w[1] > w[0]));
        let eigen = optimal_constant_p2(&inst, &grid, &EigenSettings::default()).unwrap();
        assert!(
            (r.estimated_optimal_constant - eigen.estimated_optimal_constant).abs()
                < 0.02 * eigen.estimated_optimal_constant
        );
    }

    #[test]
    fn zero_start_is_rejected() {
        let inst = unit_interval_poincare();
        let grid = ExtremalGrid::bounding(inst.domain(), 16).unwrap();
        let u = TestFunction::bump(vec![0.5], 0.25).unwrap().scaled_by(0.0);
        let u0 = GridFunction::sample(&inst, &grid, &u).unwrap();
        assert!(ratio_ascent(&inst, &u0, &grid, &AscentSettings::default()).is_err());
    }

    #[test]
    fn bump_radius_family_stays_below_one() {
        let inst = unit_interval_poincare();
        let family = Family::BumpRadius { center: vec![0.5] };
        let r = sharpness_report(&inst, &family, &[0.1, 0.3, 0.5], &SharpnessSettings::default()).unwrap();
        assert_eq!(r.curve.len(), 3);
        assert!(r.estimated_optimal_constant < 1.0);
        assert!(r.within_certified());
    }
}
