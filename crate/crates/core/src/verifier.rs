//! Inequality instances, their certified constants, and numerical
//! verification on test functions.
//!
//! Every inequality is checked in modular form `L(u) ≤ C · R(u)`, where `L`
//! and `R` are integrals of `|u|^p` and of a gradient expression against
//! instance-specific weights. A report passes when the ratio `L / (C R)`
//! stays below `1 + tolerance`, the tolerance being the relative quadrature
//! error of both sides.

use std::fmt;

use rayon::prelude::*;

use crate::error::{check_dim, hypothesis, invalid, Error, Result};
use crate::exponents::{ExponentField, Monotonicity};
use crate::functions::{ScalarField, TestFunction};
use crate::geometry::{best_direction, Direction, Domain, Shape};
use crate::numeric::distance;
use crate::quadrature::{gradient_modular_integral, modular_integral, GradientForm, Grid, IntegralResult, Singularity};
use crate::weights::{
    certified_constant, ConstantForm, LimitMode, LimitWeightParams, WeightParams, CLASSICAL_POINCARE_RESULT,
};

const DIRECTIONAL_RESULT: &str = "directional Poincaré inequality";
const VAR_EXP_DIRECTIONAL_RESULT: &str = "modular inequality for exponents constant along a direction";
const VAR_EXP_RADIAL_RESULT: &str = "modular inequality for decreasing radial exponents";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InequalityKind {
    DirectionalPoincare,
    GeneralWeighted,
    GammaHardy,
    SharpHardy,
    DualHardyGamma,
    DualHardyPlain,
    ClassicalPoincare,
    VarExpDirectional,
    VarExpRadial,
}

impl InequalityKind {
    pub const ALL: [InequalityKind; 9] = [
        Self::DirectionalPoincare,
        Self::GeneralWeighted,
        Self::GammaHardy,
        Self::SharpHardy,
        Self::DualHardyGamma,
        Self::DualHardyPlain,
        Self::ClassicalPoincare,
        Self::VarExpDirectional,
        Self::VarExpRadial,
    ];

    /// Stable snake-case identifier used in configs and CSV output.
    pub fn id(&self) -> &'static str {
        match self {
            Self::DirectionalPoincare => "directional_poincare",
            Self::GeneralWeighted => "general_weighted",
            Self::GammaHardy => "gamma_hardy",
            Self::SharpHardy => "sharp_hardy",
            Self::DualHardyGamma => "dual_hardy_gamma",
            Self::DualHardyPlain => "dual_hardy_plain",
            Self::ClassicalPoincare => "classical_poincare",
            Self::VarExpDirectional => "var_exp_directional",
            Self::VarExpRadial => "var_exp_radial",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }

    /// Human-readable name of the result this kind instantiates.
    pub fn result_name(&self) -> &'static str {
        match self {
            Self::DirectionalPoincare => "directional Poincaré inequality (projection width)",
            Self::GeneralWeighted => "weighted Hardy-Poincaré inequality",
            Self::GammaHardy => {
                "gamma-Hardy inequality, corollary of the weighted Hardy-Poincaré inequality (beta > 0, lambda -> 0)"
            }
            Self::SharpHardy => {
                "sharp Hardy inequality, corollary of the weighted Hardy-Poincaré inequality (gamma = p)"
            }
            Self::DualHardyGamma => {
                "dual Hardy inequality, corollary of the weighted Hardy-Poincaré inequality (beta < 0, lambda -> 0)"
            }
            Self::DualHardyPlain => "dual Hardy inequality without weight (gamma -> 0)",
            Self::ClassicalPoincare => "classical Poincaré inequality with the circumradius",
            Self::VarExpDirectional => "variable exponent modular inequality, exponent constant along sigma",
            Self::VarExpRadial => "variable exponent modular inequality, decreasing radial exponent and |u| <= 1",
        }
    }
}

impl fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Which constant and gradient expression an instance uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Standard,
    /// Directional bound with the best coordinate direction, full gradient.
    BestBasis,
    /// `p^p (diam/2)^p / N` on connected domains, full gradient.
    ConnectedDiameter,
    /// `κ₊` sharpened with the domain's distance to `x0` (`β < 0`).
    RefinedKappa,
    /// Variable exponent inequality with the weight `|(x - x0)·σ|^{p(x)}`
    /// and constant `κ(p)`.
    Weighted,
}

impl Variant {
    pub fn id(&self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::BestBasis => "best_basis",
            Self::ConnectedDiameter => "connected_diameter",
            Self::RefinedKappa => "refined_kappa",
            Self::Weighted => "weighted",
        }
    }
}

/// Gradient expression on the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub enum GradientShape {
    /// `Σ_i |∂_i u|^p`.
    Full,
    /// `|∂_σ u|^p`, times `|(x - x0)·σ|^p` when `x0` is present.
    Directional { sigma: Direction, x0: Option<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityInstance {
    kind: InequalityKind,
    variant: Variant,
    domain: Domain,
    exponent: ExponentField,
    sigma: Option<Direction>,
    x0: Option<Vec<f64>>,
    weight: Option<WeightParams>,
    limit: Option<LimitWeightParams>,
}

fn constant_p(p: f64) -> Result<ExponentField> {
    ExponentField::constant(p)
}

fn check_point(domain: &Domain, x0: &[f64]) -> Result<()> {
    check_dim("x0", domain.dim(), x0.len())?;
    if x0.iter().any(|c| !c.is_finite()) {
        return Err(invalid("x0", "coordinates must be finite"));
    }
    Ok(())
}

impl InequalityInstance {
    fn base(kind: InequalityKind, domain: Domain, exponent: ExponentField) -> Self {
        Self {
            kind,
            variant: Variant::Standard,
            domain,
            exponent,
            sigma: None,
            x0: None,
            weight: None,
            limit: None,
        }
    }

    /// `∫|u|^p ≤ (p c_{Ω,σ})^p ∫|∂_σ u|^p`; needs Ω bounded along σ.
    pub fn directional_poincare(domain: Domain, p: f64, sigma: Direction) -> Result<Self> {
        check_dim("direction", domain.dim(), sigma.dim())?;
        if !domain.directional_constant(&sigma).is_finite() {
            return Err(hypothesis(DIRECTIONAL_RESULT, "domain must be bounded along sigma"));
        }
        let mut inst = Self::base(InequalityKind::DirectionalPoincare, domain, constant_p(p)?);
        inst.sigma = Some(sigma);
        Ok(inst)
    }

    /// `∫|u|^p ≤ (p c_{Ω,σ*})^p ∫Σ|∂_i u|^p` with `σ*` the coordinate
    /// direction of smallest projection width.
    pub fn best_basis_poincare(domain: Domain, p: f64) -> Result<Self> {
        let basis = Direction::coordinate_basis(domain.dim());
        let (_, sigma, c) = best_direction(&domain, &basis)?;
        if !c.is_finite() {
            return Err(hypothesis(
                DIRECTIONAL_RESULT,
                "domain must be bounded along some coordinate direction",
            ));
        }
        let mut inst = Self::base(InequalityKind::DirectionalPoincare, domain, constant_p(p)?);
        inst.sigma = Some(sigma);
        inst.variant = Variant::BestBasis;
        Ok(inst)
    }

    /// `∫|u|^p ≤ p^p (diam Ω / 2)^p / N ∫Σ|∂_i u|^p` for connected bounded Ω.
    pub fn connected_diameter_poincare(domain: Domain, p: f64) -> Result<Self> {
        if !domain.is_connected() {
            return Err(hypothesis(
                DIRECTIONAL_RESULT,
                "the diameter bound needs a connected domain",
            ));
        }
        if !domain.is_bounded() {
            return Err(hypothesis(
                DIRECTIONAL_RESULT,
                "the diameter bound needs a bounded domain",
            ));
        }
        let mut inst = Self::base(InequalityKind::DirectionalPoincare, domain, constant_p(p)?);
        inst.variant = Variant::ConnectedDiameter;
        Ok(inst)
    }

    pub fn general_weighted(domain: Domain, p: f64, weight: WeightParams, refined: bool) -> Result<Self> {
        check_point(&domain, weight.x0())?;
        if refined && weight.beta() > 0.0 {
            return Err(invalid("refined", "the refined kappa_plus only differs for beta < 0"));
        }
        let mut inst = Self::base(InequalityKind::GeneralWeighted, domain, constant_p(p)?);
        inst.x0 = Some(weight.x0().to_vec());
        inst.weight = Some(weight);
        if refined {
            inst.variant = Variant::RefinedKappa;
        }
        Ok(inst)
    }

    pub fn gamma_hardy(domain: Domain, p: f64, gamma: f64, x0: Vec<f64>) -> Result<Self> {
        check_point(&domain, &x0)?;
        let limit = LimitWeightParams::new(gamma, LimitMode::Singular, domain.dim())?;
        let mut inst = Self::base(InequalityKind::GammaHardy, domain, constant_p(p)?);
        inst.x0 = Some(x0);
        inst.limit = Some(limit);
        Ok(inst)
    }

    pub fn sharp_hardy(domain: Domain, p: f64, x0: Vec<f64>) -> Result<Self> {
        check_point(&domain, &x0)?;
        let exponent = constant_p(p)?;
        certified_constant(ConstantForm::SharpHardy, p, domain.dim())?;
        let mut inst = Self::base(InequalityKind::SharpHardy, domain, exponent);
        inst.x0 = Some(x0);
        Ok(inst)
    }

    pub fn dual_hardy_gamma(domain: Domain, p: f64, gamma: f64, x0: Vec<f64>) -> Result<Self> {
        check_point(&domain, &x0)?;
        let limit = LimitWeightParams::new(gamma, LimitMode::Dual, domain.dim())?;
        let mut inst = Self::base(InequalityKind::DualHardyGamma, domain, constant_p(p)?);
        inst.x0 = Some(x0);
        inst.limit = Some(limit);
        Ok(inst)
    }

    pub fn dual_hardy_plain(domain: Domain, p: f64, x0: Vec<f64>) -> Result<Self> {
        check_point(&domain, &x0)?;
        let mut inst = Self::base(InequalityKind::DualHardyPlain, domain, constant_p(p)?);
        inst.x0 = Some(x0);
        Ok(inst)
    }

    pub fn classical_poincare(domain: Domain, p: f64) -> Result<Self> {
        if !domain.is_bounded() {
            return Err(hypothesis(CLASSICAL_POINCARE_RESULT, "requires a bounded domain"));
        }
        Ok(Self::base(InequalityKind::ClassicalPoincare, domain, constant_p(p)?))
    }

    /// With `x0`, the weighted form with constant `κ(p)`; without, the
    /// bounded form with `κ_{Ω,σ}(p)`.
    pub fn var_exp_directional(
        domain: Domain,
        exponent: ExponentField,
        sigma: Direction,
        x0: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_dim("direction", domain.dim(), sigma.dim())?;
        if let Some(d) = exponent.dim() {
            check_dim("exponent field", domain.dim(), d)?;
        }
        if !exponent.is_constant_along(&sigma) {
            return Err(hypothesis(
                VAR_EXP_DIRECTIONAL_RESULT,
                "the exponent must be constant along sigma",
            ));
        }
        let weighted = x0.is_some();
        if let Some(x0) = &x0 {
            check_point(&domain, x0)?;
        } else if !domain.directional_constant(&sigma).is_finite() {
            return Err(hypothesis(
                VAR_EXP_DIRECTIONAL_RESULT,
                "the unweighted form needs a domain bounded along sigma",
            ));
        }
        let mut inst = Self::base(InequalityKind::VarExpDirectional, domain, exponent);
        inst.sigma = Some(sigma);
        inst.x0 = x0;
        if weighted {
            inst.variant = Variant::Weighted;
        }
        Ok(inst)
    }

    /// Radial exponent with non-increasing profile; the weighted form uses
    /// the exponent's center as `x0`.
    pub fn var_exp_radial(domain: Domain, exponent: ExponentField, sigma: Direction, weighted: bool) -> Result<Self> {
        check_dim("direction", domain.dim(), sigma.dim())?;
        let ExponentField::Radial { center, profile } = &exponent else {
            return Err(hypothesis(VAR_EXP_RADIAL_RESULT, "the exponent must be radial"));
        };
        check_dim("exponent field", domain.dim(), center.len())?;
        if profile.monotonicity() == Monotonicity::Increasing {
            return Err(hypothesis(
                VAR_EXP_RADIAL_RESULT,
                "the radial profile of the exponent must be decreasing",
            ));
        }
        if !weighted && !domain.directional_constant(&sigma).is_finite() {
            return Err(hypothesis(
                VAR_EXP_RADIAL_RESULT,
                "the unweighted form needs a domain bounded along sigma",
            ));
        }
        let x0 = center.clone();
        let mut inst = Self::base(InequalityKind::VarExpRadial, domain, exponent);
        inst.sigma = Some(sigma);
        if weighted {
            inst.x0 = Some(x0);
            inst.variant = Variant::Weighted;
        }
        Ok(inst)
    }

    pub fn kind(&self) -> InequalityKind {
        self.kind
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn exponent(&self) -> &ExponentField {
        &self.exponent
    }

    pub fn sigma(&self) -> Option<&Direction> {
        self.sigma.as_ref()
    }

    pub fn x0(&self) -> Option<&[f64]> {
        self.x0.as_deref()
    }

    pub fn weight(&self) -> Option<&WeightParams> {
        self.weight.as_ref()
    }

    pub fn limit(&self) -> Option<&LimitWeightParams> {
        self.limit.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// The constant exponent, for kinds that use one.
    pub fn p(&self) -> Option<f64> {
        self.exponent.constant_value()
    }

    /// Same instance with domain, `x0`, weight center and exponent moved by `t`.
    pub fn translated(&self, t: &[f64]) -> Self {
        let shift = |v: &[f64]| v.iter().zip(t).map(|(a, b)| a + b).collect::<Vec<_>>();
        Self {
            kind: self.kind,
            variant: self.variant,
            domain: self.domain.translated(t),
            exponent: self.exponent.translated(t),
            sigma: self.sigma.clone(),
            x0: self.x0.as_deref().map(shift),
            weight: self
                .weight
                .as_ref()
                .map(|w| w.recentered(shift(w.x0())).expect("translation keeps parameters valid")),
            limit: self.limit,
        }
    }

    /// Same instance with the reference point (and weight center) moved to
    /// `x0`. Fails for kinds without a free reference point.
    pub fn with_x0(&self, x0: Vec<f64>) -> Result<Self> {
        if self.x0.is_none() || self.kind == InequalityKind::VarExpRadial {
            return Err(invalid(
                "x0",
                format!("kind `{}` has no free reference point", self.kind.id()),
            ));
        }
        check_point(&self.domain, &x0)?;
        let mut out = self.clone();
        if let Some(w) = &self.weight {
            out.weight = Some(w.recentered(x0.clone())?);
        }
        out.x0 = Some(x0);
        Ok(out)
    }

    pub(crate) fn x0_or_origin(&self) -> &[f64] {
        self.x0.as_deref().expect("kind carries a reference point")
    }

    fn power_weight(&self, x: &[f64], s: f64) -> f64 {
        if s == 0.0 {
            1.0
        } else {
            distance(x, self.x0_or_origin()).powf(s)
        }
    }

    /// Weight multiplying `|u|^p` on the left-hand side.
    pub fn lhs_weight(&self, x: &[f64]) -> f64 {
        match self.kind {
            InequalityKind::GeneralWeighted => self.weight.as_ref().map_or(1.0, |w| w.evaluate(x)),
            InequalityKind::GammaHardy | InequalityKind::DualHardyGamma => {
                let limit = self.limit.expect("limit weight present");
                self.power_weight(x, limit.power())
            }
            InequalityKind::SharpHardy => self.power_weight(x, -self.p().unwrap_or(1.0)),
            _ => 1.0,
        }
    }

    /// Exponent `γ` of a singular factor `|x - x0|^{-γ}` on the left-hand side.
    pub fn lhs_singular_power(&self) -> Option<f64> {
        match self.kind {
            InequalityKind::GammaHardy => self.limit.map(|l| l.gamma()),
            InequalityKind::SharpHardy => self.p(),
            _ => None,
        }
    }

    /// Weight multiplying the gradient expression on the right-hand side.
    pub fn rhs_weight(&self, x: &[f64]) -> f64 {
        let p = self.p().unwrap_or(1.0);
        match self.kind {
            InequalityKind::GeneralWeighted => {
                let w = self.weight.as_ref().expect("weight present");
                self.power_weight(x, p) * w.evaluate(x)
            }
            InequalityKind::GammaHardy => {
                let gamma = self.limit.expect("limit weight present").gamma();
                self.power_weight(x, p - gamma)
            }
            InequalityKind::DualHardyGamma => {
                let gamma = self.limit.expect("limit weight present").gamma();
                self.power_weight(x, p + gamma)
            }
            InequalityKind::DualHardyPlain => self.power_weight(x, p),
            _ => 1.0,
        }
    }

    /// Exponent of a singular factor on the right-hand side, if any.
    pub fn rhs_singular_power(&self) -> Option<f64> {
        match self.kind {
            InequalityKind::GammaHardy => {
                let gamma = self.limit?.gamma();
                let p = self.p()?;
                (gamma > p).then_some(gamma - p)
            }
            _ => None,
        }
    }

    pub fn gradient_shape(&self) -> GradientShape {
        match (self.kind, self.variant) {
            (InequalityKind::DirectionalPoincare, Variant::Standard) => GradientShape::Directional {
                sigma: self.sigma.clone().expect("direction present"),
                x0: None,
            },
            (InequalityKind::VarExpDirectional | InequalityKind::VarExpRadial, v) => GradientShape::Directional {
                sigma: self.sigma.clone().expect("direction present"),
                x0: if v == Variant::Weighted { self.x0.clone() } else { None },
            },
            _ => GradientShape::Full,
        }
    }

    /// Whether the left-hand side needs `|u| ≤ 1`.
    pub fn requires_unit_bound(&self) -> bool {
        self.kind == InequalityKind::VarExpRadial
    }

    /// Notes attached to reports, e.g. when a constant is only an upper bound.
    pub fn note(&self) -> Option<&'static str> {
        match self.kind {
            InequalityKind::DirectionalPoincare | InequalityKind::VarExpDirectional | InequalityKind::VarExpRadial
                if !self.domain.is_connected() && self.variant != Variant::Weighted =>
            {
                Some("projection width taken over the convex hull of the projection")
            }
            InequalityKind::ClassicalPoincare if !self.domain.is_primitive() => {
                Some("circumradius of a union is the certified upper end of its bracket")
            }
            _ => None,
        }
    }
}

impl fmt::Display for InequalityInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] on {} with p = {}",
            self.kind,
            self.variant.id(),
            self.domain,
            self.exponent
        )?;
        if let Some(s) = &self.sigma {
            write!(f, ", sigma = {:?}", s.as_slice())?;
        }
        if let Some(x0) = &self.x0 {
            write!(f, ", x0 = {x0:?}")?;
        }
        if let Some(w) = &self.weight {
            write!(
                f,
                ", lambda = {}, alpha = {}, beta = {}",
                w.lambda(),
                w.alpha(),
                w.beta()
            )?;
        }
        if let Some(l) = &self.limit {
            write!(f, ", gamma = {}", l.gamma())?;
        }
        Ok(())
    }
}

/// Certified constant `C` for the instance.
pub fn certified_constant_for(instance: &InequalityInstance) -> Result<f64> {
    let domain = &instance.domain;
    let n = domain.dim();
    let p = || {
        instance
            .p()
            .ok_or_else(|| invalid("p", "this inequality needs a constant exponent"))
    };
    match instance.kind {
        InequalityKind::DirectionalPoincare => {
            let p = p()?;
            let constant = match instance.variant {
                Variant::ConnectedDiameter => p.powf(p) * (domain.diameter() / 2.0).powf(p) / n as f64,
                _ => {
                    let sigma = instance.sigma.as_ref().expect("direction present");
                    (p * domain.directional_constant(sigma)).powf(p)
                }
            };
            if constant.is_finite() {
                Ok(constant)
            } else {
                Err(hypothesis(DIRECTIONAL_RESULT, "domain must be bounded along sigma"))
            }
        }
        InequalityKind::GeneralWeighted => {
            let w = instance.weight.as_ref().expect("weight present");
            let refined = (instance.variant == Variant::RefinedKappa).then_some(domain);
            certified_constant(
                ConstantForm::GeneralWeighted {
                    kappa_plus: w.kappa_plus(refined),
                },
                p()?,
                n,
            )
        }
        InequalityKind::GammaHardy => certified_constant(
            ConstantForm::GammaHardy {
                gamma: instance.limit.expect("limit weight present").gamma(),
            },
            p()?,
            n,
        ),
        InequalityKind::SharpHardy => certified_constant(ConstantForm::SharpHardy, p()?, n),
        InequalityKind::DualHardyGamma | InequalityKind::DualHardyPlain => {
            certified_constant(ConstantForm::Dual, p()?, n)
        }
        InequalityKind::ClassicalPoincare => certified_constant(
            ConstantForm::ClassicalPoincare {
                circumradius: domain.circumradius(),
            },
            p()?,
            n,
        ),
        InequalityKind::VarExpDirectional | InequalityKind::VarExpRadial => {
            if instance.variant == Variant::Weighted {
                Ok(instance.exponent.kappa_p(domain))
            } else {
                let sigma = instance.sigma.as_ref().expect("direction present");
                Ok(instance.exponent.kappa_domain_sigma(domain, sigma)?.value)
            }
        }
    }
}

/// Grid resolutions and exclusion settings for verification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSettings {
    /// Cells per axis (coarse level) in one and two dimensions.
    pub n: usize,
    /// Cells per axis (coarse level) in three or more dimensions.
    pub n_3d: usize,
    pub exclusion_multiplier: f64,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            n: 256,
            n_3d: 64,
            exclusion_multiplier: 2.0,
        }
    }
}

impl GridSettings {
    pub fn n_for(&self, dim: usize) -> usize {
        if dim <= 2 {
            self.n
        } else {
            self.n_3d
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub lhs: IntegralResult,
    pub rhs: IntegralResult,
    pub constant: f64,
    pub ratio: f64,
    pub pass: bool,
    pub tolerance_used: f64,
    pub grid_n: usize,
    pub instance: String,
    pub function: String,
    pub grid: String,
    pub note: Option<&'static str>,
}

impl VerificationReport {
    /// Assembles the verdict from both sides and the constant.
    pub fn from_sides(lhs: IntegralResult, rhs: IntegralResult, constant: f64) -> (f64, f64, bool) {
        if lhs.value == 0.0 {
            let tolerance = if rhs.value > 0.0 {
                (lhs.error_estimate + constant * rhs.error_estimate) / (constant * rhs.value) + 1e-9
            } else {
                1e-9
            };
            return (0.0, tolerance, true);
        }
        let scaled = constant * rhs.value;
        if !(scaled > 0.0) {
            return (f64::INFINITY, f64::INFINITY, false);
        }
        let ratio = lhs.value / scaled;
        let tolerance = (lhs.error_estimate + constant * rhs.error_estimate) / scaled + 1e-9;
        (ratio, tolerance, ratio <= 1.0 + tolerance)
    }
}

/// Points on and inside the closed support, pulled inward by a relative
/// `1e-9`, used to check `supp u ⊂ Ω`.
fn support_samples(support: &Domain) -> Vec<Vec<f64>> {
    const INSET: f64 = 1e-9;
    let dim = support.dim();
    match support.shape() {
        Shape::Ball { center, radius } => {
            let dirs = sphere_directions(dim);
            let mut pts = vec![center.clone()];
            for frac in [0.5, 1.0 - INSET] {
                for d in &dirs {
                    pts.push(center.iter().zip(d).map(|(c, v)| c + frac * radius * v).collect());
                }
            }
            pts
        }
        Shape::Cuboid { lo, hi } => {
            const K: usize = 8;
            let total = (K + 1).pow(dim as u32);
            (0..total)
                .map(|idx| {
                    let mut rem = idx;
                    (0..dim)
                        .map(|k| {
                            let i = rem % (K + 1);
                            rem /= K + 1;
                            let t = INSET + (1.0 - 2.0 * INSET) * i as f64 / K as f64;
                            lo[k] + t * (hi[k] - lo[k])
                        })
                        .collect()
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

fn sphere_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..256)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci lattice on the sphere
            let m = 1024;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut dirs = Vec::new();
            for k in 0..dim {
                for s in [1.0, -1.0] {
                    let mut v = vec![0.0; dim];
                    v[k] = s;
                    dirs.push(v);
                }
            }
            let c = 1.0 / (dim as f64).sqrt();
            for mask in 0..(1usize << dim) {
                dirs.push((0..dim).map(|k| if mask >> k & 1 == 1 { c } else { -c }).collect());
            }
            dirs
        }
    }
}

/// Fails with [`Error::SupportViolation`] if a sample of the support of `u`
/// falls outside the domain.
pub fn check_support(domain: &Domain, u: &TestFunction) -> Result<()> {
    check_dim("test function", domain.dim(), u.dim())?;
    for x in support_samples(&u.support()) {
        if !domain.contains(&x) {
            return Err(Error::SupportViolation { point: x });
        }
    }
    Ok(())
}

fn build_grid(
    domain: &Domain,
    support: &Domain,
    n: usize,
    settings: &GridSettings,
    singular: Option<(Vec<f64>, f64, f64)>,
) -> Result<Grid> {
    let grid = Grid::covering(domain, support, n)?.with_exclusion_multiplier(settings.exclusion_multiplier)?;
    match singular {
        Some((center, gamma, factor_bound)) => grid.with_singularity(Singularity {
            center,
            gamma,
            factor_bound,
        }),
        None => Ok(grid),
    }
}

/// Both modulars of an instance evaluated on one test function.
#[derive(Debug, Clone, PartialEq)]
pub struct Sides {
    pub lhs: IntegralResult,
    pub rhs: IntegralResult,
    pub grid_n: usize,
    pub grid: String,
}

/// Checks the preconditions on `u` and integrates both sides.
pub fn modular_sides(instance: &InequalityInstance, u: &TestFunction, settings: &GridSettings) -> Result<Sides> {
    check_support(&instance.domain, u)?;
    if instance.requires_unit_bound() && u.sup_norm_bound() > 1.0 {
        return Err(Error::NotUnitBounded {
            bound: u.sup_norm_bound(),
        });
    }
    let dim = instance.dim();
    let n = settings.n_for(dim);
    let support = u.support();
    let p_max = instance.exponent.p_max();

    let lhs_singular = instance.lhs_singular_power().map(|gamma| {
        let center = instance.x0_or_origin().to_vec();
        (center, gamma, u.sup_norm_bound().powf(p_max).max(u.sup_norm_bound()))
    });
    let lhs_grid = build_grid(&instance.domain, &support, n, settings, lhs_singular)?;
    let lhs_weight = |x: &[f64]| instance.lhs_weight(x);
    let lhs = modular_integral(u, &instance.exponent, Some(&lhs_weight), &instance.domain, &lhs_grid)?;

    let rhs_singular = instance.rhs_singular_power().map(|gamma| {
        let center = instance.x0_or_origin().to_vec();
        let g = u.gradient_sup_bound();
        (center, gamma, dim as f64 * g.powf(p_max).max(g))
    });
    let rhs_grid = build_grid(&instance.domain, &support, n, settings, rhs_singular)?;
    let rhs_weight = |x: &[f64]| instance.rhs_weight(x);
    let shape = instance.gradient_shape();
    let origin = vec![0.0; dim];
    let form = match &shape {
        GradientShape::Full => GradientForm::Full {
            x0: &origin,
            radial_power: 0.0,
        },
        GradientShape::Directional { sigma, x0 } => GradientForm::Directional {
            sigma,
            x0: x0.as_deref(),
        },
    };
    let rhs = gradient_modular_integral(
        u,
        &instance.exponent,
        Some(&rhs_weight),
        form,
        &instance.domain,
        &rhs_grid,
    )?;
    Ok(Sides {
        lhs,
        rhs,
        grid_n: n,
        grid: format!(
            "n={n} (fine {}), box lo={:?} hi={:?}, exclusion x{}",
            2 * n,
            lhs_grid.lo(),
            lhs_grid.hi(),
            settings.exclusion_multiplier
        ),
    })
}

/// Computes both sides of the instance on `u`, the certified constant, and
/// the verdict.
pub fn verify(instance: &InequalityInstance, u: &TestFunction, settings: &GridSettings) -> Result<VerificationReport> {
    let constant = certified_constant_for(instance)?;
    let sides = modular_sides(instance, u, settings)?;
    let (ratio, tolerance_used, pass) = VerificationReport::from_sides(sides.lhs, sides.rhs, constant);
    Ok(VerificationReport {
        lhs: sides.lhs,
        rhs: sides.rhs,
        constant,
        ratio,
        pass,
        tolerance_used,
        grid_n: sides.grid_n,
        instance: instance.to_string(),
        function: u.to_string(),
        grid: sides.grid,
        note: instance.note(),
    })
}

/// One cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub instance_index: usize,
    pub function_index: usize,
    pub outcome: Result<VerificationReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub worst_ratio: f64,
}

/// Verifies every (instance, function) pair. Rows come back in row-major
/// order whatever the evaluation order; errors are recorded per row and never
/// abort the sweep.
pub fn sweep(instances: &[InequalityInstance], functions: &[TestFunction], settings: &GridSettings) -> Vec<SweepRow> {
    let pairs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..functions.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(i, j)| SweepRow {
            instance_index: i,
            function_index: j,
            outcome: verify(&instances[i], &functions[j], settings),
        })
        .collect()
}

pub fn summarize(rows: &[SweepRow]) -> SweepSummary {
    let mut s = SweepSummary {
        total: rows.len(),
        ..SweepSummary::default()
    };
    for row in rows {
        match &row.outcome {
            Ok(r) => {
                if r.pass {
                    s.passed += 1;
                } else {
                    s.failed += 1;
                }
                s.worst_ratio = s.worst_ratio.max(r.ratio);
            }
            Err(_) => s.errors += 1,
        }
    }
    s
}
