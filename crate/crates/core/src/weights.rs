//! The weight family `ω(x) = (λ + |x - x0|^α)^{-β}` and the constants of the
//! weighted Hardy-Poincaré inequality and its corollaries.
//!
//! Everything here is closed form. The certificate behind the weighted
//! inequality is the pointwise bound `div(ω τ) ≥ κ₊ ω` with `τ(x) = x - x0`,
//! which [`WeightParams::divergence_identity`] evaluates exactly.

use crate::error::{check_dim, hypothesis, invalid, Result};
use crate::geometry::Domain;
use crate::numeric::distance;

pub(crate) const WEIGHTED_RESULT: &str = "weighted Hardy-Poincaré inequality";
pub(crate) const GAMMA_HARDY_RESULT: &str = "gamma-Hardy inequality";
pub(crate) const SHARP_HARDY_RESULT: &str = "sharp Hardy inequality";
pub(crate) const DUAL_HARDY_RESULT: &str = "dual Hardy inequality";
pub(crate) const CLASSICAL_POINCARE_RESULT: &str = "classical Poincaré inequality";

#[derive(Debug, Clone, PartialEq)]
pub struct WeightParams {
    lambda: f64,
    alpha: f64,
    beta: f64,
    x0: Vec<f64>,
}

impl WeightParams {
    /// Validates `λ > 0`, `α > 0`, `β ≠ 0` and the decay condition `αβ < N`,
    /// where `N` is the length of `x0`.
    pub fn new(lambda: f64, alpha: f64, beta: f64, x0: Vec<f64>) -> Result<Self> {
        if x0.is_empty() || x0.iter().any(|c| !c.is_finite()) {
            return Err(invalid("x0", "must be a non-empty finite point"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be positive, got {alpha}")));
        }
        if beta == 0.0 || !beta.is_finite() {
            return Err(invalid("beta", format!("must be finite and nonzero, got {beta}")));
        }
        let n = x0.len() as f64;
        if alpha * beta >= n {
            return Err(hypothesis(
                WEIGHTED_RESULT,
                format!(
                    "requires alpha*beta < N, got alpha*beta = {} with N = {n}",
                    alpha * beta
                ),
            ));
        }
        Ok(Self {
            lambda,
            alpha,
            beta,
            x0,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Same weight with the center moved to `x0`.
    pub fn recentered(&self, x0: Vec<f64>) -> Result<Self> {
        check_dim("x0", self.dim(), x0.len())?;
        Self::new(self.lambda, self.alpha, self.beta, x0)
    }

    fn radial_fraction(&self, r: f64) -> f64 {
        let ra = r.powf(self.alpha);
        ra / (self.lambda + ra)
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let r = distance(x, &self.x0);
        (self.lambda + r.powf(self.alpha)).powf(-self.beta)
    }

    /// `div[ω(x)(x - x0)] = (N - αβ |x-x0|^α / (λ + |x-x0|^α)) ω(x)`.
    pub fn divergence_identity(&self, x: &[f64]) -> f64 {
        let r = distance(x, &self.x0);
        let n = self.dim() as f64;
        (n - self.alpha * self.beta * self.radial_fraction(r)) * self.evaluate(x)
    }

    /// Lower bound `κ₊` of `div(ωτ)/ω`.
    ///
    /// With `β < 0` and a domain, the bound is sharpened using the infimum of
    /// `|x-x0|^α/(λ+|x-x0|^α)` over the domain. That fraction is increasing in
    /// `|x - x0|`, so the infimum sits at the domain's nearest distance to
    /// `x0`. The infimum may not be attained on the open set; it is still a
    /// valid lower bound.
    pub fn kappa_plus(&self, refined_over: Option<&Domain>) -> f64 {
        let n = self.dim() as f64;
        if self.beta > 0.0 {
            return n - self.alpha * self.beta;
        }
        match refined_over {
            None => n,
            Some(domain) => {
                let r_min = domain.inf_distance(&self.x0);
                n + self.alpha * self.beta.abs() * self.radial_fraction(r_min)
            }
        }
    }
}

/// Which pure-power limit of the weight family is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitMode {
    /// `|x - x0|^{-γ}` with `0 < γ < N`.
    Singular,
    /// `|x - x0|^{γ}` with `γ > 0`.
    Dual,
    /// No weight, `γ = 0`.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitWeightParams {
    gamma: f64,
    mode: LimitMode,
}

impl LimitWeightParams {
    pub fn new(gamma: f64, mode: LimitMode, dim: usize) -> Result<Self> {
        let n = dim as f64;
        match mode {
            LimitMode::Singular if !(gamma > 0.0 && gamma < n) => Err(hypothesis(
                GAMMA_HARDY_RESULT,
                format!("requires 0 < gamma < N, got gamma = {gamma} with N = {n}"),
            )),
            LimitMode::Dual if !(gamma > 0.0 && gamma.is_finite()) => Err(hypothesis(
                DUAL_HARDY_RESULT,
                format!("requires gamma > 0, got {gamma}"),
            )),
            LimitMode::None if gamma != 0.0 => {
                Err(invalid("gamma", format!("must be 0 without a weight, got {gamma}")))
            }
            _ => Ok(Self { gamma, mode }),
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mode(&self) -> LimitMode {
        self.mode
    }

    /// Exponent `s` such that the weight is `|x - x0|^s`.
    pub fn power(&self) -> f64 {
        match self.mode {
            LimitMode::Singular => -self.gamma,
            LimitMode::Dual => self.gamma,
            LimitMode::None => 0.0,
        }
    }

    pub fn evaluate(&self, x: &[f64], x0: &[f64]) -> f64 {
        match self.mode {
            LimitMode::None => 1.0,
            _ => distance(x, x0).powf(self.power()),
        }
    }
}

/// Which closed-form constant to produce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantForm {
    /// `(p/κ₊)^p`.
    GeneralWeighted { kappa_plus: f64 },
    /// `(p/(N-γ))^p`, `0 < γ < N`.
    GammaHardy { gamma: f64 },
    /// `(p/(N-p))^p`, `1 ≤ p < N`.
    SharpHardy,
    /// `(p/N)^p`, shared by the whole dual family including `γ = 0`.
    Dual,
    /// `((p/N) c_Ω)^p` with `c_Ω` the circumradius.
    ClassicalPoincare { circumradius: f64 },
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid("p", format!("must satisfy 1 <= p < inf, got {p}")))
    }
}

/// Constant multiplying the gradient-side modular.
pub fn certified_constant(form: ConstantForm, p: f64, dim: usize) -> Result<f64> {
    check_p(p)?;
    let n = dim as f64;
    match form {
        ConstantForm::GeneralWeighted { kappa_plus } => {
            if !(kappa_plus > 0.0) {
                return Err(hypothesis(
                    WEIGHTED_RESULT,
                    format!("kappa_plus must be positive, got {kappa_plus}"),
                ));
            }
            Ok((p / kappa_plus).powf(p))
        }
        ConstantForm::GammaHardy { gamma } => {
            if !(gamma > 0.0 && gamma < n) {
                return Err(hypothesis(
                    GAMMA_HARDY_RESULT,
                    format!("requires 0 < gamma < N, got gamma = {gamma} with N = {n}"),
                ));
            }
            Ok((p / (n - gamma)).powf(p))
        }
        ConstantForm::SharpHardy => {
            if p >= n {
                return Err(hypothesis(
                    SHARP_HARDY_RESULT,
                    format!("requires 1 <= p < N, got p = {p} with N = {n}"),
                ));
            }
            Ok((p / (n - p)).powf(p))
        }
        ConstantForm::Dual => Ok((p / n).powf(p)),
        ConstantForm::ClassicalPoincare { circumradius } => {
            if !circumradius.is_finite() {
                return Err(hypothesis(CLASSICAL_POINCARE_RESULT, "requires a bounded domain"));
            }
            Ok((p / n * circumradius).powf(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lambda: f64, alpha: f64, beta: f64, x0: Vec<f64>) -> WeightParams {
        WeightParams::new(lambda, alpha, beta, x0).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let p = w(1.0, 2.0, 1.0, vec![0.0; 3]);
        assert_eq!(p.evaluate(&[0.0, 0.0, 0.0]), 1.0);
        assert_eq!(p.evaluate(&[1.0, 0.0, 0.0]), 0.5);
        let q = w(1.0, 2.0, -1.0, vec![0.0; 3]);
        assert_eq!(q.evaluate(&[1.0, 0.0, 0.0]), 2.0);
    }

    #[test]
    fn divergence_examples() {
        let p = w(1.0, 2.0, 1.0, vec![0.0; 3]);
        assert_eq!(p.divergence_identity(&[0.0, 0.0, 0.0]), 3.0);
        // (3 - 2 * 1/2) * 1/2
        assert_eq!(p.divergence_identity(&[1.0, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn divergence_matches_finite_difference_of_flux() {
        // oracle: central differences of the flux ω(x)(x - x0)
        let p = w(0.7, 1.5, 0.8, vec![0.2, -0.1, 0.4]);
        let x = [0.9, 0.3, -0.5];
        let h = 1e-5;
        let mut div = 0.0;
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fp = p.evaluate(&xp) * (xp[k] - p.x0()[k]);
            let fm = p.evaluate(&xm) * (xm[k] - p.x0()[k]);
            div += (fp - fm) / (2.0 * h);
        }
        assert!((div - p.divergence_identity(&x)).abs() < 1e-8);
    }

    #[test]
    fn kappa_plus_examples() {
        assert_eq!(w(1.0, 2.0, 1.0, vec![0.0; 3]).kappa_plus(None), 1.0);
        let neg = w(1.0, 2.0, -1.0, vec![0.0; 3]);
        assert_eq!(neg.kappa_plus(None), 3.0);
        let annulus = Domain::annulus(vec![0.0; 3], 1.0, 2.0).unwrap();
        assert_eq!(neg.kappa_plus(Some(&annulus)), 4.0);
        let ball = Domain::ball(vec![0.0; 3], 1.0).unwrap();
        assert_eq!(neg.kappa_plus(Some(&ball)), 3.0);
    }

    #[test]
    fn rejects_decay_at_or_above_dimension() {
        let err = WeightParams::new(1.0, 3.0, 1.0, vec![0.0; 3]).unwrap_err();
        assert!(err.to_string().contains("alpha*beta < N"));
        assert!(WeightParams::new(0.0, 1.0, 1.0, vec![0.0]).is_err());
        assert!(WeightParams::new(1.0, 1.0, 0.0, vec![0.0]).is_err());
    }

    #[test]
    fn constants() {
        assert_eq!(certified_constant(ConstantForm::SharpHardy, 2.0, 3).unwrap(), 4.0);
        assert_eq!(
            certified_constant(ConstantForm::GeneralWeighted { kappa_plus: 1.0 }, 2.0, 3).unwrap(),
            4.0
        );
        let dual = certified_constant(ConstantForm::Dual, 1.0, 3).unwrap();
        assert!((dual - 1.0 / 3.0).abs() < 1e-16);
        let cp = certified_constant(
            ConstantForm::ClassicalPoincare {
                circumradius: 0.5f64.sqrt(),
            },
            2.0,
            2,
        )
        .unwrap();
        assert!((cp - 0.5).abs() < 1e-15);
        assert!(certified_constant(ConstantForm::SharpHardy, 3.0, 3).is_err());
        assert!(certified_constant(ConstantForm::GammaHardy { gamma: 3.0 }, 2.0, 3).is_err());
        assert!(certified_constant(ConstantForm::Dual, 0.5, 3).is_err());
    }

    #[test]
    fn limit_params() {
        assert!(LimitWeightParams::new(3.0, LimitMode::Singular, 3).is_err());
        assert!(LimitWeightParams::new(0.0, LimitMode::Dual, 3).is_err());
        let s = LimitWeightParams::new(2.0, LimitMode::Singular, 3).unwrap();
        assert_eq!(s.evaluate(&[2.0, 0.0, 0.0], &[0.0; 3]), 0.25);
        let d = LimitWeightParams::new(1.0, LimitMode::Dual, 2).unwrap();
        assert_eq!(d.evaluate(&[3.0, 4.0], &[0.0; 2]), 5.0);
    }
}
