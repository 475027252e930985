//! Turns config specs into core objects. Errors carry the JSON path of the
//! offending field.

use hp_core::exponents::AffineProfile;
use hp_core::extremal::{ExtremalGrid, Family};
use hp_core::verifier::GridSettings;
use hp_core::{Direction, Domain, ExponentField, InequalityInstance, InequalityKind, TestFunction, WeightParams};

use crate::config::{reals, BoxSpec, DomainSpec, ExponentSpec, FamilySpec, FunctionSpec, GridSpec, InstanceSpec};
use crate::error::CliError;

fn core(field: &str) -> impl FnOnce(hp_core::Error) -> CliError + '_ {
    move |source| CliError::Spec {
        field: field.to_string(),
        source,
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

pub fn grid_settings(base: &GridSettings, spec: Option<&GridSpec>, field: &str) -> Result<GridSettings, CliError> {
    let Some(spec) = spec else { return Ok(*base) };
    let settings = GridSettings {
        n: spec.n.unwrap_or(base.n),
        n_3d: spec.n_3d.unwrap_or(base.n_3d),
        exclusion_multiplier: spec.exclusion_multiplier.unwrap_or(base.exclusion_multiplier),
    };
    if settings.n < 8 || settings.n_3d < 8 {
        return Err(invalid(format!("{field}.n"), "grids need at least 8 cells per axis"));
    }
    if !(settings.exclusion_multiplier >= 1.0 && settings.exclusion_multiplier.is_finite()) {
        return Err(invalid(
            format!("{field}.exclusion_multiplier"),
            "must be finite and at least 1",
        ));
    }
    Ok(settings)
}

pub fn direction(v: &[f64], field: &str) -> Result<Direction, CliError> {
    Direction::normalized(v.to_vec()).map_err(core(field))
}

pub fn domain(spec: &DomainSpec, field: &str) -> Result<Domain, CliError> {
    match spec {
        DomainSpec::Box { lo, hi } => Domain::cuboid(reals(lo), reals(hi)).map_err(core(field)),
        DomainSpec::Ball { center, radius } => Domain::ball(center.clone(), *radius).map_err(core(field)),
        DomainSpec::Annulus { center, inner, outer } => {
            Domain::annulus(center.clone(), *inner, *outer).map_err(core(field))
        }
        DomainSpec::Strip {
            direction: dir,
            lower,
            upper,
        } => Domain::strip(direction(dir, &format!("{field}.direction"))?, *lower, *upper).map_err(core(field)),
        DomainSpec::Union { members } => {
            let members = members
                .iter()
                .enumerate()
                .map(|(i, m)| domain(m, &format!("{field}.members[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Domain::union(members).map_err(core(field))
        }
    }
}

pub fn exponent(spec: &ExponentSpec, field: &str) -> Result<ExponentField, CliError> {
    let profile_field = format!("{field}.profile");
    let profile = |p: &crate::config::ProfileSpec| AffineProfile::new(p.a, p.b, p.p_max).map_err(core(&profile_field));
    match spec {
        ExponentSpec::Constant { p } => ExponentField::constant(*p).map_err(core(field)),
        ExponentSpec::Along {
            direction: dir,
            origin,
            profile: prof,
        } => ExponentField::along(
            direction(dir, &format!("{field}.direction"))?,
            origin.clone(),
            profile(prof)?,
        )
        .map_err(core(field)),
        ExponentSpec::Radial { center, profile: prof } => {
            ExponentField::radial(center.clone(), profile(prof)?).map_err(core(field))
        }
    }
}

pub fn function(spec: &FunctionSpec, field: &str) -> Result<TestFunction, CliError> {
    let (u, scale, clamp) = match spec {
        FunctionSpec::Bump {
            center,
            radius,
            scale,
            clamp,
        } => (TestFunction::bump(center.clone(), *radius), scale, clamp),
        FunctionSpec::TensorBump { lo, hi, scale, clamp } => {
            let support = Domain::cuboid(lo.clone(), hi.clone()).map_err(core(field))?;
            (TestFunction::tensor_bump(&support), scale, clamp)
        }
        FunctionSpec::Hardy {
            dim,
            p,
            eps,
            delta,
            radius,
            center,
            scale,
            clamp,
        } => {
            let u = TestFunction::hardy_family(*dim, *p, *eps, *delta, *radius).and_then(|u| match center {
                Some(c) if c.len() != *dim => Err(hp_core::Error::DimensionMismatch {
                    what: "center",
                    expected: *dim,
                    got: c.len(),
                }),
                Some(c) => Ok(u.translated(c)),
                None => Ok(u),
            });
            (u, scale, clamp)
        }
    };
    let mut u = u.map_err(core(field))?;
    if let Some(s) = scale {
        if !s.is_finite() {
            return Err(invalid(format!("{field}.scale"), "must be finite"));
        }
        u = u.scaled_by(*s);
    }
    if *clamp {
        u = u.clamp_unit();
    }
    Ok(u)
}

pub fn family(spec: &FamilySpec) -> Family {
    match spec {
        FamilySpec::Hardy { delta, radius } => Family::Hardy {
            delta: *delta,
            radius: *radius,
        },
        FamilySpec::BumpRadius { center } => Family::BumpRadius { center: center.clone() },
        FamilySpec::BumpAmplitude { center, radius } => Family::BumpAmplitude {
            center: center.clone(),
            radius: *radius,
        },
    }
}

pub fn extremal_grid(spec: Option<&BoxSpec>, domain: &Domain, n: usize, field: &str) -> Result<ExtremalGrid, CliError> {
    match spec {
        Some(b) => ExtremalGrid::new(b.lo.clone(), b.hi.clone(), n).map_err(core(field)),
        None if domain.is_bounded() => ExtremalGrid::bounding(domain, n).map_err(core(field)),
        None => Err(invalid(field, "unbounded domains need an explicit grid_box")),
    }
}

/// Fields an instance kind reads; everything else must be absent.
fn allowed_fields(kind: InequalityKind) -> &'static [&'static str] {
    match kind {
        InequalityKind::DirectionalPoincare => &["p", "sigma", "variant"],
        InequalityKind::GeneralWeighted => &["p", "weight", "x0", "variant"],
        InequalityKind::GammaHardy | InequalityKind::DualHardyGamma => &["p", "gamma", "x0"],
        InequalityKind::SharpHardy | InequalityKind::DualHardyPlain => &["p", "x0"],
        InequalityKind::ClassicalPoincare => &["p"],
        InequalityKind::VarExpDirectional => &["exponent", "sigma", "x0"],
        InequalityKind::VarExpRadial => &["exponent", "sigma", "variant"],
    }
}

fn present_fields(spec: &InstanceSpec) -> Vec<&'static str> {
    let mut out = Vec::new();
    if spec.variant.is_some() {
        out.push("variant");
    }
    if spec.p.is_some() {
        out.push("p");
    }
    if spec.exponent.is_some() {
        out.push("exponent");
    }
    if spec.sigma.is_some() {
        out.push("sigma");
    }
    if spec.x0.is_some() {
        out.push("x0");
    }
    if spec.gamma.is_some() {
        out.push("gamma");
    }
    if spec.weight.is_some() {
        out.push("weight");
    }
    out
}

fn required<'a, T>(value: &'a Option<T>, field: &str, name: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| invalid(format!("{field}.{name}"), "required for this kind"))
}

pub fn instance(spec: &InstanceSpec, field: &str) -> Result<InequalityInstance, CliError> {
    let kind = InequalityKind::from_id(&spec.kind).ok_or_else(|| {
        let known: Vec<&str> = InequalityKind::ALL.iter().map(|k| k.id()).collect();
        invalid(
            format!("{field}.kind"),
            format!("unknown kind `{}`; expected one of {}", spec.kind, known.join(", ")),
        )
    })?;
    let allowed = allowed_fields(kind);
    for name in present_fields(spec) {
        if !allowed.contains(&name) {
            return Err(invalid(
                format!("{field}.{name}"),
                format!("not used by kind `{}`", spec.kind),
            ));
        }
    }
    let dom = domain(&spec.domain, &format!("{field}.domain"))?;
    let variant = spec.variant.as_deref().unwrap_or("standard");
    let bad_variant = || {
        invalid(
            format!("{field}.variant"),
            format!("`{variant}` is not a variant of `{}`", spec.kind),
        )
    };
    let p = || required(&spec.p, field, "p").copied();
    let x0 = || required(&spec.x0, field, "x0").cloned();
    let sigma = || direction(required(&spec.sigma, field, "sigma")?, &format!("{field}.sigma"));
    let gamma = || required(&spec.gamma, field, "gamma").copied();
    let build = |r: hp_core::Result<InequalityInstance>| r.map_err(core(field));
    match kind {
        InequalityKind::DirectionalPoincare => match variant {
            "standard" => build(InequalityInstance::directional_poincare(dom, p()?, sigma()?)),
            "best_basis" | "connected_diameter" if spec.sigma.is_some() => Err(invalid(
                format!("{field}.sigma"),
                format!("variant `{variant}` chooses no direction"),
            )),
            "best_basis" => build(InequalityInstance::best_basis_poincare(dom, p()?)),
            "connected_diameter" => build(InequalityInstance::connected_diameter_poincare(dom, p()?)),
            _ => Err(bad_variant()),
        },
        InequalityKind::GeneralWeighted => {
            let refined = match variant {
                "standard" => false,
                "refined_kappa" => true,
                _ => return Err(bad_variant()),
            };
            let w = required(&spec.weight, field, "weight")?;
            let params =
                WeightParams::new(w.lambda, w.alpha, w.beta, x0()?).map_err(core(&format!("{field}.weight")))?;
            build(InequalityInstance::general_weighted(dom, p()?, params, refined))
        }
        InequalityKind::GammaHardy => build(InequalityInstance::gamma_hardy(dom, p()?, gamma()?, x0()?)),
        InequalityKind::SharpHardy => build(InequalityInstance::sharp_hardy(dom, p()?, x0()?)),
        InequalityKind::DualHardyGamma => build(InequalityInstance::dual_hardy_gamma(dom, p()?, gamma()?, x0()?)),
        InequalityKind::DualHardyPlain => build(InequalityInstance::dual_hardy_plain(dom, p()?, x0()?)),
        InequalityKind::ClassicalPoincare => build(InequalityInstance::classical_poincare(dom, p()?)),
        InequalityKind::VarExpDirectional => {
            let field_exp = exponent(
                required(&spec.exponent, field, "exponent")?,
                &format!("{field}.exponent"),
            )?;
            build(InequalityInstance::var_exp_directional(
                dom,
                field_exp,
                sigma()?,
                spec.x0.clone(),
            ))
        }
        InequalityKind::VarExpRadial => {
            let weighted = match variant {
                "standard" => false,
                "weighted" => true,
                _ => return Err(bad_variant()),
            };
            let field_exp = exponent(
                required(&spec.exponent, field, "exponent")?,
                &format!("{field}.exponent"),
            )?;
            build(InequalityInstance::var_exp_radial(dom, field_exp, sigma()?, weighted))
        }
    }
}
