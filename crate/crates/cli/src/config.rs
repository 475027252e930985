//! JSON experiment configuration. Every object rejects unknown keys.
//!
//! Numbers may be written as JSON numbers or as the strings `"inf"` and
//! `"-inf"`.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer};

/// A real number that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" | "+inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(RealVisitor)
    }
}

pub fn reals(v: &[Real]) -> Vec<f64> {
    v.iter().map(|r| r.0).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Grid settings shared by all jobs unless a job overrides them.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub jobs: Vec<JobSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: Option<usize>,
    pub n_3d: Option<usize>,
    pub exclusion_multiplier: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JobSpec {
    Verify {
        id: String,
        instance: InstanceSpec,
        function: FunctionSpec,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    Sweep {
        id: String,
        instances: Vec<InstanceSpec>,
        functions: Vec<FunctionSpec>,
        #[serde(default)]
        grid: Option<GridSpec>,
        /// Replicates every instance that has a reference point at random
        /// points drawn from a box, using the run seed.
        #[serde(default)]
        x0_samples: Option<PointSamples>,
    },
    Extremal {
        id: String,
        instance: InstanceSpec,
        method: ExtremalMethod,
        n: usize,
        /// Box of the finite-difference grid; defaults to the domain's
        /// bounding box.
        #[serde(default)]
        grid_box: Option<BoxSpec>,
        #[serde(default)]
        tol: Option<f64>,
        #[serde(default)]
        max_iter: Option<usize>,
        #[serde(default)]
        steps: Option<usize>,
        /// Starting function of the ratio ascent.
        #[serde(default)]
        start: Option<FunctionSpec>,
        #[serde(default)]
        dump: bool,
    },
    Sharpness {
        id: String,
        instance: InstanceSpec,
        family: FamilySpec,
        parameters: Vec<f64>,
        #[serde(default)]
        radial: bool,
        #[serde(default)]
        radial_n: Option<usize>,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
}

impl JobSpec {
    pub fn id(&self) -> &str {
        match self {
            JobSpec::Verify { id, .. }
            | JobSpec::Sweep { id, .. }
            | JobSpec::Extremal { id, .. }
            | JobSpec::Sharpness { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            JobSpec::Verify { .. } => "verify",
            JobSpec::Sweep { .. } => "sweep",
            JobSpec::Extremal { .. } => "extremal",
            JobSpec::Sharpness { .. } => "sharpness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalMethod {
    Eigen,
    Ascent,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSamples {
    pub count: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// An inequality instance. Which fields are required depends on `kind`;
/// fields that the kind does not use are rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub kind: String,
    pub domain: DomainSpec,
    #[serde(default)]
    pub variant: Option<String>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub exponent: Option<ExponentSpec>,
    #[serde(default)]
    pub sigma: Option<Vec<f64>>,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub weight: Option<WeightSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Box {
        lo: Vec<Real>,
        hi: Vec<Real>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Annulus {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
    },
    Strip {
        direction: Vec<f64>,
        lower: f64,
        upper: f64,
    },
    Union {
        members: Vec<DomainSpec>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSpec {
    Constant {
        p: f64,
    },
    /// `π(t)` with `t` the distance from `x` to the line through `origin`
    /// along `direction`; constant along `direction`.
    Along {
        direction: Vec<f64>,
        origin: Vec<f64>,
        profile: ProfileSpec,
    },
    /// `π(|x - center|)`.
    Radial {
        center: Vec<f64>,
        profile: ProfileSpec,
    },
}

/// Affine profile `a + b t` clipped to `[1, p_max]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub a: f64,
    pub b: f64,
    pub p_max: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Bump {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        scale: Option<f64>,
        /// Clamp to `sup |u| ≤ 1`.
        #[serde(default)]
        clamp: bool,
    },
    TensorBump {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default)]
        scale: Option<f64>,
        #[serde(default)]
        clamp: bool,
    },
    Hardy {
        dim: usize,
        p: f64,
        eps: f64,
        delta: f64,
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        scale: Option<f64>,
        #[serde(default)]
        clamp: bool,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Hardy { delta: f64, radius: f64 },
    BumpRadius { center: Vec<f64> },
    BumpAmplitude { center: Vec<f64>, radius: f64 },
}
