//! Job execution, CSV output and the run summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use hp_core::extremal::{
    optimal_constant_p2, ratio_ascent, sharpness_report, AscentSettings, EigenSettings, ExtremalGrid, ExtremalResult,
    Family, GridFunction, SharpnessSettings,
};
use hp_core::verifier::{check_support, sweep, GridSettings, SweepRow, VerificationReport};
use hp_core::{InequalityInstance, TestFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExtremalMethod, JobSpec, RunConfig};
use crate::error::CliError;
use crate::resolve;

/// One line of a results CSV. Column order is part of the output format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub instance_id: String,
    pub kind: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub p_descr: String,
    pub params: String,
    pub lhs: f64,
    pub lhs_err: f64,
    pub rhs: f64,
    pub rhs_err: f64,
    pub constant: f64,
    pub ratio: f64,
    /// `true`, `false`, or `error`.
    pub pass: String,
    pub grid_n: usize,
}

impl CsvRow {
    fn from_report(id: String, inst: &InequalityInstance, u: &TestFunction, r: &VerificationReport) -> Self {
        Self {
            instance_id: id,
            kind: inst.kind().id().to_string(),
            n: inst.dim(),
            p_descr: inst.exponent().to_string(),
            params: format!("{inst}; u = {u}"),
            lhs: r.lhs.value,
            lhs_err: r.lhs.error_estimate,
            rhs: r.rhs.value,
            rhs_err: r.rhs.error_estimate,
            constant: r.constant,
            ratio: r.ratio,
            pass: r.pass.to_string(),
            grid_n: r.grid_n,
        }
    }

    /// A row for a computation that failed; `params` carries the message.
    fn error(id: String, kind: &str, inst: &InequalityInstance, params: String) -> Self {
        Self {
            instance_id: id,
            kind: kind.to_string(),
            n: inst.dim(),
            p_descr: inst.exponent().to_string(),
            params,
            lhs: f64::NAN,
            lhs_err: f64::NAN,
            rhs: f64::NAN,
            rhs_err: f64::NAN,
            constant: f64::NAN,
            ratio: f64::NAN,
            pass: "error".into(),
            grid_n: 0,
        }
    }

    fn passed(&self) -> bool {
        self.pass == "true"
    }
}

/// A job with every spec resolved, ready to run.
pub enum Prepared {
    Verify {
        id: String,
        instance: InequalityInstance,
        function: TestFunction,
        grid: GridSettings,
    },
    Sweep {
        id: String,
        instances: Vec<InequalityInstance>,
        functions: Vec<TestFunction>,
        grid: GridSettings,
    },
    Extremal {
        id: String,
        instance: InequalityInstance,
        grid: ExtremalGrid,
        method: ExtremalMethod,
        eigen: EigenSettings,
        ascent: AscentSettings,
        start: Option<GridFunction>,
        dump: bool,
    },
    Sharpness {
        id: String,
        instance: InequalityInstance,
        family: Family,
        parameters: Vec<f64>,
        settings: SharpnessSettings,
    },
}

impl Prepared {
    pub fn id(&self) -> &str {
        match self {
            Prepared::Verify { id, .. }
            | Prepared::Sweep { id, .. }
            | Prepared::Extremal { id, .. }
            | Prepared::Sharpness { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Prepared::Verify { .. } => "verify",
            Prepared::Sweep { .. } => "sweep",
            Prepared::Extremal { .. } => "extremal",
            Prepared::Sharpness { .. } => "sharpness",
        }
    }

    /// Instances the job touches, in row order.
    pub fn instances(&self) -> Vec<&InequalityInstance> {
        match self {
            Prepared::Sweep { instances, .. } => instances.iter().collect(),
            Prepared::Verify { instance, .. }
            | Prepared::Extremal { instance, .. }
            | Prepared::Sharpness { instance, .. } => vec![instance],
        }
    }
}

fn random_x0_copies(
    instances: Vec<InequalityInstance>,
    samples: &crate::config::PointSamples,
    rng: &mut ChaCha8Rng,
    field: &str,
) -> Result<Vec<InequalityInstance>, CliError> {
    if samples.lo.len() != samples.hi.len() || samples.lo.iter().zip(&samples.hi).any(|(a, b)| !(a < b)) {
        return Err(CliError::Invalid {
            field: field.into(),
            message: "need lo < hi componentwise".into(),
        });
    }
    let mut out = Vec::new();
    for inst in instances {
        let movable = inst.x0().is_some() && inst.kind() != hp_core::InequalityKind::VarExpRadial;
        if !movable {
            out.push(inst);
            continue;
        }
        if inst.dim() != samples.lo.len() {
            return Err(CliError::Invalid {
                field: field.into(),
                message: format!("box has dimension {}, instance has {}", samples.lo.len(), inst.dim()),
            });
        }
        let copies = (0..samples.count)
            .map(|_| {
                let x0: Vec<f64> = samples
                    .lo
                    .iter()
                    .zip(&samples.hi)
                    .map(|(a, b)| rng.gen_range(*a..*b))
                    .collect();
                inst.with_x0(x0).map_err(|source| CliError::Spec {
                    field: field.into(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(inst);
        out.extend(copies);
    }
    Ok(out)
}

pub fn prepare(config: &RunConfig, seed: u64) -> Result<Vec<Prepared>, CliError> {
    let base = resolve::grid_settings(&GridSettings::default(), config.grid.as_ref(), "grid")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut prepared = Vec::with_capacity(config.jobs.len());
    for (j, job) in config.jobs.iter().enumerate() {
        let at = format!("jobs[{j}]");
        if job.id().is_empty() || job.id().contains(['/', '\\']) {
            return Err(CliError::Invalid {
                field: format!("{at}.id"),
                message: "must be a non-empty file-name-safe string".into(),
            });
        }
        if !seen.insert(job.id().to_string()) {
            return Err(CliError::Invalid {
                field: format!("{at}.id"),
                message: format!("duplicate job id `{}`", job.id()),
            });
        }
        prepared.push(match job {
            JobSpec::Verify {
                id,
                instance,
                function,
                grid,
            } => {
                let instance = resolve::instance(instance, &format!("{at}.instance"))?;
                let function = resolve::function(function, &format!("{at}.function"))?;
                check_support(instance.domain(), &function).map_err(|source| CliError::Spec {
                    field: format!("{at}.function"),
                    source,
                })?;
                if instance.requires_unit_bound() && function.sup_norm_bound() > 1.0 {
                    return Err(CliError::Spec {
                        field: format!("{at}.function"),
                        source: hp_core::Error::NotUnitBounded {
                            bound: function.sup_norm_bound(),
                        },
                    });
                }
                Prepared::Verify {
                    id: id.clone(),
                    instance,
                    function,
                    grid: resolve::grid_settings(&base, grid.as_ref(), &format!("{at}.grid"))?,
                }
            }
            JobSpec::Sweep {
                id,
                instances,
                functions,
                grid,
                x0_samples,
            } => {
                let mut resolved = instances
                    .iter()
                    .enumerate()
                    .map(|(i, s)| resolve::instance(s, &format!("{at}.instances[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(samples) = x0_samples {
                    resolved = random_x0_copies(resolved, samples, &mut rng, &format!("{at}.x0_samples"))?;
                }
                let functions = functions
                    .iter()
                    .enumerate()
                    .map(|(i, s)| resolve::function(s, &format!("{at}.functions[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                Prepared::Sweep {
                    id: id.clone(),
                    instances: resolved,
                    functions,
                    grid: resolve::grid_settings(&base, grid.as_ref(), &format!("{at}.grid"))?,
                }
            }
            JobSpec::Extremal {
                id,
                instance,
                method,
                n,
                grid_box,
                tol,
                max_iter,
                steps,
                start,
                dump,
            } => {
                let instance = resolve::instance(instance, &format!("{at}.instance"))?;
                let grid = resolve::extremal_grid(grid_box.as_ref(), instance.domain(), *n, &format!("{at}.grid_box"))?;
                let mut eigen = EigenSettings::default();
                if let Some(t) = tol {
                    eigen.tol = *t;
                }
                if let Some(m) = max_iter {
                    eigen.max_iter = *m;
                }
                let mut ascent = AscentSettings::default();
                if let Some(s) = steps {
                    ascent.steps = *s;
                }
                let start = match (method, start) {
                    (ExtremalMethod::Eigen, None) => None,
                    (ExtremalMethod::Eigen, Some(_)) => {
                        return Err(CliError::Invalid {
                            field: format!("{at}.start"),
                            message: "only the ascent method takes a starting function".into(),
                        })
                    }
                    (ExtremalMethod::Ascent, None) => {
                        return Err(CliError::Invalid {
                            field: format!("{at}.start"),
                            message: "the ascent method needs a starting function".into(),
                        })
                    }
                    (ExtremalMethod::Ascent, Some(s)) => {
                        let u = resolve::function(s, &format!("{at}.start"))?;
                        Some(
                            GridFunction::sample(&instance, &grid, &u).map_err(|source| CliError::Spec {
                                field: format!("{at}.start"),
                                source,
                            })?,
                        )
                    }
                };
                if *method == ExtremalMethod::Eigen && instance.p() != Some(2.0) {
                    return Err(CliError::Invalid {
                        field: format!("{at}.method"),
                        message: "the eigenvalue method needs p = 2".into(),
                    });
                }
                Prepared::Extremal {
                    id: id.clone(),
                    instance,
                    grid,
                    method: *method,
                    eigen,
                    ascent,
                    start,
                    dump: *dump,
                }
            }
            JobSpec::Sharpness {
                id,
                instance,
                family,
                parameters,
                radial,
                radial_n,
                grid,
            } => {
                let instance = resolve::instance(instance, &format!("{at}.instance"))?;
                let settings = SharpnessSettings {
                    radial: *radial,
                    radial_n: radial_n.unwrap_or(SharpnessSettings::default().radial_n),
                    grid: resolve::grid_settings(&base, grid.as_ref(), &format!("{at}.grid"))?,
                };
                Prepared::Sharpness {
                    id: id.clone(),
                    instance,
                    family: resolve::family(family),
                    parameters: parameters.clone(),
                    settings,
                }
            }
        });
    }
    Ok(prepared)
}

#[derive(Debug, Clone, Serialize)]
pub struct JobSummary {
    pub id: String,
    pub kind: String,
    pub csv: String,
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub worst_ratio: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub started_unix: u64,
    pub seconds: f64,
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub worst_ratio: f64,
    pub jobs: Vec<JobSummary>,
}

impl RunSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errors == 0
    }
}

fn sweep_rows(
    id: &str,
    instances: &[InequalityInstance],
    functions: &[TestFunction],
    rows: &[SweepRow],
) -> Vec<CsvRow> {
    rows.iter()
        .map(|row| {
            let inst = &instances[row.instance_index];
            let u = &functions[row.function_index];
            let rid = format!("{id}#{}", row.instance_index);
            match &row.outcome {
                Ok(r) => CsvRow::from_report(rid, inst, u, r),
                Err(e) => CsvRow::error(rid, inst.kind().id(), inst, format!("{inst}; u = {u}; error = {e}")),
            }
        })
        .collect()
}

fn extremal_row(id: &str, inst: &InequalityInstance, r: &ExtremalResult, detail: &str, grid_n: usize) -> CsvRow {
    CsvRow {
        instance_id: id.to_string(),
        kind: "extremal".into(),
        n: inst.dim(),
        p_descr: inst.exponent().to_string(),
        params: format!("{inst}; {detail}; {}", r.best),
        lhs: r.estimated_optimal_constant,
        lhs_err: r.estimated_optimal_constant * r.tolerance,
        rhs: 1.0,
        rhs_err: 0.0,
        constant: r.certified_constant,
        ratio: r.sharpness,
        pass: r.within_certified().to_string(),
        grid_n,
    }
}

fn write_dump(dir: &Path, id: &str, f: &GridFunction) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Sidecar<'a> {
        dtype: &'static str,
        order: &'static str,
        shape: &'a [usize],
        spacing: &'a [f64],
        origin: &'a [f64],
    }
    let bin = dir.join(format!("{id}.bin"));
    let bytes: Vec<u8> = f.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(&bin, bytes).map_err(|source| CliError::Write {
        path: bin.display().to_string(),
        source,
    })?;
    let side = dir.join(format!("{id}.json"));
    let meta = Sidecar {
        dtype: "f64-le",
        order: "axis 0 fastest",
        shape: f.shape(),
        spacing: f.spacing(),
        origin: f.origin(),
    };
    fs::write(&side, serde_json::to_string_pretty(&meta)?).map_err(|source| CliError::Write {
        path: side.display().to_string(),
        source,
    })
}

/// Runs one prepared job and returns its CSV rows.
pub fn execute(job: &Prepared, out_dir: &Path) -> Result<Vec<CsvRow>, CliError> {
    Ok(match job {
        Prepared::Verify {
            id,
            instance,
            function,
            grid,
        } => {
            let rows = sweep(std::slice::from_ref(instance), std::slice::from_ref(function), grid);
            let mut rows = sweep_rows(
                id,
                std::slice::from_ref(instance),
                std::slice::from_ref(function),
                &rows,
            );
            rows[0].instance_id = id.clone();
            rows
        }
        Prepared::Sweep {
            id,
            instances,
            functions,
            grid,
        } => {
            let rows = sweep(instances, functions, grid);
            sweep_rows(id, instances, functions, &rows)
        }
        Prepared::Extremal {
            id,
            instance,
            grid,
            method,
            eigen,
            ascent,
            start,
            dump,
        } => {
            let outcome = match method {
                ExtremalMethod::Eigen => optimal_constant_p2(instance, grid, eigen),
                ExtremalMethod::Ascent => ratio_ascent(
                    instance,
                    start.as_ref().expect("validated before running"),
                    grid,
                    ascent,
                )
                .map(|(r, _)| r),
            };
            let detail = match method {
                ExtremalMethod::Eigen => "method = eigen",
                ExtremalMethod::Ascent => "method = ascent",
            };
            match outcome {
                Ok(r) => {
                    if *dump {
                        if let Some(f) = &r.best_function {
                            write_dump(out_dir, id, f)?;
                        }
                    }
                    vec![extremal_row(id, instance, &r, detail, grid.n())]
                }
                Err(e) => vec![CsvRow::error(
                    id.clone(),
                    "extremal",
                    instance,
                    format!("{instance}; {detail}; error = {e}"),
                )],
            }
        }
        Prepared::Sharpness {
            id,
            instance,
            family,
            parameters,
            settings,
        } => match sharpness_report(instance, family, parameters, settings) {
            Ok(r) => r
                .curve
                .iter()
                .map(|pt| {
                    let scaled = r.certified_constant * pt.rhs.value;
                    let ratio = if pt.lhs.value == 0.0 {
                        0.0
                    } else {
                        pt.lhs.value / scaled
                    };
                    CsvRow {
                        instance_id: id.clone(),
                        kind: "extremal".into(),
                        n: instance.dim(),
                        p_descr: instance.exponent().to_string(),
                        params: format!(
                            "{instance}; family = {family:?}; parameter = {}; L/R = {}",
                            pt.parameter, pt.ratio
                        ),
                        lhs: pt.lhs.value,
                        lhs_err: pt.lhs.error_estimate,
                        rhs: pt.rhs.value,
                        rhs_err: pt.rhs.error_estimate,
                        constant: r.certified_constant,
                        ratio,
                        pass: (ratio <= 1.0 + pt.relative_error + 1e-9).to_string(),
                        grid_n: if settings.radial {
                            settings.radial_n
                        } else {
                            settings.grid.n_for(instance.dim())
                        },
                    }
                })
                .collect(),
            Err(e) => vec![CsvRow::error(
                id.clone(),
                "extremal",
                instance,
                format!("{instance}; family = {family:?}; error = {e}"),
            )],
        },
    })
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    if rows.is_empty() {
        w.write_record([
            "instance_id",
            "kind",
            "N",
            "p_descr",
            "params",
            "lhs",
            "lhs_err",
            "rhs",
            "rhs_err",
            "constant",
            "ratio",
            "pass",
            "grid_n",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Options from the command line that override the config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Validates every job, then runs them in order and writes one CSV per job
/// plus `summary.json`.
pub fn run(config: &RunConfig, options: &RunOptions) -> Result<RunSummary, CliError> {
    let seed = options.seed.unwrap_or(config.seed);
    let jobs = prepare(config, seed)?;
    let out_dir = options
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hp-out"));
    fs::create_dir_all(&out_dir).map_err(|source| CliError::Write {
        path: out_dir.display().to_string(),
        source,
    })?;
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let mut summaries = Vec::with_capacity(jobs.len());
    for job in &jobs {
        let t = Instant::now();
        let rows = execute(job, &out_dir)?;
        let csv_name = format!("{}.csv", job.id());
        write_csv(&out_dir.join(&csv_name), &rows)?;
        summaries.push(JobSummary {
            id: job.id().to_string(),
            kind: job.kind().to_string(),
            csv: csv_name,
            rows: rows.len(),
            passed: rows.iter().filter(|r| r.passed()).count(),
            failed: rows.iter().filter(|r| r.pass == "false").count(),
            errors: rows.iter().filter(|r| r.pass == "error").count(),
            worst_ratio: rows
                .iter()
                .filter(|r| r.ratio.is_finite())
                .map(|r| r.ratio)
                .fold(0.0, f64::max),
            seconds: t.elapsed().as_secs_f64(),
        });
    }
    let summary = RunSummary {
        seed,
        started_unix,
        seconds: clock.elapsed().as_secs_f64(),
        rows: summaries.iter().map(|s| s.rows).sum(),
        passed: summaries.iter().map(|s| s.passed).sum(),
        failed: summaries.iter().map(|s| s.failed).sum(),
        errors: summaries.iter().map(|s| s.errors).sum(),
        worst_ratio: summaries.iter().map(|s| s.worst_ratio).fold(0.0, f64::max),
        jobs: summaries,
    };
    let path = out_dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n").map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })?;
    Ok(summary)
}
