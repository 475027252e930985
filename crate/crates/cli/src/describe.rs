//! `hp describe`: the resolved instance of a job and its certified constant.

use std::fmt::Write as _;

use hp_core::verifier::certified_constant_for;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::run::prepare;

pub fn describe(config: &RunConfig, job_id: &str) -> Result<String, CliError> {
    let jobs = prepare(config, config.seed)?;
    let job = jobs
        .iter()
        .find(|j| j.id() == job_id)
        .ok_or_else(|| CliError::Invalid {
            field: "--job".into(),
            message: format!(
                "no job `{job_id}`; known ids: {}",
                jobs.iter().map(|j| j.id()).collect::<Vec<_>>().join(", ")
            ),
        })?;
    let mut out = format!("job {} ({})\n", job.id(), job.kind());
    for (i, inst) in job.instances().iter().enumerate() {
        let constant = certified_constant_for(inst).map_err(|source| CliError::Spec {
            field: format!("{job_id}#{i}"),
            source,
        })?;
        let _ = writeln!(out, "[{i}] {inst}");
        let _ = writeln!(out, "    result: {}", inst.kind().result_name());
        let _ = writeln!(out, "    certified constant: {constant}");
        if let Some(note) = inst.note() {
            let _ = writeln!(out, "    note: {note}");
        }
    }
    Ok(out)
}
