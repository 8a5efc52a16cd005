//! Executing a case: schedule, probes and reference comparison.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::case::{Case, CaseError, ResolvedCase};
use crate::probes::{ProbeContext, ProbeError};
use crate::solver::{run_schedule, ScheduleResult, SolverError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeValue {
    pub probe: String,
    pub step: usize,
    pub stage: String,
    pub value: f64,
}

/// Comparison of one probe against its reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceCheck {
    pub probe: String,
    pub stage: String,
    pub expected: f64,
    /// `None` when the stage was never reached.
    pub measured: Option<f64>,
    pub rel_error: Option<f64>,
    pub rel_tol: f64,
    pub source: String,
    pub pass: bool,
}

pub struct RunOutcome {
    pub case: Case,
    /// η of the reported solve; differs from `case.eta` after a fallback.
    pub eta: f64,
    /// Failed attempts before the reported one, as (η, error message).
    pub failed_attempts: Vec<(f64, String)>,
    pub resolved: ResolvedCase,
    pub schedule: ScheduleResult,
    pub probes: Vec<ProbeValue>,
    pub elapsed: Duration,
}

impl RunOutcome {
    pub fn error(&self) -> Option<&SolverError> {
        self.schedule.error.as_ref()
    }

    pub fn converged(&self) -> bool {
        self.schedule.error.is_none() && self.schedule.state.converged
    }

    /// Probe value at the final step of `stage` (last stage when `None`).
    pub fn value_at(&self, probe: &str, stage: Option<&str>) -> Option<f64> {
        let stage = stage.or_else(|| self.case.stages.last().map(|s| s.name.as_str()))?;
        let step = stage_final_step(&self.case, stage)?;
        self.probes
            .iter()
            .find(|p| p.probe == probe && p.step == step)
            .map(|p| p.value)
    }

    pub fn reference_checks(&self) -> Vec<ReferenceCheck> {
        self.case
            .references
            .iter()
            .map(|r| {
                let stage = r
                    .stage
                    .clone()
                    .or_else(|| self.case.stages.last().map(|s| s.name.clone()))
                    .unwrap_or_default();
                let measured = self.value_at(&r.probe, Some(&stage));
                let rel_error = measured.map(|m| rel_diff(m, r.value));
                ReferenceCheck {
                    probe: r.probe.clone(),
                    stage,
                    expected: r.value,
                    measured,
                    rel_error,
                    rel_tol: r.rel_tol,
                    source: r.source.clone(),
                    pass: rel_error.is_some_and(|e| e <= r.rel_tol),
                }
            })
            .collect()
    }
}

pub fn rel_diff(measured: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        measured.abs()
    } else {
        ((measured - expected) / expected).abs()
    }
}

/// Global step index (1-based) of the last step of `stage`.
pub fn stage_final_step(case: &Case, stage: &str) -> Option<usize> {
    let mut step = 0;
    for s in &case.stages {
        step += s.steps;
        if s.name == stage {
            return Some(step);
        }
    }
    None
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
}

/// Solve the schedule and evaluate every probe at every converged step.
/// A solver failure is recorded in the outcome, not returned as an error.
/// When the solve fails, each `eta_fallback` value is tried in turn and the
/// first converged run (or the last attempt) is reported.
pub fn run_case(case: &Case) -> Result<RunOutcome, RunError> {
    let start = Instant::now();
    case.validate()?;
    let mut failed_attempts = Vec::new();
    let mut eta = case.eta;
    let mut ladder = case.eta_fallback.iter();
    let (resolved, schedule) = loop {
        let mut attempt = case.clone();
        attempt.eta = eta;
        let resolved = attempt.resolve()?;
        let schedule = run_schedule(&resolved.problem, &resolved.stages, &case.solver);
        match (&schedule.error, ladder.next()) {
            (Some(err), Some(&next)) => {
                failed_attempts.push((eta, err.to_string()));
                eta = next;
            }
            _ => break (resolved, schedule),
        }
    };
    let problem = &resolved.problem;
    let mut probes = Vec::new();
    for snap in &schedule.snapshots {
        let mut ctx = ProbeContext::new(&problem.mesh, &snap.u, &problem.material, &problem.models);
        for p in &case.probes {
            probes.push(ProbeValue {
                probe: p.name().to_string(),
                step: snap.step,
                stage: snap.stage_name.clone(),
                value: ctx.evaluate(p)?,
            });
        }
    }
    Ok(RunOutcome {
        case: case.clone(),
        eta,
        failed_attempts,
        resolved,
        schedule,
        probes,
        elapsed: start.elapsed(),
    })
}
