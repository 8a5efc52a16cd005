//! Load stepping and Newton–Raphson iteration.
//!
//! The residual is `R = F_int − F_ext` and the tangent `K = K_int − ∂F_ext/∂u`.
//! Constrained DOFs are eliminated; prescribed increments enter the
//! right-hand side through the free/constrained coupling block.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constitutive::{Material, Model};
use crate::fem::assembly::internal_force;
use crate::fem::{
    external_force_and_tangent, internal_force_and_tangent, FemError, Load, LoadFactors, Mesh,
    Spring, TangentMode,
};
use crate::sparse::{LinearSolveError, SparseLuSolver, Triplets};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("conflicting prescribed values for DOF {dof}: {first} vs {second}")]
    ConflictingConstraint { dof: usize, first: f64, second: f64 },
    #[error("constraint references DOF {0}, which does not exist")]
    InvalidDof(usize),
    #[error("step {step}, iteration {iteration}: {source}")]
    Singular {
        step: usize,
        iteration: usize,
        #[source]
        source: LinearSolveError,
    },
    #[error("step {step}: no convergence after {iterations} iterations (residual ratio {ratio:e})")]
    NonConvergence { step: usize, iterations: usize, ratio: f64 },
    #[error("step {step}: residual became non-finite")]
    NonFinite { step: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Converged when `‖R_free‖ / ‖F_ext,free‖ ≤ tol_rel`.
    pub tol_rel: f64,
    /// Absolute residual tolerance when no force scale exists.
    pub tol_abs: f64,
    pub max_iter: usize,
    /// Backtracking on the residual norm.
    pub line_search: bool,
    /// Use the SVK tangent for the first iteration out of the stress-free state.
    pub elastic_predictor: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_rel: 1e-8,
            tol_abs: 1e-12,
            max_iter: 50,
            line_search: false,
            elastic_predictor: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol_rel > 0.0) || !(self.tol_abs > 0.0) {
            return Err(SolverError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Prescribed displacement of one DOF: `value × factor(channel)`, or plain
/// `value` without a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DofConstraint {
    pub dof: usize,
    pub value: f64,
    pub channel: Option<String>,
}

/// One load stage: channel factors move linearly to their targets over
/// `steps` increments; `hold` DOFs are fixed at their stage-start values.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSpec {
    pub name: String,
    pub steps: usize,
    pub targets: BTreeMap<String, f64>,
    pub hold: Vec<usize>,
}

/// A fully resolved boundary value problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: Mesh,
    pub material: Material,
    /// Constitutive model per element.
    pub models: Vec<Model>,
    pub loads: Vec<Load>,
    pub springs: Vec<Spring>,
    pub constraints: Vec<DofConstraint>,
    /// Starting displacement; zero when `None`.
    pub initial_u: Option<Vec<f64>>,
}

impl Problem {
    pub fn may_be_unsymmetric(&self) -> bool {
        self.models.iter().any(|m| m.may_be_unsymmetric()) || self.loads.iter().any(Load::is_follower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub step: usize,
    pub iteration: usize,
    pub residual_norm: f64,
    pub external_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveState {
    pub u: Vec<f64>,
    /// Last completed step (global, 1-based; 0 before any step).
    pub step: usize,
    pub history: Vec<IterationRecord>,
    /// Linear solves per completed step.
    pub step_iterations: Vec<usize>,
    pub converged: bool,
    pub factors: LoadFactors,
}

impl SolveState {
    pub fn new(n_dofs: usize) -> Self {
        Self {
            u: vec![0.0; n_dofs],
            step: 0,
            history: Vec::new(),
            step_iterations: Vec::new(),
            converged: true,
            factors: LoadFactors::new(),
        }
    }

    pub fn last_ratio(&self) -> Option<f64> {
        self.history.last().map(|r| r.ratio)
    }
}

/// Map from constrained DOF to its target value, with free-DOF numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct DofPartition {
    pub targets: BTreeMap<usize, f64>,
    /// `free_index[dof]` is the position among free DOFs, or `None`.
    pub free_index: Vec<Option<usize>>,
    pub free: Vec<usize>,
}

impl DofPartition {
    pub fn new(n_dofs: usize, prescribed: &[(usize, f64)]) -> Result<Self, SolverError> {
        let mut targets = BTreeMap::new();
        for &(dof, value) in prescribed {
            if dof >= n_dofs {
                return Err(SolverError::InvalidDof(dof));
            }
            if let Some(&old) = targets.get(&dof) {
                if old != value {
                    return Err(SolverError::ConflictingConstraint { dof, first: old, second: value });
                }
            }
            targets.insert(dof, value);
        }
        let mut free_index = vec![None; n_dofs];
        let mut free = Vec::with_capacity(n_dofs - targets.len());
        for (dof, slot) in free_index.iter_mut().enumerate() {
            if !targets.contains_key(&dof) {
                *slot = Some(free.len());
                free.push(dof);
            }
        }
        Ok(Self { targets, free_index, free })
    }
}

/// Reduced linear system on the free DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub matrix: Triplets,
    pub rhs: Vec<f64>,
}

/// Eliminate constrained DOFs from `K Δu = −R` given prescribed increments
/// `delta_c` (indexed by global DOF, only constrained entries are read).
pub fn apply_dirichlet(
    k: &[&Triplets],
    residual: &[f64],
    partition: &DofPartition,
    delta_c: &[f64],
) -> ReducedSystem {
    let n_free = partition.free.len();
    let mut rhs: Vec<f64> = partition.free.iter().map(|&d| -residual[d]).collect();
    let nnz = k.iter().map(|m| m.len()).sum();
    let mut matrix = Triplets::with_capacity(n_free, nnz);
    for m in k {
        for idx in 0..m.len() {
            let (r, c, v) = (m.rows[idx], m.cols[idx], m.vals[idx]);
            let Some(fr) = partition.free_index[r] else { continue };
            match partition.free_index[c] {
                Some(fc) => matrix.push(fr, fc, v),
                None => rhs[fr] -= v * delta_c[c],
            }
        }
    }
    ReducedSystem { matrix, rhs }
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

struct Residual {
    r: Vec<f64>,
    free_norm: f64,
    scale: f64,
}

fn residual_measure(
    problem: &Problem,
    u: &[f64],
    factors: &LoadFactors,
    partition: &DofPartition,
) -> Result<Residual, SolverError> {
    let f_int = internal_force(&problem.mesh, u, &problem.material, &problem.models)?;
    let (f_ext, _) = external_force_and_tangent(&problem.mesh, u, &problem.loads, &problem.springs, factors)?;
    Ok(measure(f_int, &f_ext, partition))
}

fn measure(f_int: Vec<f64>, f_ext: &[f64], partition: &DofPartition) -> Residual {
    let mut r = f_int;
    for (ri, fe) in r.iter_mut().zip(f_ext) {
        *ri -= fe;
    }
    let free_norm = norm(partition.free.iter().map(|&d| r[d]));
    let ext_norm = norm(partition.free.iter().map(|&d| f_ext[d]));
    let scale = if ext_norm > 0.0 {
        ext_norm
    } else {
        norm(partition.targets.keys().map(|&d| r[d]))
    };
    Residual { r, free_norm, scale }
}

/// Newton iteration for one load step at fixed factors. Returns the number
/// of linear solves.
pub fn newton_solve(
    problem: &Problem,
    state: &mut SolveState,
    partition: &DofPartition,
    cfg: &SolverConfig,
    lu: &mut SparseLuSolver,
) -> Result<usize, SolverError> {
    let step = state.step + 1;
    let n = problem.mesh.n_dofs();
    let factors = state.factors.clone();
    let mut iteration = 0;
    loop {
        let u = &state.u;
        let mut delta_c = vec![0.0; n];
        let mut prescribing = false;
        for (&d, &t) in &partition.targets {
            delta_c[d] = t - u[d];
            prescribing |= delta_c[d] != 0.0;
        }
        let mode = if cfg.elastic_predictor && iteration == 0 && u.iter().all(|&v| v == 0.0) {
            TangentMode::Elastic
        } else {
            TangentMode::Consistent
        };
        let (f_int, k_int) = internal_force_and_tangent(&problem.mesh, u, &problem.material, &problem.models, mode)?;
        let (f_ext, mut k_ext) =
            external_force_and_tangent(&problem.mesh, u, &problem.loads, &problem.springs, &factors)?;
        let res = measure(f_int, &f_ext, partition);
        if !res.free_norm.is_finite() {
            return Err(SolverError::NonFinite { step });
        }
        let ratio = if res.scale > 0.0 { res.free_norm / res.scale } else { res.free_norm };
        let tol = if res.scale > 0.0 { cfg.tol_rel } else { cfg.tol_abs };
        state.history.push(IterationRecord {
            step,
            iteration,
            residual_norm: res.free_norm,
            external_norm: res.scale,
            ratio,
        });
        if !prescribing && ratio <= tol {
            return Ok(iteration);
        }
        if iteration >= cfg.max_iter {
            return Err(SolverError::NonConvergence { step, iterations: iteration, ratio });
        }

        k_ext.vals.iter_mut().for_each(|v| *v = -*v);
        let system = apply_dirichlet(&[&k_int, &k_ext], &res.r, partition, &delta_c);
        let du_free = lu
            .solve(&system.matrix, &system.rhs)
            .map_err(|source| SolverError::Singular { step, iteration, source })?;

        let mut alpha = 1.0;
        let base = state.u.clone();
        let apply_step = |u: &mut Vec<f64>, alpha: f64| {
            for (i, &d) in partition.free.iter().enumerate() {
                u[d] = base[d] + alpha * du_free[i];
            }
            for (&d, &t) in &partition.targets {
                u[d] = base[d] + alpha * (t - base[d]);
            }
        };
        apply_step(&mut state.u, alpha);
        if cfg.line_search && !prescribing {
            for _ in 0..6 {
                let trial = residual_measure(problem, &state.u, &factors, partition)?;
                if trial.free_norm.is_finite() && trial.free_norm < res.free_norm {
                    break;
                }
                alpha *= 0.5;
                apply_step(&mut state.u, alpha);
            }
        }
        iteration += 1;
    }
}

/// Outcome of a load schedule; snapshots are kept even when a later step fails.
#[derive(Debug, Clone)]
pub struct ScheduleResult {
    pub state: SolveState,
    pub snapshots: Vec<Snapshot>,
    pub error: Option<SolverError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub stage: usize,
    pub stage_name: String,
    pub factors: LoadFactors,
    pub iterations: usize,
    pub u: Vec<f64>,
}

/// Run all stages in order.
pub fn run_schedule(problem: &Problem, stages: &[StageSpec], cfg: &SolverConfig) -> ScheduleResult {
    let mut state = SolveState::new(problem.mesh.n_dofs());
    if let Some(u0) = problem.initial_u.as_ref().filter(|u0| u0.len() == state.u.len()) {
        state.u.clone_from(u0);
    }
    let mut snapshots = Vec::new();
    let error = run_stages(problem, stages, cfg, &mut state, &mut snapshots).err();
    state.converged = error.is_none();
    ScheduleResult { state, snapshots, error }
}

fn run_stages(
    problem: &Problem,
    stages: &[StageSpec],
    cfg: &SolverConfig,
    state: &mut SolveState,
    snapshots: &mut Vec<Snapshot>,
) -> Result<(), SolverError> {
    cfg.validate()?;
    let mut lu = SparseLuSolver::new();
    for (stage_index, stage) in stages.iter().enumerate() {
        let start = state.factors.clone();
        let held: Vec<(usize, f64)> = stage.hold.iter().map(|&d| (d, state.u[d])).collect();
        let steps = stage.steps.max(1);
        for k in 1..=steps {
            let frac = k as f64 / steps as f64;
            for (ch, &target) in &stage.targets {
                let from = start.get(ch).copied().unwrap_or(0.0);
                // land exactly on the target so death loads reach zero
                let f = if k == steps { target } else { from + (target - from) * frac };
                state.factors.insert(ch.clone(), f);
            }
            let mut prescribed: Vec<(usize, f64)> = problem
                .constraints
                .iter()
                .map(|c| {
                    let f = c.channel.as_ref().map_or(1.0, |ch| state.factors.get(ch).copied().unwrap_or(0.0));
                    (c.dof, c.value * f)
                })
                .collect();
            for &(dof, value) in &held {
                if !prescribed.iter().any(|&(d, _)| d == dof) {
                    prescribed.push((dof, value));
                }
            }
            let partition = DofPartition::new(problem.mesh.n_dofs(), &prescribed)?;
            let iterations = newton_solve(problem, state, &partition, cfg, &mut lu)?;
            state.step += 1;
            state.step_iterations.push(iterations);
            snapshots.push(Snapshot {
                step: state.step,
                stage: stage_index,
                stage_name: stage.name.clone(),
                factors: state.factors.clone(),
                iterations,
                u: state.u.clone(),
            });
        }
    }
    Ok(())
}
