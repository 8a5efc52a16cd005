//! Result bundles: CSV tables, legacy VTK snapshots, run metadata and the
//! reference report.
//!
//! All numbers are written with 17 significant digits (`{:.16e}`), so every
//! value round-trips exactly and identical runs produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::case::{Case, SnapshotPolicy};
use crate::fem::kinematics::ReferenceElement;
use crate::fem::{recover_fields, FemError, Mesh, PointFields};
use crate::run::{ProbeValue, ReferenceCheck, RunOutcome};
use crate::solver::{IterationRecord, Snapshot};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("field recovery failed: {0}")]
    Fem(#[from] FemError),
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(io_err(path))
}

/// `{:.16e}`: 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub const PROBES_HEADER: &str = "probe,step,stage,value";
pub const CONVERGENCE_HEADER: &str = "step,iteration,residual_norm,external_norm,ratio";
pub const REFERENCES_HEADER: &str = "probe,stage,expected,measured,rel_error,rel_tol,pass,source";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Split one CSV line, honouring double-quoted fields.
pub fn csv_split(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out
}

pub fn probes_csv(values: &[ProbeValue]) -> String {
    let mut s = format!("{PROBES_HEADER}\n");
    for v in values {
        let _ = writeln!(s, "{},{},{},{}", csv_field(&v.probe), v.step, csv_field(&v.stage), fmt_num(v.value));
    }
    s
}

pub fn convergence_csv(history: &[IterationRecord]) -> String {
    let mut s = format!("{CONVERGENCE_HEADER}\n");
    for h in history {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            h.step,
            h.iteration,
            fmt_num(h.residual_norm),
            fmt_num(h.external_norm),
            fmt_num(h.ratio)
        );
    }
    s
}

pub fn references_csv(checks: &[ReferenceCheck]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(String::new, fmt_num);
    let mut s = format!("{REFERENCES_HEADER}\n");
    for c in checks {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            csv_field(&c.probe),
            csv_field(&c.stage),
            fmt_num(c.expected),
            opt(c.measured),
            opt(c.rel_error),
            fmt_num(c.rel_tol),
            c.pass,
            csv_field(&c.source)
        );
    }
    s
}

/// Quadrature-point fields extrapolated to the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalFields {
    pub sigma1: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// Averaged state code (taut 0, wrinkled 1, slack 2).
    pub state: Vec<f64>,
    /// Unit wrinkle direction scaled by the local wrinkled fraction.
    pub wrinkle_direction: Vec<[f64; 3]>,
}

/// Least-squares map from quadrature-point values to element nodal values.
fn extrapolation_matrix(order: usize) -> Vec<Vec<f64>> {
    let reference = ReferenceElement::new(order);
    let nq = reference.points.len();
    let nen = (order + 1) * (order + 1);
    let a = Mat::from_fn(nq, nen, |q, k| reference.shapes[q].n[k]);
    let identity = Mat::<f64>::identity(nq, nq);
    let x = a.qr().solve_lstsq(&identity);
    (0..nen).map(|k| (0..nq).map(|q| x[(k, q)]).collect()).collect()
}

/// Per-element least-squares extrapolation of QP values, averaged over the
/// elements sharing each node. The wrinkle direction goes through the
/// sign-free dyad `w ⊗ w`, whose dominant eigenvector is reported.
pub fn nodal_fields(mesh: &Mesh, fields: &[Vec<PointFields>]) -> NodalFields {
    let p = extrapolation_matrix(mesh.order);
    let n = mesh.n_nodes();
    // sigma1, sigma2, state, dyad xx, yy, zz, xy, xz, yz
    let mut acc = vec![[0.0; 9]; n];
    let mut count = vec![0usize; n];
    for (conn, qps) in mesh.elements.iter().zip(fields) {
        let values: Vec<[f64; 9]> = qps
            .iter()
            .map(|f| {
                let w = f.wrinkle_direction;
                let on = if f.state == crate::constitutive::MembraneState::Wrinkled { 1.0 } else { 0.0 };
                [
                    f.cauchy_principal[0],
                    f.cauchy_principal[1],
                    f64::from(f.state.code()),
                    on * w[0] * w[0],
                    on * w[1] * w[1],
                    on * w[2] * w[2],
                    on * w[0] * w[1],
                    on * w[0] * w[2],
                    on * w[1] * w[2],
                ]
            })
            .collect();
        for (k, &node) in conn.iter().enumerate() {
            for (q, v) in values.iter().enumerate() {
                for c in 0..9 {
                    acc[node][c] += p[k][q] * v[c];
                }
            }
            count[node] += 1;
        }
    }
    let mut out = NodalFields {
        sigma1: Vec::with_capacity(n),
        sigma2: Vec::with_capacity(n),
        state: Vec::with_capacity(n),
        wrinkle_direction: Vec::with_capacity(n),
    };
    for (a, &c) in acc.iter().zip(&count) {
        let inv = if c > 0 { 1.0 / c as f64 } else { 0.0 };
        let v: Vec<f64> = a.iter().map(|x| x * inv).collect();
        out.sigma1.push(v[0]);
        out.sigma2.push(v[1]);
        out.state.push(v[2]);
        out.wrinkle_direction.push(dominant_direction([[v[3], v[6], v[7]], [v[6], v[4], v[8]], [v[7], v[8], v[5]]]));
    }
    out
}

/// Dominant eigenvector of a symmetric positive semidefinite 3×3 matrix,
/// scaled by its eigenvalue; the sign makes the largest component positive.
fn dominant_direction(m: [[f64; 3]; 3]) -> [f64; 3] {
    if m[0][0] + m[1][1] + m[2][2] <= 1e-12 {
        return [0.0; 3];
    }
    let a = Mat::from_fn(3, 3, |i, j| m[i][j]);
    let Ok(eig) = a.self_adjoint_eigen(faer::Side::Lower) else {
        return [0.0; 3];
    };
    // eigenvalues ascend
    let lambda = eig.S()[2];
    let v: [f64; 3] = std::array::from_fn(|i| eig.U()[(i, 2)]);
    let lead = (0..3).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
    v.map(|x| sign * lambda * x)
}

/// Linear sub-quads of every element, so cells use only mesh nodes.
fn sub_quads(mesh: &Mesh) -> Vec<[usize; 4]> {
    let p = mesh.order;
    let mut cells = Vec::with_capacity(mesh.elements.len() * p * p);
    for conn in &mesh.elements {
        for b in 0..p {
            for a in 0..p {
                let id = |i: usize, j: usize| conn[j * (p + 1) + i];
                cells.push([id(a, b), id(a + 1, b), id(a + 1, b + 1), id(a, b + 1)]);
            }
        }
    }
    cells
}

/// Legacy ASCII unstructured grid of the reference mesh with displacement
/// and the extrapolated fields as point data.
pub fn vtk_string(mesh: &Mesh, u: &[f64], nodal: &NodalFields, title: &str) -> String {
    let n = mesh.n_nodes();
    let cells = sub_quads(mesh);
    let mut s = String::new();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {n} double");
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {} {}", fmt_num(p[0]), fmt_num(p[1]), fmt_num(p[2]));
    }
    let _ = writeln!(s, "CELLS {} {}", cells.len(), 5 * cells.len());
    for c in &cells {
        let _ = writeln!(s, "4 {} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for _ in &cells {
        s.push_str("9\n");
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    let vector = |s: &mut String, name: &str, v: &mut dyn Iterator<Item = [f64; 3]>| {
        let _ = writeln!(s, "VECTORS {name} double");
        for x in v {
            let _ = writeln!(s, "{} {} {}", fmt_num(x[0]), fmt_num(x[1]), fmt_num(x[2]));
        }
    };
    let scalar = |s: &mut String, name: &str, v: &[f64]| {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for x in v {
            let _ = writeln!(s, "{}", fmt_num(*x));
        }
    };
    vector(&mut s, "displacement", &mut (0..n).map(|i| [u[3 * i], u[3 * i + 1], u[3 * i + 2]]));
    scalar(&mut s, "sigma1", &nodal.sigma1);
    scalar(&mut s, "sigma2", &nodal.sigma2);
    scalar(&mut s, "state", &nodal.state);
    vector(&mut s, "wrinkle_direction", &mut nodal.wrinkle_direction.iter().copied());
    s
}

/// Recover fields for `u` and write a VTK snapshot to `path`.
pub fn write_vtk(
    path: &Path,
    mesh: &Mesh,
    u: &[f64],
    material: &crate::constitutive::Material,
    models: &[crate::constitutive::Model],
    title: &str,
) -> Result<(), IoError> {
    let fields = recover_fields(mesh, u, material, models)?;
    let nodal = nodal_fields(mesh, &fields);
    write_file(path, &vtk_string(mesh, u, &nodal, title))
}

/// Number of points declared in a legacy VTK file.
pub fn vtk_point_count(text: &str) -> Option<usize> {
    text.lines()
        .find_map(|l| l.strip_prefix("POINTS "))
        .and_then(|rest| rest.split_whitespace().next())
        .and_then(|n| n.parse().ok())
}

/// Run description stored next to the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub case: String,
    pub case_hash: String,
    pub model: String,
    pub eta_requested: f64,
    pub eta_used: f64,
    pub failed_attempts: Vec<FailedAttempt>,
    pub mesh: MeshSummary,
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_iter: usize,
    pub cauchy_recovery: String,
    pub units: String,
    pub converged: bool,
    pub error: Option<String>,
    pub steps_completed: usize,
    pub step_iterations: Vec<usize>,
    pub snapshots: Vec<String>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedAttempt {
    pub eta: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSummary {
    pub nodes: usize,
    pub elements: usize,
    pub order: usize,
    pub dofs: usize,
}

pub const CAUCHY_RECOVERY: &str =
    "sigma = F S F^T / det F with F the in-plane deformation gradient; thickness change neglected";

fn snapshot_selected(case: &Case, snap: &Snapshot, last_step: usize) -> bool {
    match case.snapshots {
        SnapshotPolicy::All => true,
        SnapshotPolicy::None => false,
        SnapshotPolicy::Final => snap.step == last_step,
        SnapshotPolicy::Stages => {
            crate::run::stage_final_step(case, &snap.stage_name) == Some(snap.step) || snap.step == last_step
        }
    }
}

/// Files written for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Write `case.json`, `metadata.json`, `probes.csv`, `convergence.csv`,
/// `references.csv` and the selected `fields_step_k.vtk` snapshots.
pub fn write_bundle(outcome: &RunOutcome, dir: &Path) -> Result<Bundle, IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let case = &outcome.case;
    let problem = &outcome.resolved.problem;
    let mut files = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<(), IoError> {
        let path = dir.join(name);
        write_file(&path, text)?;
        files.push(path);
        Ok(())
    };
    put("case.json", &(case.to_json() + "\n"))?;
    put("probes.csv", &probes_csv(&outcome.probes))?;
    put("convergence.csv", &convergence_csv(&outcome.schedule.state.history))?;
    put("references.csv", &references_csv(&outcome.reference_checks()))?;

    let last_step = outcome.schedule.snapshots.last().map_or(0, |s| s.step);
    let mut snapshots = Vec::new();
    for snap in outcome.schedule.snapshots.iter().filter(|s| snapshot_selected(case, s, last_step)) {
        let name = format!("fields_step_{}.vtk", snap.step);
        let path = dir.join(&name);
        let title = format!("{} step {} ({})", case.name, snap.step, snap.stage_name);
        write_vtk(&path, &problem.mesh, &snap.u, &problem.material, &problem.models, &title)?;
        files.push(path);
        snapshots.push(name);
    }

    let meta = RunMetadata {
        case: case.name.clone(),
        case_hash: case.hash(),
        model: case.model.to_string(),
        eta_requested: case.eta,
        eta_used: outcome.eta,
        failed_attempts: outcome
            .failed_attempts
            .iter()
            .map(|(eta, error)| FailedAttempt { eta: *eta, error: error.clone() })
            .collect(),
        mesh: MeshSummary {
            nodes: problem.mesh.n_nodes(),
            elements: problem.mesh.elements.len(),
            order: problem.mesh.order,
            dofs: problem.mesh.n_dofs(),
        },
        tol_rel: case.solver.tol_rel,
        tol_abs: case.solver.tol_abs,
        max_iter: case.solver.max_iter,
        cauchy_recovery: CAUCHY_RECOVERY.into(),
        units: case.units.clone(),
        converged: outcome.converged(),
        error: outcome.error().map(|e| e.to_string()),
        steps_completed: outcome.schedule.state.step,
        step_iterations: outcome.schedule.state.step_iterations.clone(),
        snapshots,
        version: env!("CARGO_PKG_VERSION").into(),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|source| IoError::Json { path: dir.join("metadata.json"), source })?;
    let path = dir.join("metadata.json");
    write_file(&path, &(text + "\n"))?;
    files.push(path);
    Ok(Bundle { dir: dir.to_path_buf(), files })
}

/// One row of the acceptance report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub case: String,
    pub model: String,
    pub probe: String,
    pub stage: String,
    pub expected: f64,
    pub measured: Option<f64>,
    pub rel_error: Option<f64>,
    pub rel_tol: f64,
    pub pass: bool,
}

fn read_bundle_rows(dir: &Path) -> Result<Vec<ReportRow>, IoError> {
    let meta_path = dir.join("metadata.json");
    let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
    let meta: RunMetadata =
        serde_json::from_str(&text).map_err(|source| IoError::Json { path: meta_path.clone(), source })?;
    let ref_path = dir.join("references.csv");
    let text = fs::read_to_string(&ref_path).map_err(io_err(&ref_path))?;
    let mut rows = Vec::new();
    for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
        let f = csv_split(line);
        if f.len() != 8 {
            return Err(IoError::Malformed { path: ref_path.clone(), message: format!("expected 8 columns: {line}") });
        }
        let num = |s: &str| -> Result<Option<f64>, IoError> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| IoError::Malformed {
                path: ref_path.clone(),
                message: format!("bad number '{s}'"),
            })
        };
        rows.push(ReportRow {
            case: meta.case.clone(),
            model: meta.model.clone(),
            probe: f[0].clone(),
            stage: f[1].clone(),
            expected: num(&f[2])?.unwrap_or(f64::NAN),
            measured: num(&f[3])?,
            rel_error: num(&f[4])?,
            rel_tol: num(&f[5])?.unwrap_or(f64::NAN),
            pass: f[6] == "true",
        });
    }
    Ok(rows)
}

/// Collect reference rows from `root` and every directory below it that
/// holds a result bundle, in sorted path order.
pub fn collect_report(root: &Path) -> Result<Vec<ReportRow>, IoError> {
    let mut dirs = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        if d.join("metadata.json").is_file() {
            dirs.push(d.clone());
        }
        let entries = fs::read_dir(&d).map_err(io_err(&d))?;
        for e in entries {
            let e = e.map_err(io_err(&d))?;
            if e.path().is_dir() {
                stack.push(e.path());
            }
        }
    }
    dirs.sort();
    let mut rows = Vec::new();
    for d in dirs {
        rows.extend(read_bundle_rows(&d)?);
    }
    Ok(rows)
}

/// Plain-text table of report rows.
pub fn format_report(rows: &[ReportRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:<8} {:<30} {:<14} {:>13} {:>13} {:>9} {:>7}  result",
        "case", "model", "probe", "stage", "expected", "measured", "error", "tol"
    );
    for r in rows {
        let measured = r.measured.map_or_else(|| "-".to_string(), |m| format!("{m:.5e}"));
        let err = r.rel_error.map_or_else(|| "-".to_string(), |e| format!("{:.2}%", 100.0 * e));
        let _ = writeln!(
            s,
            "{:<10} {:<8} {:<30} {:<14} {:>13.5e} {:>13} {:>9} {:>6.1}%  {}",
            r.case,
            r.model,
            r.probe,
            r.stage,
            r.expected,
            measured,
            err,
            100.0 * r.rel_tol,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = writeln!(s, "{passed}/{} reference checks passed", rows.len());
    s
}
