//! Property checks shared by the integration tests and the acceptance harness.
//!
//! Every check returns the measured worst-case error so that callers can
//! either assert on it or print it.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wrinkle_fem::constitutive::{
    classify, evaluate, svk_base, tangent_fd_check, Criterion, Material, MembraneState, Model,
};
use wrinkle_fem::fem::assembly::internal_force;
use wrinkle_fem::fem::{
    build_rect_mesh, compute_kinematics, internal_force_and_tangent, recover_fields, Load, Mesh,
    NodeSelector, ReferenceElement, TangentMode,
};
use wrinkle_fem::solver::{run_schedule, DofConstraint, Problem, SolverConfig, StageSpec};
use wrinkle_fem::tensor2d::{rotate_to_principal, spectral_decompose, SymTensor2, DEFAULT_TOL_EIG};

pub const POISSON_RATIOS: [f64; 3] = [0.0, 0.3, 0.49];
pub const FD_STEP: f64 = 1e-6;

pub const TOL_ENERGY: f64 = 1e-12;
pub const TOL_TAUT: f64 = 1e-13;
pub const TOL_UNIAXIAL: f64 = 1e-13;
pub const TOL_TRACE_LAW: f64 = 1e-12;
pub const TOL_TANGENT_FD: f64 = 1e-5;
pub const TOL_SYMMETRY: f64 = 1e-12;
pub const TOL_CONJUGACY: f64 = 1e-12;
pub const TOL_FRAME: f64 = 1e-12;
pub const TOL_PATCH: f64 = 1e-10;

/// Distance (in strain) from every gating switch and eigenvalue
/// coincidence required for a point to count as interior.
pub const INTERIOR_MARGIN: f64 = 1e-3;

// ---------------------------------------------------------------------------
// constitutive suite
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Clone)]
pub struct ConstitutiveReport {
    pub samples: usize,
    /// max |ψ⁺ + ηψ⁻ − ½ S̃:E| / max(|ψ⁺ + ηψ⁻|, ½‖S̃‖‖E‖); the second term
    /// is the round-off scale of the contraction itself
    pub energy: f64,
    pub taut_samples: usize,
    /// max relative deviation of (ψ, S̃, ℂ̃) from SVK over all-taut samples
    pub taut: f64,
    pub uniaxial_samples: usize,
    /// max (|S'22|, |S'12|) / |S'11| over wrinkled mixed and stress-split samples
    pub uniaxial: f64,
    pub trace_samples: usize,
    /// max relative error of the strain-split trace law
    pub trace_law: f64,
    /// FD tangent error per (model, state)
    pub tangent: BTreeMap<(String, String), (usize, f64)>,
    /// max ‖C − Cᵀ‖/‖C‖ over mixed and strain-split samples
    pub symmetric: f64,
    /// wrinkled stress-split samples at ν = 0.3 with ‖C − Cᵀ‖ > 1e-8 ‖C‖
    pub stress_split_asymmetric_nu03: usize,
    /// max ‖C − Cᵀ‖/‖C‖ of the stress-split model at ν = 0
    pub stress_split_nu0: f64,
}

impl ConstitutiveReport {
    pub fn tangent_max(&self) -> f64 {
        self.tangent.values().fold(0.0, |m, (_, e)| m.max(*e))
    }

    /// Every model is FD-checked in each of its states.
    pub fn tangent_coverage_complete(&self) -> bool {
        let states = ["taut", "wrinkled", "slack"];
        [Model::Mixed, Model::StressSplit, Model::StrainSplit]
            .iter()
            .all(|m| states.iter().all(|s| self.tangent.get(&(m.to_string(), s.to_string())).is_some_and(|(n, _)| *n > 0)))
            && self.tangent.keys().any(|(m, _)| m == "svk")
    }

    pub fn energy_ok(&self) -> bool {
        self.energy <= TOL_ENERGY
    }
    pub fn taut_ok(&self) -> bool {
        self.taut_samples > 0 && self.taut <= TOL_TAUT
    }
    pub fn uniaxial_ok(&self) -> bool {
        self.uniaxial_samples > 0 && self.uniaxial <= TOL_UNIAXIAL
    }
    pub fn trace_law_ok(&self) -> bool {
        self.trace_samples > 0 && self.trace_law <= TOL_TRACE_LAW
    }
    pub fn tangent_ok(&self) -> bool {
        self.tangent_coverage_complete() && self.tangent_max() < TOL_TANGENT_FD
    }
    pub fn symmetry_ok(&self) -> bool {
        self.symmetric <= TOL_SYMMETRY && self.stress_split_asymmetric_nu03 > 0 && self.stress_split_nu0 <= TOL_SYMMETRY
    }
}

/// Strain with principal values `e1`, `e2` and first principal axis at `angle`.
pub fn strain_from_principal(e1: f64, e2: f64, angle: f64) -> SymTensor2 {
    let (s, c) = angle.sin_cos();
    e1 * SymTensor2::dyad([c, s]) + e2 * SymTensor2::dyad([-s, c])
}

fn state_name(s: MembraneState) -> &'static str {
    match s {
        MembraneState::Taut => "taut",
        MembraneState::Wrinkled => "wrinkled",
        MembraneState::Slack => "slack",
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

fn interior(e1: f64, e2: f64, nu: f64) -> bool {
    [e1, e2, e1 + nu * e2, e2 + nu * e1, e1 + e2, e1 - e2].iter().all(|v| v.abs() >= INTERIOR_MARGIN)
}

/// Run the constitutive property suite over `per_nu` random strains for
/// each Poisson ratio in [`POISSON_RATIOS`].
pub fn constitutive_suite(per_nu: usize, seed: u64) -> ConstitutiveReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = ConstitutiveReport::default();
    let youngs = 1000.0;
    for nu in POISSON_RATIOS {
        let base = Material::new(youngs, nu, 1.0, 0.0).unwrap();
        let damped = Material { eta: 0.05, ..base };
        for _ in 0..per_nu {
            let e1: f64 = rng.random_range(-0.1..0.1);
            let e2: f64 = rng.random_range(-0.1..0.1);
            let (e1, e2) = if e1 >= e2 { (e1, e2) } else { (e2, e1) };
            let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let strain = strain_from_principal(e1, e2, angle);
            r.samples += 1;

            // energy consistency at η = 0 and η > 0
            for mat in [&base, &damped] {
                for model in Model::ALL {
                    let p = evaluate(model, &strain, mat).unwrap();
                    let psi = p.energy(mat.eta);
                    let half_work = 0.5 * p.stress.ddot(&strain);
                    let scale = psi.abs().max(0.5 * p.stress.norm() * strain.norm());
                    if scale > 0.0 {
                        r.energy = r.energy.max((psi - half_work).abs() / scale);
                    }
                }
            }

            // taut-state agreement
            let all_taut = [Criterion::Stress, Criterion::Strain, Criterion::Mixed]
                .iter()
                .all(|&c| classify(&strain, &base, c) == MembraneState::Taut);
            if all_taut {
                r.taut_samples += 1;
                let (psi, s, c) = svk_base(&strain, &base);
                for model in [Model::Mixed, Model::StressSplit, Model::StrainSplit] {
                    let p = evaluate(model, &strain, &base).unwrap();
                    r.taut = r
                        .taut
                        .max(rel(p.energy(0.0), psi))
                        .max((p.stress - s).norm() / s.norm())
                        .max((p.tangent - c).norm() / c.norm());
                }
            }

            let sp = spectral_decompose(&strain, DEFAULT_TOL_EIG).unwrap();

            // uniaxial tension in wrinkled states
            for model in [Model::Mixed, Model::StressSplit] {
                let p = evaluate(model, &strain, &base).unwrap();
                if p.state == MembraneState::Wrinkled {
                    r.uniaxial_samples += 1;
                    let sr = rotate_to_principal(&p.stress, &sp);
                    r.uniaxial = r.uniaxial.max(sr.a22.abs().max(sr.a12.abs()) / sr.a11.abs());
                }
            }

            // strain-split trace law
            let p = evaluate(Model::StrainSplit, &strain, &base).unwrap();
            if p.state == MembraneState::Wrinkled {
                r.trace_samples += 1;
                let tr = strain.trace();
                let expected = if tr > 0.0 { youngs * nu / (1.0 - nu * nu) * tr } else { 0.0 };
                let got = p.stress.ddot(&sp.m2);
                let scale = expected.abs().max(p.stress.norm());
                r.trace_law = r.trace_law.max((got - expected).abs() / scale);
            }

            // finite-difference tangents at interior points
            if interior(e1, e2, nu) {
                for model in Model::ALL {
                    let p = evaluate(model, &strain, &base).unwrap();
                    if let Ok(err) = tangent_fd_check(model, &strain, &base, FD_STEP) {
                        let key = (model.to_string(), state_name(p.state).to_string());
                        let entry = r.tangent.entry(key).or_insert((0, 0.0));
                        entry.0 += 1;
                        entry.1 = entry.1.max(err);
                    }
                }
            }

            // tangent symmetry
            for model in [Model::Mixed, Model::StrainSplit] {
                let c = evaluate(model, &strain, &base).unwrap().tangent;
                if c.norm() > 0.0 {
                    r.symmetric = r.symmetric.max(c.asymmetry() / c.norm());
                }
            }
            let p = evaluate(Model::StressSplit, &strain, &base).unwrap();
            let c = p.tangent;
            if c.norm() > 0.0 {
                let a = c.asymmetry() / c.norm();
                if nu == 0.0 {
                    r.stress_split_nu0 = r.stress_split_nu0.max(a);
                } else if nu == 0.3 && p.state == MembraneState::Wrinkled && a > 1e-8 {
                    r.stress_split_asymmetric_nu03 += 1;
                }
            }
        }
    }
    r
}

// ---------------------------------------------------------------------------
// FEM properties
// ---------------------------------------------------------------------------

pub fn material(nu: f64) -> Material {
    Material::new(100.0, nu, 0.01, 0.0).unwrap()
}

/// Smooth, non-homogeneous deformation: stretch in x, mild shear, out-of-plane bulge.
/// Negative `stretch_y` compresses laterally and wrinkles the sheet.
pub fn deformed_state(mesh: &Mesh, stretch_y: f64) -> Vec<f64> {
    mesh.nodes
        .iter()
        .flat_map(|x| {
            [
                0.04 * x[0] + 0.01 * x[1] * x[0],
                stretch_y * x[1] + 0.005 * x[0] * x[0],
                0.02 * (x[0] * 1.3).sin() * (x[1] * 0.7).cos(),
            ]
        })
        .collect()
}

/// Max entrywise |K − FD(F_int)| relative to max |K|.
pub fn fd_tangent_error(mesh: &Mesh, u: &[f64], mat: &Material, model: Model) -> f64 {
    let models = vec![model; mesh.elements.len()];
    let (_, k) = internal_force_and_tangent(mesh, u, mat, &models, TangentMode::Consistent).unwrap();
    let k = k.to_dense();
    let h = 1e-7;
    let scale = k.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut max_err: f64 = 0.0;
    for col in 0..u.len() {
        let mut up = u.to_vec();
        let mut um = u.to_vec();
        up[col] += h;
        um[col] -= h;
        let fp = internal_force(mesh, &up, mat, &models).unwrap();
        let fm = internal_force(mesh, &um, mat, &models).unwrap();
        for row in 0..u.len() {
            let fd = (fp[row] - fm[row]) / (2.0 * h);
            max_err = max_err.max((fd - k[row][col]).abs());
        }
    }
    max_err / scale
}

/// Worst FD tangent error over every model in a taut and a wrinkled state.
pub fn stiffness_fd_error() -> f64 {
    let mesh = build_rect_mesh(1.0, 0.8, 2, 1, 2, [0.0; 2]).unwrap();
    let mut worst: f64 = 0.0;
    for stretch in [0.02, -0.03] {
        let u = deformed_state(&mesh, stretch);
        for model in Model::ALL {
            worst = worst.max(fd_tangent_error(&mesh, &u, &material(0.3), model));
        }
    }
    worst
}

/// `|F_int·δu − ∫ S̃:δE t dA|`, relative, for one quadratic element.
pub fn work_conjugacy_error(direction: &[f64], stretch: f64, model: Model) -> f64 {
    let mesh = build_rect_mesh(1.0, 0.8, 1, 1, 2, [0.0; 2]).unwrap();
    let mat = material(0.3);
    let u = deformed_state(&mesh, stretch);
    let du: Vec<f64> = direction.iter().map(|v| 1e-3 * v).collect();
    let f = internal_force(&mesh, &u, &mat, &[model]).unwrap();
    let work: f64 = f.iter().zip(&du).map(|(a, b)| a * b).sum();

    // δE is exactly the unit-step central difference since E is quadratic in u
    let re = ReferenceElement::new(mesh.order);
    let up: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + b).collect();
    let um: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a - b).collect();
    let k0 = compute_kinematics(&mesh, &re, 0, &u).unwrap();
    let kp = compute_kinematics(&mesh, &re, 0, &up).unwrap();
    let km = compute_kinematics(&mesh, &re, 0, &um).unwrap();
    let mut direct = 0.0;
    for q in 0..k0.len() {
        let s = evaluate(model, &k0[q].strain, &mat).unwrap().stress;
        let de = 0.5 * (kp[q].strain - km[q].strain);
        direct += s.ddot(&de) * mat.thickness * k0[q].area_weight;
    }
    let scale = (f.iter().map(|v| v.abs()).sum::<f64>() * 1e-3).max(direct.abs());
    (work - direct).abs() / scale
}

pub fn rotation(a: f64, b: f64, c: f64) -> [[f64; 3]; 3] {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let (sc, cc) = c.sin_cos();
    let rz = [[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]];
    let ry = [[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]];
    let rx = [[1.0, 0.0, 0.0], [0.0, cc, -sc], [0.0, sc, cc]];
    let mul = |p: [[f64; 3]; 3], q: [[f64; 3]; 3]| {
        let mut r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = (0..3).map(|k| p[i][k] * q[k][j]).sum();
            }
        }
        r
    };
    mul(rz, mul(ry, rx))
}

pub fn apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|k| r[i][k] * v[k]).sum())
}

/// Rotate reference and current configuration by the Euler angles
/// `(a, b, c)`. Returns the worst relative change of the nodal forces
/// (rotated back) and of the recovered principal Cauchy stresses, and
/// whether every point kept its state.
pub fn frame_invariance_error(a: f64, b: f64, c: f64, stretch: f64, model: Model) -> (f64, bool) {
    let mesh = build_rect_mesh(1.0, 0.8, 2, 1, 2, [0.0; 2]).unwrap();
    let mat = material(0.3);
    let u = deformed_state(&mesh, stretch);
    let models = vec![model; 2];
    let r = rotation(a, b, c);

    let mut rotated = mesh.clone();
    let mut ur = vec![0.0; u.len()];
    for (n, x) in mesh.nodes.iter().enumerate() {
        rotated.nodes[n] = apply(&r, *x);
        let d = apply(&r, [u[3 * n], u[3 * n + 1], u[3 * n + 2]]);
        ur[3 * n..3 * n + 3].copy_from_slice(&d);
    }
    let f = internal_force(&mesh, &u, &mat, &models).unwrap();
    let fr = internal_force(&rotated, &ur, &mat, &models).unwrap();
    let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst: f64 = 0.0;
    for n in 0..mesh.n_nodes() {
        let expect = apply(&r, [f[3 * n], f[3 * n + 1], f[3 * n + 2]]);
        for d in 0..3 {
            worst = worst.max((expect[d] - fr[3 * n + d]).abs() / fmax);
        }
    }
    let p = recover_fields(&mesh, &u, &mat, &models).unwrap();
    let pr = recover_fields(&rotated, &ur, &mat, &models).unwrap();
    let mut same_state = true;
    for (x, y) in p.iter().flatten().zip(pr.iter().flatten()) {
        let s = x.cauchy_principal[0].abs().max(f64::MIN_POSITIVE);
        worst = worst
            .max((x.cauchy_principal[0] - y.cauchy_principal[0]).abs() / s)
            .max((x.cauchy_principal[1] - y.cauchy_principal[1]).abs() / s);
        same_state &= x.state == y.state;
    }
    (worst, same_state)
}

pub fn fix(mesh: &Mesh, set: &str, dof: usize) -> Vec<DofConstraint> {
    NodeSelector::set(set)
        .resolve(mesh)
        .unwrap()
        .into_iter()
        .map(|n| DofConstraint { dof: 3 * n + dof, value: 0.0, channel: None })
        .collect()
}

pub fn edge_traction(edge: &str, value: [f64; 3]) -> Load {
    Load::EdgeTraction {
        edge: edge.into(),
        value,
        d_dx: [0.0; 3],
        d_dy: [0.0; 3],
        region: None,
        channel: "load".into(),
    }
}

/// Flat 2×1 strip under uniform dead traction `q` (force per reference
/// length) on the right edge, symmetric supports on the left and bottom.
pub fn strip(nx: usize, ny: usize, order: usize, q: f64, model: Model) -> Problem {
    let mesh = build_rect_mesh(2.0, 1.0, nx, ny, order, [0.0; 2]).unwrap();
    let mut constraints = fix(&mesh, "left", 0);
    constraints.extend(fix(&mesh, "bottom", 1));
    constraints.extend(fix(&mesh, "all", 2));
    Problem {
        models: vec![model; mesh.elements.len()],
        material: Material::new(100.0, 0.3, 0.01, 0.0).unwrap(),
        loads: vec![edge_traction("right", [q, 0.0, 0.0])],
        springs: vec![],
        constraints,
        initial_u: None,
        mesh,
    }
}

pub fn ramp(steps: usize) -> Vec<StageSpec> {
    vec![StageSpec {
        name: "load".into(),
        steps,
        targets: BTreeMap::from([("load".to_string(), 1.0)]),
        hold: vec![],
    }]
}

/// Homogeneous biaxial SVK state under dead loads: `λ_i S_i = q_i / t`.
pub fn biaxial_stretch(q_over_t: [f64; 2], mat: &Material) -> [f64; 2] {
    let c = mat.plane_stress_modulus();
    let nu = mat.poisson_ratio;
    let mut l = [1.0, 1.0];
    for _ in 0..100 {
        let e = [0.5 * (l[0] * l[0] - 1.0), 0.5 * (l[1] * l[1] - 1.0)];
        let s = [c * (e[0] + nu * e[1]), c * (e[1] + nu * e[0])];
        let r = [l[0] * s[0] - q_over_t[0], l[1] * s[1] - q_over_t[1]];
        let j = [
            [s[0] + l[0] * c * l[0], l[0] * c * nu * l[1]],
            [l[1] * c * nu * l[0], s[1] + l[1] * c * l[1]],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        l[0] -= (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        l[1] -= (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
    }
    l
}

/// Worst nodal deviation from the homogeneous biaxial solution over
/// single-element and 2×2 patches of every order and model. `None` if a
/// solve failed.
pub fn patch_test_error() -> Option<f64> {
    let (qx, qy) = (0.05, 0.03);
    let mut worst: f64 = 0.0;
    for (nx, ny, order) in [(1, 1, 1), (1, 1, 2), (2, 2, 1), (2, 2, 2), (2, 2, 3)] {
        for model in Model::ALL {
            let mut problem = strip(nx, ny, order, qx, model);
            problem.loads.push(edge_traction("top", [0.0, qy, 0.0]));
            let out = run_schedule(&problem, &ramp(2), &SolverConfig::default());
            if out.error.is_some() {
                return None;
            }
            let l = biaxial_stretch([qx / 0.01, qy / 0.01], &problem.material);
            for (n, x) in problem.mesh.nodes.iter().enumerate() {
                worst = worst
                    .max((out.state.u[3 * n] - (l[0] - 1.0) * x[0]).abs())
                    .max((out.state.u[3 * n + 1] - (l[1] - 1.0) * x[1]).abs())
                    .max(out.state.u[3 * n + 2].abs());
            }
        }
    }
    Some(worst)
}

/// Residual ratios of a taut single-step solve driven to round-off, and
/// whether the last two ratios above the round-off floor satisfy
/// `r_{k+1} ≤ 10 r_k²`.
pub fn quadratic_convergence() -> (Vec<f64>, bool) {
    let problem = strip(3, 2, 2, 0.5, Model::Mixed);
    let cfg = SolverConfig { tol_rel: 1e-13, ..Default::default() };
    let out = run_schedule(&problem, &ramp(1), &cfg);
    let ratios: Vec<f64> = out.state.history.iter().map(|r| r.ratio).collect();
    let meaningful: Vec<f64> = ratios.iter().copied().filter(|&r| r > 1e-11).collect();
    let n = meaningful.len();
    let ok = out.error.is_none() && n >= 2 && meaningful[n - 1] <= 10.0 * meaningful[n - 2] * meaningful[n - 2];
    (ratios, ok)
}
