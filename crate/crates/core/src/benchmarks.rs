//! Analytical oracles and ready-made cases for the standard wrinkling
//! benchmarks.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::case::{Case, Constraint, Dof, Hold, InitialShape, MaterialSpec, MeshSpec, ModelOverride, Reference, Stage};
use crate::constitutive::Model;
use crate::fem::{Load, NodeSelector, Region, Spring};
use crate::probes::{Probe, Reduction, StressQuantity};
use crate::solver::SolverConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchmarkError {
    #[error("moment ratio M/PH = {0} ≥ 1/2: fully wrinkled, outside the analytical range")]
    FullyWrinkled(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown benchmark '{0}'")]
    UnknownBenchmark(String),
}

/// Data of the pre-tensioned membrane under in-plane bending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinOracle {
    pub youngs_modulus: f64,
    pub height: f64,
    pub thickness: f64,
    pub sigma0: f64,
}

impl Default for SteinOracle {
    fn default() -> Self {
        Self { youngs_modulus: 100.0, height: 1.0, thickness: 0.01, sigma0: 5e-4 }
    }
}

impl SteinOracle {
    /// Axial load `P = σ₀ t H`.
    pub fn axial_load(&self) -> f64 {
        self.sigma0 * self.thickness * self.height
    }

    /// Moment for a given `2M/PH`.
    pub fn moment(&self, two_m_over_ph: f64) -> f64 {
        0.5 * two_m_over_ph * self.axial_load() * self.height
    }

    /// Curvature at which `2M/PH` is reached (inverse of the moment–curvature law).
    pub fn curvature(&self, two_m_over_ph: f64) -> Result<f64, BenchmarkError> {
        let r = two_m_over_ph;
        if !(0.0..1.0).contains(&r) {
            return Err(BenchmarkError::InvalidArgument(format!("2M/PH = {r} outside [0, 1)")));
        }
        let (e, h, t, p) = (self.youngs_modulus, self.height, self.thickness, self.axial_load());
        Ok(if r <= 1.0 / 3.0 {
            6.0 * p * r / (e * h * h * t)
        } else {
            let s = 1.5 * (1.0 - r);
            2.0 * p / (e * h * h * t * s * s)
        })
    }
}

/// Wrinkled band height `h/H`; 0 below `M/PH = 1/6`, `3M/PH − 1/2` above.
pub fn stein_band_height(m: f64, p: f64, h: f64) -> Result<f64, BenchmarkError> {
    if !(p > 0.0 && h > 0.0) || m < 0.0 {
        return Err(BenchmarkError::InvalidArgument("need M ≥ 0, P > 0, H > 0".into()));
    }
    let ratio = m / (p * h);
    if ratio >= 0.5 {
        return Err(BenchmarkError::FullyWrinkled(ratio));
    }
    Ok(if ratio < 1.0 / 6.0 { 0.0 } else { 3.0 * ratio - 0.5 })
}

/// Axial stress at height `y/H` for a band of height `h/H`.
pub fn stein_stress_profile(y_over_h: f64, band_over_h: f64, sigma0: f64) -> f64 {
    if y_over_h <= band_over_h {
        0.0
    } else {
        sigma0 * 2.0 * (y_over_h - band_over_h) / (1.0 - band_over_h).powi(2)
    }
}

/// `2M/PH` reached at curvature `κ`.
pub fn stein_moment_curvature(kappa: f64, e: f64, h: f64, t: f64, p: f64) -> Result<f64, BenchmarkError> {
    if kappa < 0.0 {
        return Err(BenchmarkError::InvalidArgument("curvature must be non-negative".into()));
    }
    let x = e * h * h * t * kappa / (2.0 * p);
    Ok(if x <= 1.0 { x / 3.0 } else { 1.0 - (2.0 / 3.0) * (1.0 / x).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Benchmark {
    Bending,
    Shear,
    Corner,
    Airbag,
    Blanket,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [Self::Bending, Self::Shear, Self::Corner, Self::Airbag, Self::Blanket];

    pub fn name(self) -> &'static str {
        match self {
            Self::Bending => "bending",
            Self::Shear => "shear",
            Self::Corner => "corner",
            Self::Airbag => "airbag",
            Self::Blanket => "blanket",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = BenchmarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| BenchmarkError::UnknownBenchmark(s.to_string()))
    }
}

/// Options shared by all builders; `None` selects the benchmark default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchOptions {
    pub model: Option<Model>,
    /// Element count per side (airbag quarter, corner, blanket) or a
    /// refinement multiplier of the default mesh (bending, shear).
    pub mesh: Option<usize>,
    /// Load ratio: `2M/PH` targets (bending) or `T1/T2` targets (corner).
    pub ratios: Option<Vec<f64>>,
    pub eta: Option<f64>,
    /// Steps per load stage.
    pub steps: Option<usize>,
    /// Airbag: stabiliser magnitude multiplier.
    pub stabilizer_scale: Option<f64>,
    /// Blanket: weight per unit reference area (N/m²).
    pub weight: Option<f64>,
    /// η values retried after a failed solve; defaults to [`ETA_FALLBACK`].
    pub eta_fallback: Option<Vec<f64>>,
}

/// Residual stiffness factors retried, in order, when a benchmark fails to
/// converge with the requested η.
pub const ETA_FALLBACK: [f64; 5] = [1e-4, 1e-3, 2e-3, 5e-3, 1e-2];

fn eta_fallback(opts: &BenchOptions) -> Vec<f64> {
    let eta = opts.eta.unwrap_or(0.0);
    opts.eta_fallback
        .clone()
        .unwrap_or_else(|| ETA_FALLBACK.to_vec())
        .into_iter()
        .filter(|&e| e > eta)
        .collect()
}

pub fn build_case(bench: Benchmark, opts: &BenchOptions) -> Result<Case, BenchmarkError> {
    if let Some(eta) = opts.eta {
        if !(0.0..=1.0).contains(&eta) {
            return Err(BenchmarkError::InvalidArgument(format!("eta = {eta} outside [0, 1]")));
        }
    }
    if let Some(e) = opts.eta_fallback.iter().flatten().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(BenchmarkError::InvalidArgument(format!("fallback eta = {e} outside [0, 1]")));
    }
    if opts.mesh == Some(0) || opts.steps == Some(0) {
        return Err(BenchmarkError::InvalidArgument("mesh and steps must be positive".into()));
    }
    match bench {
        Benchmark::Bending => bending(opts),
        Benchmark::Shear => shear(opts),
        Benchmark::Corner => corner(opts),
        Benchmark::Airbag => airbag(opts),
        Benchmark::Blanket => blanket(opts),
    }
}

fn fix(nodes: NodeSelector, dofs: &[Dof]) -> Constraint {
    Constraint { nodes, dofs: dofs.to_vec(), value: 0.0, channel: None }
}

fn stage(name: impl Into<String>, steps: usize, targets: &[(&str, f64)]) -> Stage {
    Stage {
        name: name.into(),
        steps,
        targets: targets.iter().map(|&(c, v)| (c.to_string(), v)).collect::<BTreeMap<_, _>>(),
        hold: Vec::new(),
    }
}

fn traction(edge: &str, value: [f64; 3], channel: &str) -> Load {
    Load::EdgeTraction {
        edge: edge.into(),
        value,
        d_dx: [0.0; 3],
        d_dy: [0.0; 3],
        region: None,
        channel: channel.into(),
    }
}

fn reference(probe: &str, stage: Option<&str>, value: f64, rel_tol: f64, source: &str) -> Reference {
    Reference {
        probe: probe.into(),
        stage: stage.map(Into::into),
        value,
        rel_tol,
        source: source.into(),
    }
}

/// Stage name used for a bending ratio.
pub fn bending_stage_name(ratio: f64) -> String {
    format!("2M/PH={ratio:.3}")
}

/// Heights at which the bending profile is sampled.
pub fn bending_sample_heights() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// Right half of a pre-tensioned strip in in-plane bending. Channel `pre`
/// carries the pretension and the axial load, channel `moment` the
/// equivalent linear bending traction scaled by `2M/PH`.
fn bending(opts: &BenchOptions) -> Result<Case, BenchmarkError> {
    let o = SteinOracle::default();
    let (lx, ly) = (1.0, o.height);
    let refine = opts.mesh.unwrap_or(1);
    let (nx, ny) = (11 * refine, 5 * refine);
    let ratios = opts.ratios.clone().unwrap_or_else(|| vec![0.4, 0.6, 0.8]);
    if ratios.iter().any(|r| !(0.0..1.0).contains(r)) || ratios.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BenchmarkError::InvalidArgument("ratios must increase within [0, 1)".into()));
    }
    let steps = opts.steps.unwrap_or(5);
    let ts = o.thickness * o.sigma0;

    let mut stages = vec![stage("pretension", 1, &[("pre", 1.0), ("moment", 0.0)])];
    for &r in &ratios {
        stages.push(stage(bending_stage_name(r), steps, &[("moment", r)]));
    }
    let mut probes: Vec<Probe> = bending_sample_heights()
        .into_iter()
        .map(|y| Probe::Stress {
            name: format!("sigma_x(y={y:.1})"),
            at: [0.0, y * ly],
            quantity: StressQuantity::CauchyXx,
            scale: 1.0,
        })
        .collect();
    probes.push(Probe::WrinkleBandTop { name: "band_height".into(), x: 0.0, height: ly });
    // rotation of the mid section over its distance from the symmetry
    // line, fitted on its taut part; the loaded end is disturbed by the
    // linear equivalent traction and the taut column
    probes.push(Probe::EdgeSlope {
        name: "curvature".into(),
        nodes: NodeSelector::set("midline_x"),
        component: Dof::X,
        along: Dof::Y,
        above_band_at: Some(0.0),
        scale: 2.0 / lx,
    });
    Ok(Case {
        name: "bending".into(),
        description: "Pre-tensioned membrane strip under in-plane bending (right half)".into(),
        units: "consistent, dimensionless".into(),
        material: MaterialSpec { youngs_modulus: o.youngs_modulus, poisson_ratio: 0.3, thickness: o.thickness },
        model: opts.model.unwrap_or(Model::Mixed),
        eta: opts.eta.unwrap_or(0.0),
        eta_fallback: eta_fallback(opts),
        mesh: MeshSpec::Rect { lx, ly, nx, ny, order: 2, origin: [0.0, 0.0] },
        model_overrides: vec![ModelOverride {
            region: Region { min: [lx - lx / 11.0, 0.0], max: [lx, ly] },
            model: Model::Svk,
        }],
        loads: vec![
            traction("top", [0.0, ts, 0.0], "pre"),
            traction("bottom", [0.0, -ts, 0.0], "pre"),
            traction("right", [ts, 0.0, 0.0], "pre"),
            Load::EdgeTraction {
                edge: "right".into(),
                value: [-3.0 * ts, 0.0, 0.0],
                d_dx: [0.0; 3],
                d_dy: [6.0 * ts / ly, 0.0, 0.0],
                region: None,
                channel: "moment".into(),
            },
        ],
        springs: Vec::new(),
        constraints: vec![
            fix(NodeSelector::set("left"), &[Dof::X]),
            fix(NodeSelector::At([0.0, 0.5 * ly]), &[Dof::Y]),
            fix(NodeSelector::set("all"), &[Dof::Z]),
        ],
        initial_shape: None,
        stages,
        solver: SolverConfig::default(),
        snapshots: Default::default(),
        probes,
        references: Vec::new(),
    })
}

/// Rectangular sheet sheared by its top edge after a small vertical
/// pretension; units mm, N, MPa. Channel `pre` scales the 0.05 mm
/// pretension, channel `shear` is the horizontal top displacement in mm.
fn shear(opts: &BenchOptions) -> Result<Case, BenchmarkError> {
    let (lx, ly) = (380.0, 128.0);
    let refine = opts.mesh.unwrap_or(1);
    let steps = opts.steps.unwrap_or(5);
    let line = |name: &str, quantity, reduction| Probe::Line {
        name: name.into(),
        from: [0.25 * lx, 0.5 * ly],
        to: [0.75 * lx, 0.5 * ly],
        samples: 41,
        quantity,
        reduction,
        scale: 1.0,
    };
    let model = opts.model.unwrap_or(Model::Mixed);
    let mut references = Vec::new();
    let paper = match model {
        Model::Mixed => Some((23.0, 43.0, 0.10)),
        Model::StrainSplit => Some((18.0, 33.0, 0.15)),
        _ => None,
    };
    if let Some((s16, s30, tol)) = paper {
        references.push(reference("sigma1_midline", Some("ux=1.6"), s16, tol, "reported midline σ1"));
        references.push(reference("sigma1_midline", Some("ux=3.0"), s30, tol, "reported midline σ1"));
    }
    Ok(Case {
        name: "shear".into(),
        description: "Rectangular membrane wrinkled by simple shear".into(),
        units: "mm, N, MPa".into(),
        material: MaterialSpec { youngs_modulus: 3500.0, poisson_ratio: 0.31, thickness: 0.025 },
        model,
        eta: opts.eta.unwrap_or(0.0),
        eta_fallback: eta_fallback(opts),
        mesh: MeshSpec::Rect { lx, ly, nx: 40 * refine, ny: 10 * refine, order: 2, origin: [0.0, 0.0] },
        model_overrides: Vec::new(),
        loads: Vec::new(),
        springs: Vec::new(),
        constraints: vec![
            fix(NodeSelector::set("bottom"), &[Dof::X, Dof::Y]),
            fix(NodeSelector::set("all"), &[Dof::Z]),
            Constraint { nodes: NodeSelector::set("top"), dofs: vec![Dof::Y], value: 0.05, channel: Some("pre".into()) },
            Constraint { nodes: NodeSelector::set("top"), dofs: vec![Dof::X], value: 1.0, channel: Some("shear".into()) },
        ],
        initial_shape: None,
        stages: vec![
            stage("pretension", 1, &[("pre", 1.0), ("shear", 0.0)]),
            stage("ux=1.6", steps, &[("shear", 1.6)]),
            stage("ux=3.0", steps, &[("shear", 3.0)]),
        ],
        solver: SolverConfig::default(),
        snapshots: Default::default(),
        probes: vec![
            line("sigma1_midline", StressQuantity::Cauchy1, Reduction::Mean),
            line("sigma2_midline_maxabs", StressQuantity::Cauchy2, Reduction::MaxAbs),
            Probe::Reaction {
                name: "shear_force".into(),
                nodes: NodeSelector::set("top"),
                component: Dof::X,
                scale: 1.0,
            },
        ],
        references,
    })
}

/// Stage name used for a corner load ratio.
pub fn corner_stage_name(ratio: f64) -> String {
    format!("T1/T2={ratio}")
}

/// Square membrane pulled at its corners along the diagonals, each load
/// spread over 25 mm of boundary next to the corner; units m, N, Pa.
/// Channel `t1` is T1 in N (bottom-left and top-right corners), `t2` is T2.
fn corner(opts: &BenchOptions) -> Result<Case, BenchmarkError> {
    let side = 0.5;
    let half = 0.5 * side;
    let n = opts.mesh.unwrap_or(40);
    let ratios = opts.ratios.clone().unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0]);
    if ratios.iter().any(|r| *r <= 0.0) {
        return Err(BenchmarkError::InvalidArgument("T1/T2 ratios must be positive".into()));
    }
    let t2 = 5.0;
    // half of the 25 mm width on each of the two edges meeting at a corner,
    // snapped to whole element edges so the resultant is exact
    let h = side / n as f64;
    let reach = h * (0.0125 / h).round().max(1.0);
    let width = 2.0 * reach;
    let mut loads = Vec::new();
    for (corner, channel) in [([-1.0, -1.0], "t1"), ([1.0, 1.0], "t1"), ([-1.0, 1.0], "t2"), ([1.0, -1.0], "t2")] {
        let c = [corner[0] * half, corner[1] * half];
        let dir = [corner[0] * FRAC_1_SQRT_2, corner[1] * FRAC_1_SQRT_2];
        let q = 1.0 / width;
        let value = [q * dir[0], q * dir[1], 0.0];
        let horizontal = if corner[1] < 0.0 { "bottom" } else { "top" };
        let vertical = if corner[0] < 0.0 { "left" } else { "right" };
        let near = Region {
            min: [c[0].min(c[0] - corner[0] * reach), c[1].min(c[1] - corner[1] * reach)],
            max: [c[0].max(c[0] - corner[0] * reach), c[1].max(c[1] - corner[1] * reach)],
        };
        for edge in [horizontal, vertical] {
            loads.push(Load::EdgeTraction {
                edge: edge.into(),
                value,
                d_dx: [0.0; 3],
                d_dy: [0.0; 3],
                region: Some(near),
                channel: channel.into(),
            });
        }
    }
    let steps = opts.steps.unwrap_or(4);
    let stages = ratios
        .iter()
        .enumerate()
        .map(|(k, &r)| stage(corner_stage_name(r), if k == 0 { 2 * steps } else { steps }, &[("t1", r * t2), ("t2", t2)]))
        .collect();
    Ok(Case {
        name: "corner".into(),
        description: "Square membrane wrinkled by diagonal corner loads".into(),
        units: "m, N, Pa".into(),
        material: MaterialSpec { youngs_modulus: 3.5e9, poisson_ratio: 0.31, thickness: 25e-6 },
        model: opts.model.unwrap_or(Model::Mixed),
        eta: opts.eta.unwrap_or(0.0),
        eta_fallback: eta_fallback(opts),
        mesh: MeshSpec::Rect { lx: side, ly: side, nx: n, ny: n, order: 3, origin: [-half, -half] },
        model_overrides: Vec::new(),
        loads,
        springs: Vec::new(),
        constraints: vec![
            fix(NodeSelector::At([0.0, 0.0]), &[Dof::X, Dof::Y]),
            fix(NodeSelector::At([0.0, half]), &[Dof::X]),
            fix(NodeSelector::set("all"), &[Dof::Z]),
        ],
        initial_shape: None,
        stages,
        solver: SolverConfig::default(),
        snapshots: Default::default(),
        probes: vec![
            Probe::WrinkledFraction {
                name: "wrinkled_fraction_t1_diagonal".into(),
                center: [0.0, 0.0],
                direction: [1.0, 1.0],
                half_width: 0.05,
                max_distance: half,
            },
            Probe::Stress {
                name: "sigma1_center".into(),
                at: [0.0, 0.0],
                quantity: StressQuantity::Cauchy1,
                scale: 1.0,
            },
        ],
        references: Vec::new(),
    })
}

/// Reported mixed-model airbag values `(w_M, r_A, u_B, σ_M)` per quarter mesh size.
pub fn airbag_reference(n: usize) -> Option<[f64; 4]> {
    match n {
        4 => Some([0.2145, 0.0971, 0.1201, 3.3]),
        5 => Some([0.2156, 0.0881, 0.1213, 3.6]),
        8 => Some([0.2162, 0.0737, 0.1225, 3.8]),
        10 => Some([0.2163, 0.0691, 0.1235, 3.8]),
        _ => None,
    }
}

/// Half diagonal of the square airbag (m).
pub const AIRBAG_HALF_DIAGONAL: f64 = 0.6;

/// Quarter of a square airbag inflated by follower pressure; units m, N, Pa.
/// `M` is the centre, `A` the corner and `B` the mid-side point. Stabilising
/// edge tractions (channel `stab`) pre-stretch the sheet with the normal
/// displacement held, stay on during inflation (channel `pressure`) and are
/// removed in the final stage.
fn airbag(opts: &BenchOptions) -> Result<Case, BenchmarkError> {
    let a = AIRBAG_HALF_DIAGONAL * FRAC_1_SQRT_2;
    let n = opts.mesh.unwrap_or(5);
    let steps = opts.steps.unwrap_or(20);
    let model = opts.model.unwrap_or(Model::Mixed);
    let stab = 1000.0 * opts.stabilizer_scale.unwrap_or(1.0);
    let mut prestretch = stage("prestretch", 1, &[("stab", 1.0), ("pressure", 0.0)]);
    prestretch.hold = vec![Hold { nodes: NodeSelector::set("all"), dofs: vec![Dof::Z] }];
    let mut references = Vec::new();
    if let (Model::Mixed, Some(r)) = (model, airbag_reference(n)) {
        let tol = [0.03, 0.03, 0.03, 0.10];
        for ((probe, value), tol) in ["w_M", "r_A", "u_B", "sigma_M"].iter().zip(r).zip(tol) {
            references.push(reference(probe, None, value, tol, "reported mixed-model airbag table"));
        }
    }
    Ok(Case {
        name: "airbag".into(),
        description: "Quarter of a square airbag inflated by follower pressure".into(),
        units: "m, N, Pa (stress probe in MPa)".into(),
        material: MaterialSpec { youngs_modulus: 588e6, poisson_ratio: 0.4, thickness: 0.0006 },
        model,
        eta: opts.eta.unwrap_or(0.0),
        eta_fallback: eta_fallback(opts),
        mesh: MeshSpec::Rect { lx: a, ly: a, nx: n, ny: n, order: 1, origin: [0.0, 0.0] },
        model_overrides: Vec::new(),
        loads: vec![
            Load::Pressure { value: 5000.0, channel: "pressure".into() },
            traction("right", [stab, 0.0, 0.0], "stab"),
            traction("top", [0.0, stab, 0.0], "stab"),
        ],
        springs: Vec::new(),
        constraints: vec![
            fix(NodeSelector::set("left"), &[Dof::X]),
            fix(NodeSelector::set("bottom"), &[Dof::Y]),
            fix(NodeSelector::set("right"), &[Dof::Z]),
            fix(NodeSelector::set("top"), &[Dof::Z]),
        ],
        initial_shape: None,
        stages: vec![
            prestretch,
            stage("inflate", steps, &[("pressure", 1.0)]),
            stage("release", steps.div_ceil(4).max(1), &[("stab", 0.0)]),
        ],
        solver: SolverConfig::default(),
        snapshots: Default::default(),
        probes: vec![
            Probe::Displacement { name: "w_M".into(), at: [0.0, 0.0], direction: [0.0, 0.0, 1.0], scale: 1.0 },
            Probe::Displacement {
                name: "r_A".into(),
                at: [a, a],
                direction: [-FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0],
                scale: 1.0,
            },
            Probe::Displacement { name: "u_B".into(), at: [a, 0.0], direction: [-1.0, 0.0, 0.0], scale: 1.0 },
            Probe::Stress { name: "sigma_M".into(), at: [0.0, 0.0], quantity: StressQuantity::Cauchy1, scale: 1e-6 },
        ],
        references,
    })
}

/// Reported blanket values `(u_z^M, u_x^A, u_x^B, σ_1^M)` for a model.
pub fn blanket_reference(model: Model) -> Option<[f64; 4]> {
    match model {
        Model::Mixed => Some([-0.2833, -0.03406, -0.01703, 623.95]),
        Model::StrainSplit => Some([-0.2956, -0.03290, -0.01645, 586.14]),
        Model::StressSplit => Some([-0.2887, -0.03365, -0.01683, 621.34]),
        Model::Svk => None,
    }
}

/// Default blanket weight per unit area (N/m²): 144 kg/m³ × 1.77 mm × g.
pub const BLANKET_WEIGHT: f64 = 144.0 * 1.77e-3 * 9.81;

/// In-plane corner spring stiffness of the blanket (N/m).
pub const BLANKET_SPRING: f64 = 22.95;
/// Centre sag of the curved starting shape; the flat state has no
/// transverse stiffness.
pub const BLANKET_INITIAL_SAG: f64 = 0.05;

/// Square blanket hanging from its corners under self-weight; units m, N, Pa.
/// Corners are held vertically and supported in-plane by springs. `M` is
/// the centre, `A` the bottom-left corner, `B` midway between them.
fn blanket(opts: &BenchOptions) -> Result<Case, BenchmarkError> {
    let side = 1.0;
    let half = 0.5 * side;
    let n = opts.mesh.unwrap_or(25);
    let steps = opts.steps.unwrap_or(10);
    let model = opts.model.unwrap_or(Model::Mixed);
    let weight = opts.weight.unwrap_or(BLANKET_WEIGHT);
    let mut references = Vec::new();
    if let Some(r) = blanket_reference(model) {
        for (probe, value) in ["u_z^M", "u_x^A", "u_x^B"].iter().zip(r) {
            references.push(reference(probe, None, value, 0.02, "reported blanket table"));
        }
    }
    Ok(Case {
        name: "blanket".into(),
        description: "Square blanket hanging from its corners under self-weight".into(),
        units: "m, N, Pa".into(),
        material: MaterialSpec { youngs_modulus: 30000.0, poisson_ratio: 0.3, thickness: 1.77e-3 },
        model,
        eta: opts.eta.unwrap_or(0.0),
        eta_fallback: eta_fallback(opts),
        mesh: MeshSpec::Rect { lx: side, ly: side, nx: n, ny: n, order: 2, origin: [-half, -half] },
        model_overrides: Vec::new(),
        loads: vec![Load::BodyForce { value: [0.0, 0.0, -weight], channel: "gravity".into() }],
        springs: vec![Spring { nodes: NodeSelector::set("corners"), stiffness: [BLANKET_SPRING, BLANKET_SPRING, 0.0] }],
        constraints: vec![fix(NodeSelector::set("corners"), &[Dof::Z])],
        initial_shape: Some(InitialShape::CornerSag { amplitude: [0.0, 0.0, -BLANKET_INITIAL_SAG] }),
        stages: vec![stage("gravity", steps, &[("gravity", 1.0)])],
        solver: SolverConfig::default(),
        snapshots: Default::default(),
        probes: vec![
            Probe::Displacement { name: "u_z^M".into(), at: [0.0, 0.0], direction: [0.0, 0.0, 1.0], scale: 1.0 },
            Probe::Displacement { name: "u_x^A".into(), at: [-half, -half], direction: [-1.0, 0.0, 0.0], scale: 1.0 },
            Probe::Displacement {
                name: "u_x^B".into(),
                at: [-0.5 * half, -0.5 * half],
                direction: [-1.0, 0.0, 0.0],
                scale: 1.0,
            },
            Probe::Stress { name: "sigma_1^M".into(), at: [0.0, 0.0], quantity: StressQuantity::Cauchy1, scale: 1.0 },
        ],
        references,
    })
}
