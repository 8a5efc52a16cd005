//! Plane-stress St. Venant–Kirchhoff law and the three spectral wrinkling models.
//!
//! Each model splits the elastic energy into a tensile part `ψ⁺` and a
//! compressive part `ψ⁻` and keeps `ψ⁺ + η ψ⁻`. The stress and the consistent
//! tangent follow by exact differentiation, so the response is path
//! independent and no state history is carried between evaluations.
//!
//! * [`Model::StressSplit`] gates on the principal stresses.
//! * [`Model::Mixed`] is the stress split with a gated Poisson ratio
//!   `ν* = H⁺(E2 + ν E1) ν`, which reproduces the mixed wrinkling criterion.
//! * [`Model::StrainSplit`] gates on the principal strains and on `tr E`.
//!
//! Heaviside convention: `H⁺(x) = 1` for `x > 0`, otherwise 0, and
//! `H⁻ = 1 − H⁺`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor2d::{
    projector_products, spectral_decompose, Spectral2, SymTensor2, Tangent4, TensorError,
    DEFAULT_TOL_EIG,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstitutiveError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("untestable point: {0}")]
    UntestablePoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
    /// Residual compressive stiffness factor.
    pub eta: f64,
}

impl Material {
    pub fn new(
        youngs_modulus: f64,
        poisson_ratio: f64,
        thickness: f64,
        eta: f64,
    ) -> Result<Self, ConstitutiveError> {
        let m = Self {
            youngs_modulus,
            poisson_ratio,
            thickness,
            eta,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        let bad = |msg: &str| Err(ConstitutiveError::InvalidMaterial(msg.to_string()));
        if !(self.youngs_modulus > 0.0) || !self.youngs_modulus.is_finite() {
            return bad("Young's modulus must be positive");
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return bad("Poisson ratio must lie in [0, 0.5)");
        }
        if !(self.thickness > 0.0) || !self.thickness.is_finite() {
            return bad("thickness must be positive");
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return bad("eta must lie in [0, 1]");
        }
        Ok(())
    }

    /// Lamé parameters `(λ, μ)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        (
            e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            e / (2.0 * (1.0 + nu)),
        )
    }

    /// `E / (1 − ν²)`
    pub fn plane_stress_modulus(&self) -> f64 {
        self.youngs_modulus / (1.0 - self.poisson_ratio * self.poisson_ratio)
    }

    /// Isotropic plane-stress tangent.
    pub fn isotropic_tangent(&self) -> Tangent4 {
        isotropic_tangent(self.youngs_modulus, self.poisson_ratio)
    }

    /// Trial principal stresses `S_a = E/(1−ν²) (E_a + ν E_b)`.
    pub fn trial_principal_stresses(&self, e1: f64, e2: f64) -> [f64; 2] {
        let c = self.plane_stress_modulus();
        let nu = self.poisson_ratio;
        [c * (e1 + nu * e2), c * (e2 + nu * e1)]
    }
}

fn isotropic_tangent(young: f64, nu: f64) -> Tangent4 {
    let c = young / (1.0 - nu * nu);
    Tangent4::new([
        [c, c * nu, 0.0],
        [c * nu, c, 0.0],
        [0.0, 0.0, 0.5 * c * (1.0 - nu)],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembraneState {
    Taut,
    Wrinkled,
    Slack,
}

impl MembraneState {
    /// Integer code used in field output: taut 0, wrinkled 1, slack 2.
    pub fn code(self) -> u8 {
        match self {
            Self::Taut => 0,
            Self::Wrinkled => 1,
            Self::Slack => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Stress,
    Strain,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Plain plane-stress St. Venant–Kirchhoff, no wrinkling.
    #[serde(rename = "svk")]
    Svk,
    #[serde(rename = "stress")]
    StressSplit,
    #[serde(rename = "strain")]
    StrainSplit,
    #[serde(rename = "mixed")]
    Mixed,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Svk, Model::StressSplit, Model::StrainSplit, Model::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Self::Svk => "svk",
            Self::StressSplit => "stress",
            Self::StrainSplit => "strain",
            Self::Mixed => "mixed",
        }
    }

    /// Whether the model can produce a tangent without major symmetry.
    pub fn may_be_unsymmetric(self) -> bool {
        self == Self::StressSplit
    }
}

impl std::str::FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model '{s}' (expected svk, stress, strain or mixed)"))
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Output of a constitutive evaluation at one material point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResponse {
    pub psi_plus: f64,
    pub psi_minus: f64,
    /// Modified PK2 stress `S⁺ + η S⁻`.
    pub stress: SymTensor2,
    /// Modified tangent `C⁺ + η C⁻`.
    pub tangent: Tangent4,
    pub state: MembraneState,
    /// Gated Poisson ratio, mixed model only.
    pub nu_star: Option<f64>,
}

impl PointResponse {
    /// Modified energy density `ψ⁺ + η ψ⁻`.
    pub fn energy(&self, eta: f64) -> f64 {
        self.psi_plus + eta * self.psi_minus
    }
}

fn heaviside(x: f64) -> bool {
    x > 0.0
}

/// Plane-stress SVK energy, stress and tangent.
pub fn svk_base(strain: &SymTensor2, mat: &Material) -> (f64, SymTensor2, Tangent4) {
    let (lambda, mu) = mat.lame();
    let tr = strain.trace();
    let psi = 0.5 * lambda * tr * tr + mu * strain.ddot(strain)
        - lambda * lambda / (2.0 * (lambda + 2.0 * mu)) * tr * tr;
    let tangent = mat.isotropic_tangent();
    (psi, tangent.apply(strain), tangent)
}

/// Classify the membrane state from the elastic trial state.
pub fn classify(strain: &SymTensor2, mat: &Material, criterion: Criterion) -> MembraneState {
    match spectral_decompose(strain, DEFAULT_TOL_EIG) {
        Ok(sp) => classify_spectral(&sp, mat, criterion),
        Err(_) => MembraneState::Slack,
    }
}

fn classify_spectral(sp: &Spectral2, mat: &Material, criterion: Criterion) -> MembraneState {
    let [s1, s2] = mat.trial_principal_stresses(sp.e1, sp.e2);
    let (taut, slack) = match criterion {
        Criterion::Stress => (s2 > 0.0, s1 <= 0.0),
        Criterion::Strain => (sp.e2 > 0.0, sp.e1 <= 0.0),
        Criterion::Mixed => (s2 > 0.0, sp.e1 <= 0.0),
    };
    if taut {
        MembraneState::Taut
    } else if slack {
        MembraneState::Slack
    } else {
        MembraneState::Wrinkled
    }
}

/// Sum of gated `s_a dM_a/dE` terms as a multiple of `G_12 + G_21`.
///
/// With equal gates the sum collapses to `(s1 − s2) / (2 (e1 − e2))`, where
/// `slope = (s1 − s2) / (e1 − e2)` is known in closed form; this stays exact
/// at coincident eigenvalues. With one active gate the single term is bounded
/// because the active value never exceeds the eigenvalue gap times `slope`.
fn projector_rate_factor(sp: &Spectral2, s: [f64; 2], gates: [bool; 2], slope: f64) -> f64 {
    match gates {
        [true, true] => 0.5 * slope,
        [false, false] => 0.0,
        _ => {
            let gap = sp.e1 - sp.e2;
            if gap == 0.0 {
                0.0
            } else if gates[0] {
                s[0] / (2.0 * gap)
            } else {
                -s[1] / (2.0 * gap)
            }
        }
    }
}

/// Positive/negative parts of the principal-stress split with Poisson ratio `nu`.
///
/// Returns `(ψ, S, C)` for each sign.
fn principal_stress_split(
    sp: &Spectral2,
    young: f64,
    nu: f64,
) -> [(f64, SymTensor2, Tangent4); 2] {
    let c = young / (1.0 - nu * nu);
    let e = [sp.e1, sp.e2];
    let s = [c * (e[0] + nu * e[1]), c * (e[1] + nu * e[0])];
    let p = projector_products(sp);
    let q_own = [p.q11, p.q22];
    let q_cross = [p.q12, p.q21];
    let m = [sp.m1, sp.m2];
    let slope = c * (1.0 - nu);

    let part = |positive: bool| {
        let gates = [heaviside(s[0]) == positive, heaviside(s[1]) == positive];
        let mut psi = 0.0;
        let mut stress = SymTensor2::zero();
        let mut tangent = Tangent4::zero();
        for a in 0..2 {
            if gates[a] {
                psi += 0.5 * s[a] * e[a];
                stress += s[a] * m[a];
                tangent += c * (q_own[a] + nu * q_cross[a]);
            }
        }
        tangent += projector_rate_factor(sp, s, gates, slope) * p.g_sym;
        (psi, stress, tangent)
    };
    [part(true), part(false)]
}

fn combine(
    parts: [(f64, SymTensor2, Tangent4); 2],
    eta: f64,
    state: MembraneState,
    nu_star: Option<f64>,
) -> PointResponse {
    let [(psi_p, s_p, c_p), (psi_m, s_m, c_m)] = parts;
    PointResponse {
        psi_plus: psi_p,
        psi_minus: psi_m,
        stress: s_p + eta * s_m,
        tangent: c_p + eta * c_m,
        state,
        nu_star,
    }
}

fn decompose(strain: &SymTensor2) -> Result<Spectral2, ConstitutiveError> {
    Ok(spectral_decompose(strain, DEFAULT_TOL_EIG)?)
}

/// Principal-stress split, gated by the stress criterion.
pub fn stress_split_model(
    strain: &SymTensor2,
    mat: &Material,
) -> Result<PointResponse, ConstitutiveError> {
    let sp = decompose(strain)?;
    let parts = principal_stress_split(&sp, mat.youngs_modulus, mat.poisson_ratio);
    let state = classify_spectral(&sp, mat, Criterion::Stress);
    Ok(combine(parts, mat.eta, state, None))
}

/// Mixed-criterion model: the stress split evaluated with `ν*`.
pub fn mixed_model(strain: &SymTensor2, mat: &Material) -> Result<PointResponse, ConstitutiveError> {
    let sp = decompose(strain)?;
    let nu = mat.poisson_ratio;
    let nu_star = if heaviside(sp.e2 + nu * sp.e1) { nu } else { 0.0 };
    let parts = principal_stress_split(&sp, mat.youngs_modulus, nu_star);
    let state = classify_spectral(&sp, mat, Criterion::Mixed);
    Ok(combine(parts, mat.eta, state, Some(nu_star)))
}

/// Principal-strain split with the volumetric part gated on `tr E`.
pub fn strain_split_model(
    strain: &SymTensor2,
    mat: &Material,
) -> Result<PointResponse, ConstitutiveError> {
    let sp = decompose(strain)?;
    let (lambda, mu) = mat.lame();
    let nu = mat.poisson_ratio;
    let c = mat.plane_stress_modulus();
    let e = [sp.e1, sp.e2];
    let tr = sp.e1 + sp.e2;
    let p = projector_products(&sp);
    let q_own = [p.q11, p.q22];
    let m = [sp.m1, sp.m2];
    // Σ_a (Q_aa + Q_ab) = I ⊗ I, and the e_a (dM_a + dM_b) terms cancel
    // because dM_1/dE = −dM_2/dE.
    let ixi = Tangent4::dyad(&SymTensor2::identity(), &SymTensor2::identity());
    let lambda_ps = lambda * lambda / (2.0 * (lambda + 2.0 * mu));

    let part = |positive: bool| {
        let gates = [heaviside(e[0]) == positive, heaviside(e[1]) == positive];
        let tr_on = heaviside(tr) == positive;
        let tr_part = if tr_on { tr } else { 0.0 };

        let mut e_part_sq = 0.0;
        let mut stress = SymTensor2::zero();
        let mut tangent = Tangent4::zero();
        for a in 0..2 {
            if gates[a] {
                e_part_sq += e[a] * e[a];
                stress += (c * (1.0 - nu) * e[a]) * m[a];
                tangent += (c * (1.0 - nu)) * q_own[a];
            }
        }
        let rate = projector_rate_factor(&sp, e, gates, 1.0);
        tangent += (c * (1.0 - nu) * rate) * p.g_sym;
        if tr_on {
            stress += (c * nu * tr) * SymTensor2::identity();
            tangent += (c * nu) * ixi;
        }
        let psi = 0.5 * lambda * tr_part * tr_part + mu * e_part_sq - lambda_ps * tr_part * tr_part;
        (psi, stress, tangent)
    };
    let state = classify_spectral(&sp, mat, Criterion::Strain);
    Ok(combine([part(true), part(false)], mat.eta, state, None))
}

/// Evaluate `model` at `strain`.
pub fn evaluate(
    model: Model,
    strain: &SymTensor2,
    mat: &Material,
) -> Result<PointResponse, ConstitutiveError> {
    match model {
        Model::Svk => {
            if !strain.is_finite() {
                return Err(TensorError::NonFinite.into());
            }
            let (psi, stress, tangent) = svk_base(strain, mat);
            Ok(PointResponse {
                psi_plus: psi,
                psi_minus: 0.0,
                stress,
                tangent,
                state: classify(strain, mat, Criterion::Mixed),
                nu_star: None,
            })
        }
        Model::StressSplit => stress_split_model(strain, mat),
        Model::StrainSplit => strain_split_model(strain, mat),
        Model::Mixed => mixed_model(strain, mat),
    }
}

/// Largest entrywise deviation between the returned tangent and a central
/// difference of the stress, relative to the largest tangent entry.
///
/// Points closer than `10·step` to a gating switch or to coincident
/// eigenvalues are rejected for the wrinkling models.
pub fn tangent_fd_check(
    model: Model,
    strain: &SymTensor2,
    mat: &Material,
    step: f64,
) -> Result<f64, ConstitutiveError> {
    if model != Model::Svk {
        let sp = decompose(strain)?;
        let nu = mat.poisson_ratio;
        let margin = 10.0 * step;
        let indicators = [
            ("e1", sp.e1),
            ("e2", sp.e2),
            ("e1 + nu e2", sp.e1 + nu * sp.e2),
            ("e2 + nu e1", sp.e2 + nu * sp.e1),
            ("tr E", sp.e1 + sp.e2),
            ("e1 - e2", sp.e1 - sp.e2),
        ];
        if let Some((name, v)) = indicators.iter().find(|(_, v)| v.abs() < margin) {
            return Err(ConstitutiveError::UntestablePoint(format!(
                "{name} = {v:e} is within {margin:e} of a switch"
            )));
        }
    }
    let reference = evaluate(model, strain, mat)?.tangent;
    let base = strain.to_voigt_strain();
    let mut fd = Tangent4::zero();
    for j in 0..3 {
        let mut plus = base;
        let mut minus = base;
        plus[j] += step;
        minus[j] -= step;
        let sp = evaluate(model, &SymTensor2::from_voigt_strain(plus), mat)?.stress;
        let sm = evaluate(model, &SymTensor2::from_voigt_strain(minus), mat)?.stress;
        let col = (sp - sm).to_voigt_stress();
        for i in 0..3 {
            fd.c[i][j] = col[i] / (2.0 * step);
        }
    }
    let scale = reference.max_abs().max(f64::MIN_POSITIVE);
    Ok((fd - reference).max_abs() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor2d::{eigenprojector_derivative, rotate_to_principal};

    fn mat(nu: f64) -> Material {
        Material::new(1.0, nu, 1.0, 0.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn svk_zero_strain() {
        let m = mat(0.3);
        let (psi, s, c) = svk_base(&SymTensor2::zero(), &m);
        assert_eq!(psi, 0.0);
        assert_eq!(s, SymTensor2::zero());
        assert_eq!(c, m.isotropic_tangent());
    }

    #[test]
    fn svk_without_poisson_is_hooke() {
        let m = Material::new(7.0, 0.0, 1.0, 0.0).unwrap();
        let e = SymTensor2::new(0.01, -0.02, 0.003);
        let (_, s, _) = svk_base(&e, &m);
        assert!(close(s.a11, 0.07, 1e-16) && close(s.a22, -0.14, 1e-16) && close(s.a12, 0.021, 1e-16));
    }

    #[test]
    fn svk_principal_stresses() {
        let (psi, s, _) = svk_base(&SymTensor2::diag(0.01, 0.005), &mat(0.3));
        assert!(close(s.a11, 0.0126374, 1e-7));
        assert!(close(s.a22, 0.0087912, 1e-7));
        assert!(close(psi, 0.5 * s.ddot(&SymTensor2::diag(0.01, 0.005)), 1e-16));
    }

    #[test]
    fn classification_examples() {
        let m = mat(0.3);
        let e = SymTensor2::diag(0.01, -0.002);
        assert_eq!(classify(&e, &m, Criterion::Strain), MembraneState::Wrinkled);
        assert_eq!(classify(&e, &m, Criterion::Stress), MembraneState::Taut);
        assert_eq!(classify(&e, &m, Criterion::Mixed), MembraneState::Taut);

        let e = SymTensor2::diag(0.001, -0.02);
        assert_eq!(classify(&e, &m, Criterion::Stress), MembraneState::Slack);
        assert_eq!(classify(&e, &m, Criterion::Strain), MembraneState::Wrinkled);
        assert_eq!(classify(&e, &m, Criterion::Mixed), MembraneState::Wrinkled);

        let e = SymTensor2::diag(-0.01, -0.02);
        for c in [Criterion::Stress, Criterion::Strain, Criterion::Mixed] {
            assert_eq!(classify(&e, &m, c), MembraneState::Slack);
        }
        assert_eq!(classify(&SymTensor2::zero(), &m, Criterion::Mixed), MembraneState::Slack);
    }

    #[test]
    fn stress_split_wrinkled_value() {
        let e = SymTensor2::diag(0.01, -0.004);
        let r = stress_split_model(&e, &mat(0.3)).unwrap();
        assert_eq!(r.state, MembraneState::Wrinkled);
        let sp = spectral_decompose(&e, 1e-9).unwrap();
        let rot = rotate_to_principal(&r.stress, &sp);
        // S1 = E/(1−ν²)(E1 + ν E2) = 0.0088 / 0.91
        assert!(close(rot.a11, 0.0088 / 0.91, 1e-15));
        assert!(close(rot.a11, 0.0096703, 1e-7));
        assert_eq!((rot.a22, rot.a12), (0.0, 0.0));
    }

    #[test]
    fn stress_split_symmetry_depends_on_poisson() {
        let e = SymTensor2::new(0.01, -0.004, 0.002);
        let r = stress_split_model(&e, &mat(0.3)).unwrap();
        assert_eq!(r.state, MembraneState::Wrinkled);
        assert!(!r.tangent.has_major_symmetry(1e-12));
        let r = stress_split_model(&e, &mat(0.0)).unwrap();
        assert!(r.tangent.has_major_symmetry(1e-12));
    }

    #[test]
    fn mixed_examples() {
        let m = mat(0.3);
        let e = SymTensor2::diag(0.01, -0.004);
        let r = mixed_model(&e, &m).unwrap();
        assert_eq!(r.nu_star, Some(0.0));
        assert_eq!(r.state, MembraneState::Wrinkled);
        assert!(close(r.stress.a11, 0.01, 1e-17));
        let sp = spectral_decompose(&e, 1e-9).unwrap();
        assert_eq!(r.stress.ddot(&sp.m2), 0.0);

        let e = SymTensor2::diag(0.01, 0.005);
        let r = mixed_model(&e, &m).unwrap();
        let (psi, s, c) = svk_base(&e, &m);
        assert_eq!(r.nu_star, Some(0.3));
        assert!((r.stress - s).norm() < 1e-16);
        assert!((r.tangent - c).max_abs() < 1e-15);
        assert!(close(r.psi_plus, psi, 1e-18));

        let r = mixed_model(&SymTensor2::diag(-0.01, -0.02), &m).unwrap();
        assert_eq!(r.stress, SymTensor2::zero());
        assert_eq!(r.psi_plus, 0.0);
        assert_eq!(r.state, MembraneState::Slack);
    }

    #[test]
    fn strain_split_trace_examples() {
        let m = mat(0.3);
        let e = SymTensor2::diag(0.02, -0.005);
        let r = strain_split_model(&e, &m).unwrap();
        let sp = spectral_decompose(&e, 1e-9).unwrap();
        assert!(close(r.stress.ddot(&sp.m2), 0.3 / 0.91 * 0.015, 1e-15));
        assert!(close(r.stress.ddot(&sp.m2), 0.0049451, 1e-7));

        let e = SymTensor2::diag(0.01, -0.02);
        let r = strain_split_model(&e, &m).unwrap();
        assert_eq!(r.stress.ddot(&sp.m2), 0.0);
    }

    #[test]
    fn strain_split_energy_sums_to_svk() {
        let m = Material::new(3.0, 0.3, 1.0, 1.0).unwrap();
        let e = SymTensor2::new(0.013, -0.021, 0.008);
        let r = strain_split_model(&e, &m).unwrap();
        let (psi, s, c) = svk_base(&e, &m);
        assert!(close(r.psi_plus + r.psi_minus, psi, 1e-15));
        assert!((r.stress - s).norm() < 1e-15);
        assert!((r.tangent - c).max_abs() < 1e-14);
    }

    /// The tangent written term by term, including the projector-derivative
    /// pieces of the volumetric block that cancel in closed form.
    #[test]
    fn strain_split_tangent_matches_term_by_term_formula() {
        let m = mat(0.3);
        for e in [
            SymTensor2::new(0.02, -0.005, 0.004),
            SymTensor2::new(0.01, -0.02, -0.003),
            SymTensor2::new(0.01, 0.02, 0.001),
        ] {
            let sp = spectral_decompose(&e, 1e-9).unwrap();
            let p = projector_products(&sp);
            let (d1, d2) = eigenprojector_derivative(&sp).unwrap();
            let (ea, q_own, q_cross, dm) = (
                [sp.e1, sp.e2],
                [p.q11, p.q22],
                [p.q12, p.q21],
                [d1, d2],
            );
            let c = m.plane_stress_modulus();
            let nu = m.poisson_ratio;
            let mut t = Tangent4::zero();
            for a in 0..2 {
                let b = 1 - a;
                if ea[a] > 0.0 {
                    t += (c * (1.0 - nu)) * (q_own[a] + ea[a] * dm[a]);
                }
                if sp.e1 + sp.e2 > 0.0 {
                    t += (c * nu) * (q_own[a] + ea[a] * dm[a] + ea[a] * dm[b] + q_cross[a]);
                }
            }
            let r = strain_split_model(&e, &m).unwrap();
            assert!((r.tangent - t).max_abs() < 1e-12 * t.max_abs());
        }
    }

    #[test]
    fn tangents_match_finite_differences() {
        let m = mat(0.3);
        let cases = [
            (Model::Svk, SymTensor2::new(0.01, -0.03, 0.002)),
            (Model::Mixed, SymTensor2::new(0.01, -0.004, 0.002)),
            (Model::Mixed, SymTensor2::new(0.01, 0.006, 0.002)),
            (Model::StressSplit, SymTensor2::new(0.01, 0.006, 0.002)),
            (Model::StressSplit, SymTensor2::new(0.01, -0.004, 0.002)),
            (Model::StrainSplit, SymTensor2::new(0.02, -0.005, 0.003)),
            (Model::StrainSplit, SymTensor2::new(0.01, -0.02, 0.003)),
        ];
        for (model, e) in cases {
            let err = tangent_fd_check(model, &e, &m, 1e-6).unwrap();
            assert!(err < 1e-5, "{model}: {err}");
        }
    }

    #[test]
    fn fd_check_rejects_points_near_switches() {
        let e = SymTensor2::diag(0.01, -0.003 + 1e-7);
        assert!(matches!(
            tangent_fd_check(Model::Mixed, &e, &mat(0.3), 1e-6),
            Err(ConstitutiveError::UntestablePoint(_))
        ));
    }

    #[test]
    fn degenerate_strain_gives_isotropic_tangent() {
        let m = mat(0.3);
        let e = SymTensor2::diag(0.01, 0.01);
        for model in [Model::StressSplit, Model::Mixed, Model::StrainSplit] {
            let r = evaluate(model, &e, &m).unwrap();
            assert!((r.tangent - m.isotropic_tangent()).max_abs() < 1e-15, "{model}");
        }
        let slack = Material { eta: 0.1, ..m };
        let r = evaluate(Model::StressSplit, &SymTensor2::diag(-0.01, -0.01), &slack).unwrap();
        assert!((r.tangent - 0.1 * m.isotropic_tangent()).max_abs() < 1e-15);
        // ν* = 0 in compression, so the mixed model decouples
        let r = evaluate(Model::Mixed, &SymTensor2::diag(-0.01, -0.01), &slack).unwrap();
        assert!((r.tangent - 0.1 * isotropic_tangent(1.0, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_strain() {
        let e = SymTensor2::new(f64::INFINITY, 0.0, 0.0);
        for model in Model::ALL {
            assert!(evaluate(model, &e, &mat(0.3)).is_err());
        }
    }

    #[test]
    fn material_validation() {
        assert!(Material::new(0.0, 0.3, 1.0, 0.0).is_err());
        assert!(Material::new(1.0, 0.5, 1.0, 0.0).is_err());
        assert!(Material::new(1.0, 0.3, -1.0, 0.0).is_err());
        assert!(Material::new(1.0, 0.3, 1.0, 2.0).is_err());
        let (l, mu) = Material::new(1.0, 0.25, 1.0, 0.0).unwrap().lame();
        assert!(close(l, 0.4, 1e-15) && close(mu, 0.4, 1e-15));
    }

    #[test]
    fn model_names_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
        }
        assert!("nope".parse::<Model>().is_err());
    }
}
