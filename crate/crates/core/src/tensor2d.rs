//! Symmetric 2×2 tensor algebra.
//!
//! Everything the constitutive layer needs lives here: spectral decomposition
//! with eigenprojectors, the fourth-order dyads `Q_ab = M_a ⊗ M_b`, the
//! symmetrised product `G_12 + G_21` and the eigenprojector derivatives.
//!
//! Voigt convention: strain vectors are `(E11, E22, 2 E12)`, stress vectors are
//! `(S11, S22, S12)`, and a [`Tangent4`] maps one to the other, `S = C · E`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative threshold below which two eigenvalues are treated as equal.
pub const DEFAULT_TOL_EIG: f64 = 1e-9;

/// Full fourth-order plane tensor, indexed `[i][j][k][l]`.
pub type Tensor4 = [[[[f64; 2]; 2]; 2]; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("non-finite tensor component")]
    NonFinite,
    #[error("eigenvalue tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("coincident eigenvalues ({e1} vs {e2}): eigenprojector derivative is singular")]
    CoincidentEigenvalues { e1: f64, e2: f64 },
}

/// Symmetric tensor in an orthonormal 2D frame. `a12` is the tensorial
/// off-diagonal component (not the engineering shear).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor2 {
    pub a11: f64,
    pub a22: f64,
    pub a12: f64,
}

impl SymTensor2 {
    pub const fn new(a11: f64, a22: f64, a12: f64) -> Self {
        Self { a11, a22, a12 }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 1.0, 0.0)
    }

    pub const fn diag(a11: f64, a22: f64) -> Self {
        Self::new(a11, a22, 0.0)
    }

    /// Projector `n ⊗ n`.
    pub fn dyad(n: [f64; 2]) -> Self {
        Self::new(n[0] * n[0], n[1] * n[1], n[0] * n[1])
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// Double contraction `A : B`.
    pub fn ddot(&self, other: &Self) -> f64 {
        self.a11 * other.a11 + self.a22 * other.a22 + 2.0 * self.a12 * other.a12
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a22.is_finite() && self.a12.is_finite()
    }

    /// `A · v`
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a12 * v[0] + self.a22 * v[1],
        ]
    }

    /// `u · A v`
    pub fn quad_form(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        let av = self.apply(v);
        u[0] * av[0] + u[1] * av[1]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.a11,
            (1, 1) => self.a22,
            _ => self.a12,
        }
    }

    pub fn to_matrix(&self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a12, self.a22]]
    }

    /// Engineering strain vector `(E11, E22, 2 E12)`.
    pub fn to_voigt_strain(&self) -> [f64; 3] {
        [self.a11, self.a22, 2.0 * self.a12]
    }

    pub fn from_voigt_strain(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], 0.5 * v[2])
    }

    /// Stress vector `(S11, S22, S12)`.
    pub fn to_voigt_stress(&self) -> [f64; 3] {
        [self.a11, self.a22, self.a12]
    }

    pub fn from_voigt_stress(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl Add for SymTensor2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a22 + o.a22, self.a12 + o.a12)
    }
}

impl AddAssign for SymTensor2 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for SymTensor2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a22 - o.a22, self.a12 - o.a12)
    }
}

impl Neg for SymTensor2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a11, -self.a22, -self.a12)
    }
}

impl Mul<SymTensor2> for f64 {
    type Output = SymTensor2;
    fn mul(self, t: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self * t.a11, self * t.a22, self * t.a12)
    }
}

/// Spectral decomposition of a [`SymTensor2`], eigenvalues sorted `e1 ≥ e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral2 {
    pub e1: f64,
    pub e2: f64,
    pub n1: [f64; 2],
    pub n2: [f64; 2],
    pub m1: SymTensor2,
    pub m2: SymTensor2,
    /// Set when the eigenvalue gap is below the relative tolerance.
    pub degenerate: bool,
}

impl Spectral2 {
    pub fn eigenvalue(&self, alpha: usize) -> f64 {
        if alpha == 0 {
            self.e1
        } else {
            self.e2
        }
    }

    pub fn projector(&self, alpha: usize) -> SymTensor2 {
        if alpha == 0 {
            self.m1
        } else {
            self.m2
        }
    }

    /// `Σ e_a M_a`
    pub fn reconstruct(&self) -> SymTensor2 {
        self.e1 * self.m1 + self.e2 * self.m2
    }
}

/// Decompose `t` into eigenvalues and eigenprojectors.
///
/// The eigenvector `n1` is oriented so that its first nonzero component is
/// positive and `n2` is `n1` rotated by +90°.
pub fn spectral_decompose(t: &SymTensor2, tol_eig: f64) -> Result<Spectral2, TensorError> {
    if !(tol_eig > 0.0) {
        return Err(TensorError::InvalidTolerance(tol_eig));
    }
    if !t.is_finite() {
        return Err(TensorError::NonFinite);
    }
    let mean = 0.5 * (t.a11 + t.a22);
    let half_diff = 0.5 * (t.a11 - t.a22);
    let radius = half_diff.hypot(t.a12);
    let e1 = mean + radius;
    let e2 = mean - radius;

    let theta = 0.5 * t.a12.atan2(half_diff);
    let (s, c) = theta.sin_cos();
    let mut n1 = [c, s];
    if n1[0] < 0.0 || (n1[0] == 0.0 && n1[1] < 0.0) {
        n1 = [-n1[0], -n1[1]];
    }
    let n2 = [-n1[1], n1[0]];

    let degenerate = (e1 - e2).abs() <= tol_eig * f64::max(1.0, e1.abs() + e2.abs());
    Ok(Spectral2 {
        e1,
        e2,
        n1,
        n2,
        m1: SymTensor2::dyad(n1),
        m2: SymTensor2::dyad(n2),
        degenerate,
    })
}

/// Fourth-order plane tensor in Voigt form, `S_voigt = c · E_voigt`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tangent4 {
    pub c: [[f64; 3]; 3],
}

const VOIGT_PAIRS: [(usize, usize); 3] = [(0, 0), (1, 1), (0, 1)];

impl Tangent4 {
    pub const fn new(c: [[f64; 3]; 3]) -> Self {
        Self { c }
    }

    pub const fn zero() -> Self {
        Self { c: [[0.0; 3]; 3] }
    }

    /// `A ⊗ B` with `(A ⊗ B)_ijkl = A_ij B_kl`.
    pub fn dyad(a: &SymTensor2, b: &SymTensor2) -> Self {
        let row = a.to_voigt_stress();
        let col = b.to_voigt_stress();
        let mut c = [[0.0; 3]; 3];
        for (i, ri) in row.iter().enumerate() {
            for (j, cj) in col.iter().enumerate() {
                c[i][j] = ri * cj;
            }
        }
        Self { c }
    }

    /// Pack a full tensor. Shear rows and columns are symmetrised, so any
    /// tensor lacking minor symmetry is replaced by its minor-symmetric part.
    pub fn from_tensor4(t: &Tensor4) -> Self {
        let mut c = [[0.0; 3]; 3];
        for (r, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            for (s, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
                c[r][s] = 0.25 * (t[i][j][k][l] + t[j][i][k][l] + t[i][j][l][k] + t[j][i][l][k]);
            }
        }
        Self { c }
    }

    /// Unpack to a minor-symmetric full tensor.
    pub fn to_tensor4(&self) -> Tensor4 {
        let mut t = [[[[0.0; 2]; 2]; 2]; 2];
        let voigt = |i: usize, j: usize| if i == j { i } else { 2 };
        for (i, ti) in t.iter_mut().enumerate() {
            for (j, tij) in ti.iter_mut().enumerate() {
                for (k, tijk) in tij.iter_mut().enumerate() {
                    for (l, v) in tijk.iter_mut().enumerate() {
                        *v = self.c[voigt(i, j)][voigt(k, l)];
                    }
                }
            }
        }
        t
    }

    pub fn apply(&self, strain: &SymTensor2) -> SymTensor2 {
        let e = strain.to_voigt_strain();
        let mut s = [0.0; 3];
        for (i, si) in s.iter_mut().enumerate() {
            *si = (0..3).map(|j| self.c[i][j] * e[j]).sum();
        }
        SymTensor2::from_voigt_stress(s)
    }

    pub fn transpose(&self) -> Self {
        let mut c = [[0.0; 3]; 3];
        for (i, ci) in c.iter_mut().enumerate() {
            for (j, v) in ci.iter_mut().enumerate() {
                *v = self.c[j][i];
            }
        }
        Self { c }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm of the Voigt matrix.
    pub fn norm(&self) -> f64 {
        self.c.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `‖C − Cᵀ‖`
    pub fn asymmetry(&self) -> f64 {
        (*self - self.transpose()).norm()
    }

    /// Major symmetry holds iff the Voigt matrix is symmetric.
    pub fn has_major_symmetry(&self, rel_tol: f64) -> bool {
        self.asymmetry() <= rel_tol * self.norm()
    }
}

impl Add for Tangent4 {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}

impl AddAssign for Tangent4 {
    fn add_assign(&mut self, o: Self) {
        for (a, b) in self.c.iter_mut().flatten().zip(o.c.iter().flatten()) {
            *a += b;
        }
    }
}

impl Sub for Tangent4 {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for (a, b) in self.c.iter_mut().flatten().zip(o.c.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl Mul<Tangent4> for f64 {
    type Output = Tangent4;
    fn mul(self, mut t: Tangent4) -> Tangent4 {
        t.c.iter_mut().flatten().for_each(|v| *v *= self);
        t
    }
}

/// The dyads `Q_ab = M_a ⊗ M_b` and `G_12 + G_21`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorProducts {
    pub q11: Tangent4,
    pub q22: Tangent4,
    pub q12: Tangent4,
    pub q21: Tangent4,
    pub g_sym: Tangent4,
}

/// `G_ab + G_ba` with `G_ab^ijkl = M_a^ik M_b^jl + M_a^il M_b^jk`.
fn g_pair(a: &SymTensor2, b: &SymTensor2) -> Tangent4 {
    let m = |t: &SymTensor2, i: usize, j: usize| t.get(i, j);
    let mut c = [[0.0; 3]; 3];
    for (r, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
        for (s, &(k, l)) in VOIGT_PAIRS.iter().enumerate() {
            let gab = m(a, i, k) * m(b, j, l) + m(a, i, l) * m(b, j, k);
            let gba = m(b, i, k) * m(a, j, l) + m(b, i, l) * m(a, j, k);
            // the (ab)+(ba) sum is already symmetric in (ij) and (kl)
            c[r][s] = gab + gba;
        }
    }
    Tangent4 { c }
}

pub fn projector_products(s: &Spectral2) -> ProjectorProducts {
    ProjectorProducts {
        q11: Tangent4::dyad(&s.m1, &s.m1),
        q22: Tangent4::dyad(&s.m2, &s.m2),
        q12: Tangent4::dyad(&s.m1, &s.m2),
        q21: Tangent4::dyad(&s.m2, &s.m1),
        g_sym: g_pair(&s.m1, &s.m2),
    }
}

/// Eigenprojector derivatives `(dM1/dE, dM2/dE)`.
///
/// `dM1/dE = (G_12 + G_21) / (2 (e1 − e2))` and `dM2/dE = −dM1/dE`.
pub fn eigenprojector_derivative(s: &Spectral2) -> Result<(Tangent4, Tangent4), TensorError> {
    if s.degenerate {
        return Err(TensorError::CoincidentEigenvalues { e1: s.e1, e2: s.e2 });
    }
    let g = g_pair(&s.m1, &s.m2);
    let d1 = (0.5 / (s.e1 - s.e2)) * g;
    Ok((d1, -1.0 * d1))
}

/// Components of `t` in the eigenvector frame of `s`: `(n_a · t n_b)`.
pub fn rotate_to_principal(t: &SymTensor2, s: &Spectral2) -> SymTensor2 {
    SymTensor2::new(
        t.quad_form(s.n1, s.n1),
        t.quad_form(s.n2, s.n2),
        t.quad_form(s.n1, s.n2),
    )
}
