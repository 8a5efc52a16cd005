//! Curvilinear membrane kinematics at a point of an element.
//!
//! Covariant bases `G_α = ∂X/∂θ^α` and `g_α = ∂x/∂θ^α`, metrics, the
//! Green–Lagrange strain `E_αβ = ½ (g_αβ − G_αβ)` and its components in the
//! local orthonormal frame built from `G_1`.

use super::basis::{quad_rule, QuadPoint, Shape2};
use super::mesh::Mesh;
use super::vec3::{self, V3};
use super::FemError;
use crate::tensor2d::SymTensor2;

/// Quadrature rule with shape functions evaluated once per element order.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub order: usize,
    pub points: Vec<QuadPoint>,
    pub shapes: Vec<Shape2>,
}

impl ReferenceElement {
    pub fn new(order: usize) -> Self {
        let points = quad_rule(order);
        let shapes = points.iter().map(|q| Shape2::eval(order, q.xi, q.eta)).collect();
        Self { order, points, shapes }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointKinematics {
    /// Reference covariant basis `G_α`.
    pub ref_basis: [V3; 2],
    /// Current covariant basis `g_α`.
    pub cur_basis: [V3; 2],
    pub ref_metric: [[f64; 2]; 2],
    pub cur_metric: [[f64; 2]; 2],
    /// Reference contravariant basis `G^α`.
    pub ref_dual: [V3; 2],
    /// Covariant strain components `E_αβ`.
    pub strain_cov: SymTensor2,
    /// Local orthonormal reference frame `ê_1`, `ê_2`.
    pub frame: [V3; 2],
    pub normal: V3,
    /// `T[i][α] = ê_i · G^α`; frame components are `E_ij = T_iα T_jβ E_αβ`.
    pub transform: [[f64; 2]; 2],
    /// Strain in the local frame.
    pub strain: SymTensor2,
    /// `|G_1 × G_2|` times the quadrature weight.
    pub area_weight: f64,
}

impl PointKinematics {
    /// Matrix mapping covariant components `(E_11, E_22, E_12)` to the frame
    /// Voigt vector `(E_11, E_22, 2 E_12)`.
    pub fn cov_to_voigt(&self) -> [[f64; 3]; 3] {
        let t = &self.transform;
        [
            [t[0][0] * t[0][0], t[0][1] * t[0][1], 2.0 * t[0][0] * t[0][1]],
            [t[1][0] * t[1][0], t[1][1] * t[1][1], 2.0 * t[1][0] * t[1][1]],
            [
                2.0 * t[0][0] * t[1][0],
                2.0 * t[0][1] * t[1][1],
                2.0 * (t[0][0] * t[1][1] + t[0][1] * t[1][0]),
            ],
        ]
    }

    /// Contravariant components `S^αβ` of a frame tensor.
    pub fn frame_to_contravariant(&self, s: &SymTensor2) -> [[f64; 2]; 2] {
        let t = &self.transform;
        let mut out = [[0.0; 2]; 2];
        for (alpha, row) in out.iter_mut().enumerate() {
            for (beta, v) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    for l in 0..2 {
                        *v += s.get(k, l) * t[k][alpha] * t[l][beta];
                    }
                }
            }
        }
        out
    }

    /// `J = |g_1 × g_2| / |G_1 × G_2|`.
    pub fn area_ratio(&self) -> f64 {
        vec3::norm(vec3::cross(self.cur_basis[0], self.cur_basis[1]))
            / vec3::norm(vec3::cross(self.ref_basis[0], self.ref_basis[1]))
    }

    /// Map a reference-frame vector `(v_1, v_2)` through `F = g_α ⊗ G^α`.
    pub fn push_forward(&self, v: [f64; 2]) -> V3 {
        let t = &self.transform;
        let mut out = [0.0; 3];
        for alpha in 0..2 {
            let coeff = t[0][alpha] * v[0] + t[1][alpha] * v[1];
            vec3::axpy(&mut out, coeff, self.cur_basis[alpha]);
        }
        out
    }
}

/// Kinematics at one parametric point of `element`.
pub fn point_kinematics(
    mesh: &Mesh,
    element: usize,
    u: &[f64],
    shape: &Shape2,
    weight: f64,
) -> Result<PointKinematics, FemError> {
    let conn = &mesh.elements[element];
    let mut big_g = [[0.0; 3]; 2];
    // displacement gradient H_α = ∂u/∂θ^α, kept separate from G_α so that
    // small strains do not suffer cancellation
    let mut grad_u = [[0.0; 3]; 2];
    for (k, &n) in conn.iter().enumerate() {
        let x = mesh.nodes[n];
        let d = [u[3 * n], u[3 * n + 1], u[3 * n + 2]];
        for alpha in 0..2 {
            let dn = shape.derivative(alpha)[k];
            vec3::axpy(&mut big_g[alpha], dn, x);
            vec3::axpy(&mut grad_u[alpha], dn, d);
        }
    }
    let small_g = [vec3::add(big_g[0], grad_u[0]), vec3::add(big_g[1], grad_u[1])];
    let metric = |b: &[V3; 2]| {
        [
            [vec3::dot(b[0], b[0]), vec3::dot(b[0], b[1])],
            [vec3::dot(b[1], b[0]), vec3::dot(b[1], b[1])],
        ]
    };
    let ref_metric = metric(&big_g);
    let cur_metric = metric(&small_g);
    let det = ref_metric[0][0] * ref_metric[1][1] - ref_metric[0][1] * ref_metric[1][0];
    let area = vec3::norm(vec3::cross(big_g[0], big_g[1]));
    if !(det > 0.0) || !(area > 0.0) || !det.is_finite() {
        return Err(FemError::DegenerateElement(element));
    }
    let inv = [
        [ref_metric[1][1] / det, -ref_metric[0][1] / det],
        [-ref_metric[1][0] / det, ref_metric[0][0] / det],
    ];
    let mut ref_dual = [[0.0; 3]; 2];
    for alpha in 0..2 {
        for beta in 0..2 {
            vec3::axpy(&mut ref_dual[alpha], inv[alpha][beta], big_g[beta]);
        }
    }

    let normal = vec3::scale(1.0 / area, vec3::cross(big_g[0], big_g[1]));
    let e1 = vec3::scale(1.0 / vec3::norm(big_g[0]), big_g[0]);
    let e2 = vec3::cross(normal, e1);
    let frame = [e1, e2];
    let mut transform = [[0.0; 2]; 2];
    for i in 0..2 {
        for alpha in 0..2 {
            transform[i][alpha] = vec3::dot(frame[i], ref_dual[alpha]);
        }
    }

    // E_αβ = ½ (G_α·H_β + H_α·G_β + H_α·H_β) = ½ (g_αβ − G_αβ)
    let e_cov = |a: usize, b: usize| {
        0.5 * (vec3::dot(big_g[a], grad_u[b]) + vec3::dot(grad_u[a], big_g[b]) + vec3::dot(grad_u[a], grad_u[b]))
    };
    let strain_cov = SymTensor2::new(e_cov(0, 0), e_cov(1, 1), e_cov(0, 1));
    let mut kin = PointKinematics {
        ref_basis: big_g,
        cur_basis: small_g,
        ref_metric,
        cur_metric,
        ref_dual,
        strain_cov,
        frame,
        normal,
        transform,
        strain: SymTensor2::zero(),
        area_weight: area * weight,
    };
    let w = kin.cov_to_voigt();
    let c = [strain_cov.a11, strain_cov.a22, strain_cov.a12];
    let mut v = [0.0; 3];
    for r in 0..3 {
        v[r] = (0..3).map(|s| w[r][s] * c[s]).sum();
    }
    kin.strain = SymTensor2::from_voigt_strain(v);
    Ok(kin)
}

/// Kinematics at every quadrature point of `element`.
pub fn compute_kinematics(
    mesh: &Mesh,
    reference: &ReferenceElement,
    element: usize,
    u: &[f64],
) -> Result<Vec<PointKinematics>, FemError> {
    if u.len() != mesh.n_dofs() {
        return Err(FemError::DisplacementLength {
            got: u.len(),
            expected: mesh.n_dofs(),
        });
    }
    reference
        .points
        .iter()
        .zip(&reference.shapes)
        .map(|(q, s)| point_kinematics(mesh, element, u, s, q.weight))
        .collect()
}
