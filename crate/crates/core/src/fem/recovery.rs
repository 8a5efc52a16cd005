//! Post-processing: membrane state, principal stresses and wrinkle
//! directions at quadrature points or arbitrary element points.

use rayon::prelude::*;
use serde::Serialize;

use super::basis::Shape2;
use super::kinematics::{point_kinematics, PointKinematics, ReferenceElement};
use super::mesh::Mesh;
use super::vec3::{self, V3};
use super::FemError;
use crate::constitutive::{evaluate, Material, MembraneState, Model};
use crate::tensor2d::{spectral_decompose, SymTensor2, DEFAULT_TOL_EIG};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFields {
    pub element: usize,
    pub xi: f64,
    pub eta: f64,
    pub reference_position: V3,
    pub current_position: V3,
    pub state: MembraneState,
    /// Principal values of the modified PK2 stress, descending.
    pub pk2_principal: [f64; 2],
    /// Principal in-plane Cauchy stresses, descending.
    pub cauchy_principal: [f64; 2],
    /// Cauchy stress in global Cartesian components.
    pub cauchy_global: [[f64; 3]; 3],
    /// Unit wrinkle direction in the current configuration: the minor
    /// principal direction of the PK2 stress pushed forward by `F`.
    pub wrinkle_direction: V3,
    /// Strain in the local reference frame.
    pub strain: SymTensor2,
}

fn fields_at(
    mesh: &Mesh,
    element: usize,
    xi: f64,
    eta: f64,
    kin: &PointKinematics,
    u: &[f64],
    shape: &Shape2,
    material: &Material,
    model: Model,
) -> Result<PointFields, FemError> {
    let response = evaluate(model, &kin.strain, material)
        .map_err(|source| FemError::Constitutive { element, source })?;
    let stress = response.stress;
    let spec = spectral_decompose(&stress, DEFAULT_TOL_EIG)
        .map_err(|e| FemError::Constitutive { element, source: e.into() })?;

    // current orthonormal frame from g_1
    let g = &kin.cur_basis;
    let n_cur = vec3::cross(g[0], g[1]);
    let n_cur = vec3::scale(1.0 / vec3::norm(n_cur), n_cur);
    let c1 = vec3::scale(1.0 / vec3::norm(g[0]), g[0]);
    let c2 = vec3::cross(n_cur, c1);
    let cur_frame = [c1, c2];

    // F restricted to the tangent planes, F_iJ = ĉ_i · F ê_J
    let mut f2 = [[0.0; 2]; 2];
    for (i, ci) in cur_frame.iter().enumerate() {
        for (j, f) in f2[i].iter_mut().enumerate() {
            let unit = if j == 0 { [1.0, 0.0] } else { [0.0, 1.0] };
            *f = vec3::dot(*ci, kin.push_forward(unit));
        }
    }
    let det_f = f2[0][0] * f2[1][1] - f2[0][1] * f2[1][0];
    let s = stress.to_matrix();
    let mut sigma = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    sigma[i][j] += f2[i][k] * s[k][l] * f2[j][l];
                }
            }
            sigma[i][j] /= det_f;
        }
    }
    let sigma_t = SymTensor2::new(sigma[0][0], sigma[1][1], 0.5 * (sigma[0][1] + sigma[1][0]));
    let sig_spec = spectral_decompose(&sigma_t, DEFAULT_TOL_EIG)
        .map_err(|e| FemError::Constitutive { element, source: e.into() })?;
    let mut cauchy_global = [[0.0; 3]; 3];
    for a in 0..2 {
        for b in 0..2 {
            let v = sigma_t.get(a, b);
            for p in 0..3 {
                for q in 0..3 {
                    cauchy_global[p][q] += v * cur_frame[a][p] * cur_frame[b][q];
                }
            }
        }
    }

    let w = kin.push_forward(spec.n2);
    let wn = vec3::norm(w);
    let wrinkle_direction = if wn > 0.0 { vec3::scale(1.0 / wn, w) } else { [0.0; 3] };

    let mut x = [0.0; 3];
    let mut x_cur = [0.0; 3];
    for (k, &n) in mesh.elements[element].iter().enumerate() {
        vec3::axpy(&mut x, shape.n[k], mesh.nodes[n]);
        vec3::axpy(&mut x_cur, shape.n[k], vec3::add(mesh.nodes[n], [u[3 * n], u[3 * n + 1], u[3 * n + 2]]));
    }

    Ok(PointFields {
        element,
        xi,
        eta,
        reference_position: x,
        current_position: x_cur,
        state: response.state,
        pk2_principal: [spec.e1, spec.e2],
        cauchy_principal: [sig_spec.e1, sig_spec.e2],
        cauchy_global,
        wrinkle_direction,
        strain: kin.strain,
    })
}

/// Fields at parametric point `(xi, eta)` of `element`.
pub fn evaluate_point(
    mesh: &Mesh,
    u: &[f64],
    material: &Material,
    model: Model,
    element: usize,
    xi: f64,
    eta: f64,
) -> Result<PointFields, FemError> {
    if u.len() != mesh.n_dofs() {
        return Err(FemError::DisplacementLength { got: u.len(), expected: mesh.n_dofs() });
    }
    let shape = Shape2::eval(mesh.order, xi, eta);
    let kin = point_kinematics(mesh, element, u, &shape, 1.0)?;
    fields_at(mesh, element, xi, eta, &kin, u, &shape, material, model)
}

/// Fields at every quadrature point, grouped by element in element order.
pub fn recover_fields(
    mesh: &Mesh,
    u: &[f64],
    material: &Material,
    models: &[Model],
) -> Result<Vec<Vec<PointFields>>, FemError> {
    if u.len() != mesh.n_dofs() {
        return Err(FemError::DisplacementLength { got: u.len(), expected: mesh.n_dofs() });
    }
    let reference = ReferenceElement::new(mesh.order);
    (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            reference
                .points
                .iter()
                .zip(&reference.shapes)
                .map(|(q, shape)| {
                    let kin = point_kinematics(mesh, e, u, shape, q.weight)?;
                    fields_at(mesh, e, q.xi, q.eta, &kin, u, shape, material, models[e])
                })
                .collect()
        })
        .collect()
}
