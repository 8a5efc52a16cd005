//! Internal force vector and consistent tangent.

use rayon::prelude::*;

use super::kinematics::{point_kinematics, PointKinematics, ReferenceElement};
use super::mesh::Mesh;
use super::FemError;
use crate::constitutive::{evaluate, Material, Model};
use crate::sparse::Triplets;
use crate::tensor2d::Tangent4;

/// Which material tangent enters the stiffness matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TangentMode {
    /// Exact derivative of the model stress.
    #[default]
    Consistent,
    /// Isotropic SVK tangent, used as an elastic predictor from a stress-free
    /// state where the wrinkling models have no stiffness.
    Elastic,
}

/// Dense element force and row-major stiffness on the element DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementContribution {
    pub dofs: Vec<usize>,
    pub force: Vec<f64>,
    pub stiffness: Vec<f64>,
}

fn element_dofs(conn: &[usize]) -> Vec<usize> {
    conn.iter().flat_map(|&n| [3 * n, 3 * n + 1, 3 * n + 2]).collect()
}

/// Frame Voigt strain variation `B` (3 × ndof) at a point.
pub(crate) fn strain_operator(kin: &PointKinematics, dn: [&[f64]; 2]) -> Vec<[f64; 3]> {
    let w = kin.cov_to_voigt();
    let g = &kin.cur_basis;
    let nen = dn[0].len();
    let mut b = Vec::with_capacity(3 * nen);
    for a in 0..nen {
        for i in 0..3 {
            let cov = [
                dn[0][a] * g[0][i],
                dn[1][a] * g[1][i],
                0.5 * (dn[0][a] * g[1][i] + dn[1][a] * g[0][i]),
            ];
            let mut col = [0.0; 3];
            for r in 0..3 {
                col[r] = w[r][0] * cov[0] + w[r][1] * cov[1] + w[r][2] * cov[2];
            }
            b.push(col);
        }
    }
    b
}

/// Force and stiffness of one element.
pub fn element_internal(
    mesh: &Mesh,
    reference: &ReferenceElement,
    element: usize,
    u: &[f64],
    material: &Material,
    model: Model,
    mode: TangentMode,
    with_tangent: bool,
) -> Result<ElementContribution, FemError> {
    let conn = &mesh.elements[element];
    let nen = conn.len();
    let nd = 3 * nen;
    let mut force = vec![0.0; nd];
    let mut stiffness = if with_tangent { vec![0.0; nd * nd] } else { Vec::new() };
    let thickness = material.thickness;

    for (q, shape) in reference.points.iter().zip(&reference.shapes) {
        let kin = point_kinematics(mesh, element, u, shape, q.weight)?;
        let response = evaluate(model, &kin.strain, material)
            .map_err(|source| FemError::Constitutive { element, source })?;
        let scale = thickness * kin.area_weight;
        let b = strain_operator(&kin, [&shape.dn_dxi, &shape.dn_deta]);
        let s = response.stress.to_voigt_stress();
        for (r, br) in b.iter().enumerate() {
            force[r] += scale * (br[0] * s[0] + br[1] * s[1] + br[2] * s[2]);
        }
        if !with_tangent {
            continue;
        }

        let c: Tangent4 = match mode {
            TangentMode::Consistent => response.tangent,
            TangentMode::Elastic => material.isotropic_tangent(),
        };
        // C·B, column by column
        let cb: Vec<[f64; 3]> = b
            .iter()
            .map(|bs| {
                let mut v = [0.0; 3];
                for i in 0..3 {
                    v[i] = c.c[i][0] * bs[0] + c.c[i][1] * bs[1] + c.c[i][2] * bs[2];
                }
                v
            })
            .collect();
        for r in 0..nd {
            let br = b[r];
            let row = &mut stiffness[r * nd..(r + 1) * nd];
            for (kc, cbc) in row.iter_mut().zip(&cb) {
                *kc += scale * (br[0] * cbc[0] + br[1] * cbc[1] + br[2] * cbc[2]);
            }
        }

        let s_contra = kin.frame_to_contravariant(&response.stress);
        for a in 0..nen {
            let da = [shape.dn_dxi[a], shape.dn_deta[a]];
            for bn in 0..nen {
                let db = [shape.dn_dxi[bn], shape.dn_deta[bn]];
                let mut k = 0.0;
                for alpha in 0..2 {
                    for beta in 0..2 {
                        k += s_contra[alpha][beta] * da[alpha] * db[beta];
                    }
                }
                let k = scale * k;
                for i in 0..3 {
                    stiffness[(3 * a + i) * nd + 3 * bn + i] += k;
                }
            }
        }
    }
    Ok(ElementContribution {
        dofs: element_dofs(conn),
        force,
        stiffness,
    })
}

/// Evaluate all elements concurrently; results come back in element order.
pub fn element_contributions(
    mesh: &Mesh,
    u: &[f64],
    material: &Material,
    models: &[Model],
    mode: TangentMode,
    with_tangent: bool,
) -> Result<Vec<ElementContribution>, FemError> {
    if u.len() != mesh.n_dofs() {
        return Err(FemError::DisplacementLength {
            got: u.len(),
            expected: mesh.n_dofs(),
        });
    }
    if models.len() != mesh.elements.len() {
        return Err(FemError::InvalidMesh(format!(
            "{} element models for {} elements",
            models.len(),
            mesh.elements.len()
        )));
    }
    let reference = ReferenceElement::new(mesh.order);
    (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| element_internal(mesh, &reference, e, u, material, models[e], mode, with_tangent))
        .collect()
}

/// Global internal force `F_int` and tangent `K_int`.
///
/// `models` holds one constitutive model per element.
pub fn internal_force_and_tangent(
    mesh: &Mesh,
    u: &[f64],
    material: &Material,
    models: &[Model],
    mode: TangentMode,
) -> Result<(Vec<f64>, Triplets), FemError> {
    let contributions = element_contributions(mesh, u, material, models, mode, true)?;
    let n = mesh.n_dofs();
    let nnz = contributions.iter().map(|c| c.stiffness.len()).sum();
    let mut force = vec![0.0; n];
    let mut k = Triplets::with_capacity(n, nnz);
    for c in &contributions {
        for (&d, f) in c.dofs.iter().zip(&c.force) {
            force[d] += f;
        }
        k.add_block(&c.dofs, &c.stiffness, 1.0);
    }
    Ok((force, k))
}

/// Internal force only.
pub fn internal_force(
    mesh: &Mesh,
    u: &[f64],
    material: &Material,
    models: &[Model],
) -> Result<Vec<f64>, FemError> {
    let contributions = element_contributions(mesh, u, material, models, TangentMode::Consistent, false)?;
    let mut force = vec![0.0; mesh.n_dofs()];
    for c in &contributions {
        for (&d, f) in c.dofs.iter().zip(&c.force) {
            force[d] += f;
        }
    }
    Ok(force)
}
