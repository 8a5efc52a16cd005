//! External loads: edge tractions, follower pressure, body forces, nodal
//! forces and linear springs.
//!
//! Every load carries a named channel whose current factor scales it, so one
//! schedule can ramp a pressure while another removes stabilising tractions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::basis::{gauss_legendre, lagrange_1d, Shape2};
use super::kinematics::ReferenceElement;
use super::mesh::Mesh;
use super::vec3::{self, V3};
use super::FemError;
use crate::sparse::Triplets;

/// Current factor of each load channel; missing channels are zero.
pub type LoadFactors = BTreeMap<String, f64>;

pub const DEFAULT_CHANNEL: &str = "load";

fn default_channel() -> String {
    DEFAULT_CHANNEL.to_string()
}

fn is_zero3(v: &[f64; 3]) -> bool {
    *v == [0.0; 3]
}

/// Selection of mesh nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NodeSelector {
    /// Named node set of the mesh.
    Set(String),
    /// The node at an in-plane reference position.
    At([f64; 2]),
    Ids(Vec<usize>),
}

impl NodeSelector {
    pub fn set(name: &str) -> Self {
        Self::Set(name.to_string())
    }

    pub fn resolve(&self, mesh: &Mesh) -> Result<Vec<usize>, FemError> {
        match self {
            Self::Set(name) => Ok(mesh.node_set(name)?.to_vec()),
            Self::At(p) => {
                let scale = mesh
                    .grid
                    .map(|g| g.lx.max(g.ly))
                    .unwrap_or(1.0);
                mesh.node_near(*p, 1e-8 * scale)
                    .map(|n| vec![n])
                    .ok_or(FemError::NodeNotFound(*p))
            }
            Self::Ids(ids) => {
                if let Some(&bad) = ids.iter().find(|&&i| i >= mesh.n_nodes()) {
                    return Err(FemError::InvalidMesh(format!("node id {bad} out of range")));
                }
                Ok(ids.clone())
            }
        }
    }
}

/// Axis-aligned box in the reference plane, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Region {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        let tol = 1e-12 * (self.max[0] - self.min[0]).abs().max((self.max[1] - self.min[1]).abs()).max(1e-300);
        (0..2).all(|d| p[d] >= self.min[d] - tol && p[d] <= self.max[d] + tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Load {
    /// Dead force per unit reference length on a boundary edge,
    /// `t(X) = value + d_dx X + d_dy Y`.
    EdgeTraction {
        edge: String,
        value: [f64; 3],
        #[serde(default, skip_serializing_if = "is_zero3")]
        d_dx: [f64; 3],
        #[serde(default, skip_serializing_if = "is_zero3")]
        d_dy: [f64; 3],
        /// Restrict to edge segments whose midpoint lies in this box.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<Region>,
        #[serde(default = "default_channel")]
        channel: String,
    },
    /// Follower pressure along the current normal `g_1 × g_2`.
    Pressure {
        value: f64,
        #[serde(default = "default_channel")]
        channel: String,
    },
    /// Dead force per unit reference area.
    BodyForce {
        value: [f64; 3],
        #[serde(default = "default_channel")]
        channel: String,
    },
    /// Dead force applied to each selected node.
    NodalForce {
        nodes: NodeSelector,
        value: [f64; 3],
        #[serde(default = "default_channel")]
        channel: String,
    },
}

impl Load {
    pub fn channel(&self) -> &str {
        match self {
            Self::EdgeTraction { channel, .. }
            | Self::Pressure { channel, .. }
            | Self::BodyForce { channel, .. }
            | Self::NodalForce { channel, .. } => channel,
        }
    }

    /// Whether the load depends on the displacement.
    pub fn is_follower(&self) -> bool {
        matches!(self, Self::Pressure { .. })
    }
}

/// Linear springs to the reference position of each selected node, always
/// active: `F = −k ∘ u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spring {
    pub nodes: NodeSelector,
    pub stiffness: [f64; 3],
}

/// External force `F_ext(u)` and its derivative `∂F_ext/∂u`.
///
/// The derivative is nonzero only for follower pressure (nonsymmetric) and
/// springs (`−k` on the diagonal). The solver uses `K = K_int − ∂F_ext/∂u`.
pub fn external_force_and_tangent(
    mesh: &Mesh,
    u: &[f64],
    loads: &[Load],
    springs: &[Spring],
    factors: &LoadFactors,
) -> Result<(Vec<f64>, Triplets), FemError> {
    let n = mesh.n_dofs();
    if u.len() != n {
        return Err(FemError::DisplacementLength { got: u.len(), expected: n });
    }
    let mut force = vec![0.0; n];
    let mut tangent = Triplets::new(n);
    let factor = |ch: &str| factors.get(ch).copied().unwrap_or(0.0);

    for load in loads {
        let lf = factor(load.channel());
        if lf == 0.0 {
            continue;
        }
        match load {
            Load::EdgeTraction { edge, value, d_dx, d_dy, region, .. } => {
                edge_traction(mesh, edge, *value, *d_dx, *d_dy, region.as_ref(), lf, &mut force)?;
            }
            Load::Pressure { value, .. } => {
                pressure(mesh, u, lf * value, &mut force, &mut tangent);
            }
            Load::BodyForce { value, .. } => {
                body_force(mesh, vec3::scale(lf, *value), &mut force)?;
            }
            Load::NodalForce { nodes, value, .. } => {
                for node in nodes.resolve(mesh)? {
                    for d in 0..3 {
                        force[3 * node + d] += lf * value[d];
                    }
                }
            }
        }
    }
    for spring in springs {
        for node in spring.nodes.resolve(mesh)? {
            for d in 0..3 {
                let k = spring.stiffness[d];
                if k != 0.0 {
                    force[3 * node + d] -= k * u[3 * node + d];
                    tangent.push(3 * node + d, 3 * node + d, -k);
                }
            }
        }
    }
    Ok((force, tangent))
}

#[allow(clippy::too_many_arguments)]
fn edge_traction(
    mesh: &Mesh,
    edge: &str,
    value: V3,
    d_dx: V3,
    d_dy: V3,
    region: Option<&Region>,
    factor: f64,
    force: &mut [f64],
) -> Result<(), FemError> {
    let p = mesh.order;
    let (pts, wts) = gauss_legendre(p + 1);
    for seg in mesh.edge(edge)? {
        if let Some(r) = region {
            let first = mesh.nodes[seg[0]];
            let last = mesh.nodes[seg[p]];
            let mid = [0.5 * (first[0] + last[0]), 0.5 * (first[1] + last[1]), 0.0];
            if !r.contains(mid) {
                continue;
            }
        }
        for (&s, &w) in pts.iter().zip(wts) {
            let (nv, dv) = lagrange_1d(p, s);
            let mut x = [0.0; 3];
            let mut dx = [0.0; 3];
            for (k, &node) in seg.iter().enumerate() {
                vec3::axpy(&mut x, nv[k], mesh.nodes[node]);
                vec3::axpy(&mut dx, dv[k], mesh.nodes[node]);
            }
            let mut t = value;
            vec3::axpy(&mut t, x[0], d_dx);
            vec3::axpy(&mut t, x[1], d_dy);
            let jw = factor * vec3::norm(dx) * w;
            for (k, &node) in seg.iter().enumerate() {
                for d in 0..3 {
                    force[3 * node + d] += nv[k] * t[d] * jw;
                }
            }
        }
    }
    Ok(())
}

fn pressure(mesh: &Mesh, u: &[f64], p: f64, force: &mut [f64], tangent: &mut Triplets) {
    let reference = ReferenceElement::new(mesh.order);
    for conn in &mesh.elements {
        let nen = conn.len();
        for (q, shape) in reference.points.iter().zip(&reference.shapes) {
            let g = current_basis(mesh, conn, u, shape);
            let normal = vec3::cross(g[0], g[1]);
            let pw = p * q.weight;
            for (a, &na) in conn.iter().enumerate() {
                for d in 0..3 {
                    force[3 * na + d] += pw * shape.n[a] * normal[d];
                }
            }
            // ∂(g1 × g2)/∂u_b = N_b,2 [g1]× − N_b,1 [g2]×
            let (s1, s2) = (vec3::skew(g[0]), vec3::skew(g[1]));
            for a in 0..nen {
                for b in 0..nen {
                    let c = pw * shape.n[a];
                    let (d1, d2) = (shape.dn_dxi[b], shape.dn_deta[b]);
                    for i in 0..3 {
                        for j in 0..3 {
                            let v = c * (d2 * s1[i][j] - d1 * s2[i][j]);
                            if v != 0.0 {
                                tangent.push(3 * conn[a] + i, 3 * conn[b] + j, v);
                            }
                        }
                    }
                }
            }
        }
    }
}

fn current_basis(mesh: &Mesh, conn: &[usize], u: &[f64], shape: &Shape2) -> [V3; 2] {
    let mut g = [[0.0; 3]; 2];
    for (k, &n) in conn.iter().enumerate() {
        let x = vec3::add(mesh.nodes[n], [u[3 * n], u[3 * n + 1], u[3 * n + 2]]);
        vec3::axpy(&mut g[0], shape.dn_dxi[k], x);
        vec3::axpy(&mut g[1], shape.dn_deta[k], x);
    }
    g
}

fn body_force(mesh: &Mesh, b: V3, force: &mut [f64]) -> Result<(), FemError> {
    let reference = ReferenceElement::new(mesh.order);
    let zero = vec![0.0; mesh.n_dofs()];
    for (e, conn) in mesh.elements.iter().enumerate() {
        for (q, shape) in reference.points.iter().zip(&reference.shapes) {
            let big_g = current_basis(mesh, conn, &zero, shape);
            let da = vec3::norm(vec3::cross(big_g[0], big_g[1])) * q.weight;
            if !(da > 0.0) {
                return Err(FemError::DegenerateElement(e));
            }
            for (a, &na) in conn.iter().enumerate() {
                for d in 0..3 {
                    force[3 * na + d] += shape.n[a] * da * b[d];
                }
            }
        }
    }
    Ok(())
}
