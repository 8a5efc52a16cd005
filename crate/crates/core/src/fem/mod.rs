//! Total-Lagrangian membrane elements on structured Lagrange quad meshes.

pub mod assembly;
pub mod basis;
pub mod kinematics;
pub mod loads;
pub mod mesh;
pub mod recovery;

use thiserror::Error;

use crate::constitutive::ConstitutiveError;

pub use assembly::{internal_force, internal_force_and_tangent, ElementContribution, TangentMode};
pub use kinematics::{compute_kinematics, PointKinematics, ReferenceElement};
pub use loads::{external_force_and_tangent, Load, LoadFactors, NodeSelector, Region, Spring};
pub use mesh::{build_rect_mesh, Mesh, RectGrid};
pub use recovery::{evaluate_point, recover_fields, PointFields};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("element order must be 1, 2 or 3, got {0}")]
    InvalidOrder(usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("unknown node set or edge '{0}'")]
    UnknownNodeSet(String),
    #[error("no node near ({}, {})", .0[0], .0[1])]
    NodeNotFound([f64; 2]),
    #[error("point ({}, {}) lies outside the mesh", .0[0], .0[1])]
    PointNotFound([f64; 2]),
    #[error("degenerate geometry in element {0}")]
    DegenerateElement(usize),
    #[error("displacement vector has length {got}, expected {expected}")]
    DisplacementLength { got: usize, expected: usize },
    #[error("element {element}: {source}")]
    Constitutive {
        element: usize,
        #[source]
        source: ConstitutiveError,
    },
}

pub(crate) mod vec3 {
    pub type V3 = [f64; 3];

    pub fn dot(a: V3, b: V3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn cross(a: V3, b: V3) -> V3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    pub fn norm(a: V3) -> f64 {
        dot(a, a).sqrt()
    }

    pub fn scale(s: f64, a: V3) -> V3 {
        [s * a[0], s * a[1], s * a[2]]
    }

    pub fn add(a: V3, b: V3) -> V3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    pub fn axpy(y: &mut V3, s: f64, x: V3) {
        for d in 0..3 {
            y[d] += s * x[d];
        }
    }

    /// Skew matrix `[v]×` with `[v]× w = v × w`.
    pub fn skew(v: V3) -> [[f64; 3]; 3] {
        [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
    }
}
