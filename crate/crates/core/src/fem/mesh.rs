//! Structured Lagrange quadrilateral meshes embedded in 3D.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::basis::{quad_rule, Shape2};
use super::FemError;

/// Rectangular grid parameters a mesh was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectGrid {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    /// Polynomial order of every element.
    pub order: usize,
    /// Reference positions.
    pub nodes: Vec<[f64; 3]>,
    /// Connectivity; local node `(a, b)` is entry `b * (order + 1) + a`.
    pub elements: Vec<Vec<usize>>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    /// Boundary edges by name, each segment listing its `order + 1` nodes in
    /// order along the edge.
    pub edges: BTreeMap<String, Vec<Vec<usize>>>,
    pub grid: Option<RectGrid>,
}

/// Build a regular `nx × ny` grid of order-`order` elements covering
/// `[x0, x0 + lx] × [y0, y0 + ly]` in the plane `z = 0`.
///
/// Node sets: `left`, `right`, `bottom`, `top`, `corners`, `corner_bl`,
/// `corner_br`, `corner_tl`, `corner_tr`, `all`, and when the grid has a
/// node line through the middle also `midline` (horizontal), `midline_x`
/// (vertical) and `center`.
pub fn build_rect_mesh(
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
    order: usize,
    origin: [f64; 2],
) -> Result<Mesh, FemError> {
    if !(1..=3).contains(&order) {
        return Err(FemError::InvalidOrder(order));
    }
    if nx == 0 || ny == 0 {
        return Err(FemError::InvalidMesh("element counts must be at least 1".into()));
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(FemError::InvalidMesh("side lengths must be positive".into()));
    }
    let cols = nx * order + 1;
    let rows = ny * order + 1;
    let id = |i: usize, j: usize| j * cols + i;

    let mut nodes = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            nodes.push([
                origin[0] + lx * i as f64 / (cols - 1) as f64,
                origin[1] + ly * j as f64 / (rows - 1) as f64,
                0.0,
            ]);
        }
    }

    let mut elements = Vec::with_capacity(nx * ny);
    for ey in 0..ny {
        for ex in 0..nx {
            let mut conn = Vec::with_capacity((order + 1) * (order + 1));
            for b in 0..=order {
                for a in 0..=order {
                    conn.push(id(ex * order + a, ey * order + b));
                }
            }
            elements.push(conn);
        }
    }

    let mut node_sets = BTreeMap::new();
    node_sets.insert("left".into(), (0..rows).map(|j| id(0, j)).collect());
    node_sets.insert("right".into(), (0..rows).map(|j| id(cols - 1, j)).collect());
    node_sets.insert("bottom".into(), (0..cols).map(|i| id(i, 0)).collect());
    node_sets.insert("top".into(), (0..cols).map(|i| id(i, rows - 1)).collect());
    let (bl, br, tl, tr) = (id(0, 0), id(cols - 1, 0), id(0, rows - 1), id(cols - 1, rows - 1));
    node_sets.insert("corners".into(), vec![bl, br, tl, tr]);
    node_sets.insert("corner_bl".into(), vec![bl]);
    node_sets.insert("corner_br".into(), vec![br]);
    node_sets.insert("corner_tl".into(), vec![tl]);
    node_sets.insert("corner_tr".into(), vec![tr]);
    node_sets.insert("all".into(), (0..nodes.len()).collect());
    if (rows - 1) % 2 == 0 {
        let j = (rows - 1) / 2;
        node_sets.insert("midline".into(), (0..cols).map(|i| id(i, j)).collect());
    }
    if (cols - 1) % 2 == 0 {
        let i = (cols - 1) / 2;
        node_sets.insert("midline_x".into(), (0..rows).map(|j| id(i, j)).collect());
    }
    if (rows - 1) % 2 == 0 && (cols - 1) % 2 == 0 {
        node_sets.insert("center".into(), vec![id((cols - 1) / 2, (rows - 1) / 2)]);
    }

    let segments = |fixed_i: Option<usize>, fixed_j: Option<usize>, n: usize| -> Vec<Vec<usize>> {
        (0..n)
            .map(|e| {
                (0..=order)
                    .map(|k| match (fixed_i, fixed_j) {
                        (Some(i), None) => id(i, e * order + k),
                        (None, Some(j)) => id(e * order + k, j),
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect()
    };
    let mut edges = BTreeMap::new();
    edges.insert("left".into(), segments(Some(0), None, ny));
    edges.insert("right".into(), segments(Some(cols - 1), None, ny));
    edges.insert("bottom".into(), segments(None, Some(0), nx));
    edges.insert("top".into(), segments(None, Some(rows - 1), nx));

    Ok(Mesh {
        order,
        nodes,
        elements,
        node_sets,
        edges,
        grid: Some(RectGrid { lx, ly, nx, ny, origin }),
    })
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.nodes.len()
    }

    pub fn nodes_per_element(&self) -> usize {
        (self.order + 1) * (self.order + 1)
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize], FemError> {
        self.node_sets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| FemError::UnknownNodeSet(name.to_string()))
    }

    pub fn edge(&self, name: &str) -> Result<&[Vec<usize>], FemError> {
        self.edges
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| FemError::UnknownNodeSet(name.to_string()))
    }

    /// Node closest to `point` in the reference plane, if within `tol`.
    pub fn node_near(&self, point: [f64; 2], tol: f64) -> Option<usize> {
        let (best, dist) = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, x)| (i, (x[0] - point[0]).hypot(x[1] - point[1])))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        (dist <= tol).then_some(best)
    }

    /// Reference centroid of an element (average of its nodes).
    pub fn element_centroid(&self, element: usize) -> [f64; 3] {
        let conn = &self.elements[element];
        let mut c = [0.0; 3];
        for &n in conn {
            for (ci, xi) in c.iter_mut().zip(self.nodes[n]) {
                *ci += xi;
            }
        }
        c.map(|v| v / conn.len() as f64)
    }

    /// Reference position at parametric coordinates of an element.
    pub fn reference_point(&self, element: usize, xi: f64, eta: f64) -> [f64; 3] {
        let shape = Shape2::eval(self.order, xi, eta);
        let mut x = [0.0; 3];
        for (k, &n) in self.elements[element].iter().enumerate() {
            for d in 0..3 {
                x[d] += shape.n[k] * self.nodes[n][d];
            }
        }
        x
    }

    /// Element and parametric coordinates of an in-plane reference point.
    ///
    /// Points on shared edges resolve to the lowest-numbered element.
    pub fn locate(&self, point: [f64; 2]) -> Result<(usize, f64, f64), FemError> {
        let tol = 1e-10;
        for (e, conn) in self.elements.iter().enumerate() {
            let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for &n in conn {
                for d in 0..2 {
                    lo[d] = lo[d].min(self.nodes[n][d]);
                    hi[d] = hi[d].max(self.nodes[n][d]);
                }
            }
            let pad = tol * (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
            if (0..2).any(|d| point[d] < lo[d] - pad || point[d] > hi[d] + pad) {
                continue;
            }
            if let Some((xi, eta)) = self.invert_map(e, point) {
                if xi.abs() <= 1.0 + 1e-9 && eta.abs() <= 1.0 + 1e-9 {
                    return Ok((e, xi.clamp(-1.0, 1.0), eta.clamp(-1.0, 1.0)));
                }
            }
        }
        Err(FemError::PointNotFound(point))
    }

    fn invert_map(&self, element: usize, point: [f64; 2]) -> Option<(f64, f64)> {
        let conn = &self.elements[element];
        let (mut xi, mut eta) = (0.0, 0.0);
        for _ in 0..50 {
            let s = Shape2::eval(self.order, xi, eta);
            let mut x = [0.0; 2];
            let mut jac = [[0.0; 2]; 2];
            for (k, &n) in conn.iter().enumerate() {
                for d in 0..2 {
                    x[d] += s.n[k] * self.nodes[n][d];
                    jac[d][0] += s.dn_dxi[k] * self.nodes[n][d];
                    jac[d][1] += s.dn_deta[k] * self.nodes[n][d];
                }
            }
            let r = [point[0] - x[0], point[1] - x[1]];
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det.abs() < f64::MIN_POSITIVE {
                return None;
            }
            let dxi = (jac[1][1] * r[0] - jac[0][1] * r[1]) / det;
            let deta = (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det;
            xi += dxi;
            eta += deta;
            if dxi.abs().max(deta.abs()) < 1e-14 {
                return Some((xi, eta));
            }
        }
        Some((xi, eta))
    }

    /// Check that every element has a positive in-plane Jacobian at all
    /// quadrature points.
    pub fn validate(&self) -> Result<(), FemError> {
        let rule = quad_rule(self.order);
        let shapes: Vec<Shape2> = rule.iter().map(|q| Shape2::eval(self.order, q.xi, q.eta)).collect();
        for (e, conn) in self.elements.iter().enumerate() {
            if conn.len() != self.nodes_per_element() || conn.iter().any(|&n| n >= self.nodes.len()) {
                return Err(FemError::InvalidMesh(format!("element {e} has bad connectivity")));
            }
            for s in &shapes {
                let mut g = [[0.0; 2]; 2];
                for (k, &n) in conn.iter().enumerate() {
                    for d in 0..2 {
                        g[0][d] += s.dn_dxi[k] * self.nodes[n][d];
                        g[1][d] += s.dn_deta[k] * self.nodes[n][d];
                    }
                }
                if g[0][0] * g[1][1] - g[0][1] * g[1][0] <= 0.0 {
                    return Err(FemError::DegenerateElement(e));
                }
            }
        }
        Ok(())
    }
}
