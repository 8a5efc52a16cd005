//! Scalar measurements taken from a displacement snapshot.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::case::Dof;
use crate::constitutive::{Material, MembraneState, Model};
use crate::fem::{evaluate_point, internal_force, recover_fields, FemError, Mesh, NodeSelector, PointFields};
use crate::fem::basis::Shape2;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("probe '{name}': {source}")]
    Fem {
        name: String,
        #[source]
        source: FemError,
    },
    #[error("probe '{name}': {message}")]
    Invalid { name: String, message: String },
}

/// Stress measure reported by stress probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressQuantity {
    /// Major principal Cauchy stress.
    Cauchy1,
    /// Minor principal Cauchy stress.
    Cauchy2,
    CauchyXx,
    CauchyYy,
    CauchyXy,
    Pk21,
    Pk22,
}

impl StressQuantity {
    pub fn extract(self, f: &PointFields) -> f64 {
        match self {
            Self::Cauchy1 => f.cauchy_principal[0],
            Self::Cauchy2 => f.cauchy_principal[1],
            Self::CauchyXx => f.cauchy_global[0][0],
            Self::CauchyYy => f.cauchy_global[1][1],
            Self::CauchyXy => f.cauchy_global[0][1],
            Self::Pk21 => f.pk2_principal[0],
            Self::Pk22 => f.pk2_principal[1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    #[default]
    Mean,
    MaxAbs,
}

fn default_scale() -> f64 {
    1.0
}

fn default_height() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Probe {
    /// `scale · direction · u` at a node.
    Displacement {
        name: String,
        at: [f64; 2],
        direction: [f64; 3],
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Stress at a reference point, `scale` applied.
    Stress {
        name: String,
        at: [f64; 2],
        quantity: StressQuantity,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Stress reduced over `samples` equally spaced points on a segment.
    Line {
        name: String,
        from: [f64; 2],
        to: [f64; 2],
        samples: usize,
        quantity: StressQuantity,
        #[serde(default)]
        reduction: Reduction,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Top of the wrinkled band in the element column containing `x`,
    /// divided by `height`: midway between the highest wrinkled quadrature
    /// point and the next point above it.
    WrinkleBandTop {
        name: String,
        x: f64,
        #[serde(default = "default_height")]
        height: f64,
    },
    /// Least-squares slope of one displacement component against the
    /// reference coordinate `along` over a node set, times `scale`. With
    /// `above_band_at`, only nodes above the wrinkled band measured in the
    /// element column at that x take part.
    EdgeSlope {
        name: String,
        nodes: NodeSelector,
        component: Dof,
        along: Dof,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        above_band_at: Option<f64>,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Sum of one internal-force component over a node set, i.e. the
    /// support reaction carried there.
    Reaction {
        name: String,
        nodes: NodeSelector,
        component: Dof,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Fraction of quadrature points that are wrinkled among those within
    /// `half_width` of the line through `center` along `direction` and
    /// within `max_distance` of `center` along it.
    WrinkledFraction {
        name: String,
        center: [f64; 2],
        direction: [f64; 2],
        half_width: f64,
        max_distance: f64,
    },
}

impl Probe {
    pub fn name(&self) -> &str {
        match self {
            Self::Displacement { name, .. }
            | Self::Stress { name, .. }
            | Self::Line { name, .. }
            | Self::WrinkleBandTop { name, .. }
            | Self::EdgeSlope { name, .. }
            | Self::Reaction { name, .. }
            | Self::WrinkledFraction { name, .. } => name,
        }
    }

    fn needs_fields(&self) -> bool {
        matches!(
            self,
            Self::WrinkleBandTop { .. } | Self::WrinkledFraction { .. } | Self::EdgeSlope { above_band_at: Some(_), .. }
        )
    }
}

/// Everything a probe may look at; quadrature-point fields are computed
/// once on first use.
pub struct ProbeContext<'a> {
    pub mesh: &'a Mesh,
    pub u: &'a [f64],
    pub material: &'a Material,
    pub models: &'a [Model],
    fields: Option<Vec<Vec<PointFields>>>,
}

impl<'a> ProbeContext<'a> {
    pub fn new(mesh: &'a Mesh, u: &'a [f64], material: &'a Material, models: &'a [Model]) -> Self {
        Self { mesh, u, material, models, fields: None }
    }

    pub fn fields(&mut self) -> Result<&[Vec<PointFields>], FemError> {
        if self.fields.is_none() {
            self.fields = Some(recover_fields(self.mesh, self.u, self.material, self.models)?);
        }
        Ok(self.fields.as_deref().unwrap_or_default())
    }

    fn point(&self, p: [f64; 2]) -> Result<PointFields, FemError> {
        let (e, xi, eta) = self.mesh.locate(p)?;
        evaluate_point(self.mesh, self.u, self.material, self.models[e], e, xi, eta)
    }

    pub fn evaluate(&mut self, probe: &Probe) -> Result<f64, ProbeError> {
        let name = probe.name().to_string();
        let fem = |source| ProbeError::Fem { name: name.clone(), source };
        let invalid = |message: &str| ProbeError::Invalid { name: name.clone(), message: message.into() };
        if probe.needs_fields() {
            self.fields().map_err(fem)?;
        }
        match probe {
            Probe::Displacement { at, direction, scale, .. } => {
                let u = interpolate_displacement(self.mesh, self.u, *at).map_err(fem)?;
                Ok(scale * (0..3).map(|i| direction[i] * u[i]).sum::<f64>())
            }
            Probe::Stress { at, quantity, scale, .. } => {
                Ok(scale * quantity.extract(&self.point(*at).map_err(fem)?))
            }
            Probe::Line { from, to, samples, quantity, reduction, scale, .. } => {
                if *samples == 0 {
                    return Err(invalid("samples must be positive"));
                }
                let mut values = Vec::with_capacity(*samples);
                for k in 0..*samples {
                    let s = if *samples == 1 { 0.5 } else { k as f64 / (*samples - 1) as f64 };
                    let p = [from[0] + s * (to[0] - from[0]), from[1] + s * (to[1] - from[1])];
                    values.push(quantity.extract(&self.point(p).map_err(fem)?));
                }
                let reduced = match reduction {
                    Reduction::Mean => values.iter().sum::<f64>() / values.len() as f64,
                    Reduction::MaxAbs => values.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
                };
                Ok(scale * reduced)
            }
            Probe::WrinkleBandTop { x, height, .. } => {
                let fields = self.fields.as_ref().expect("fields computed above");
                band_top(self.mesh, fields, *x).map(|h| h / height).ok_or_else(|| invalid("no element column at x"))
            }
            Probe::EdgeSlope { nodes, component, along, above_band_at, scale, .. } => {
                let mut ids = nodes.resolve(self.mesh).map_err(fem)?;
                if let Some(x) = above_band_at {
                    let fields = self.fields.as_ref().expect("fields computed above");
                    let y0 = self.mesh.nodes.iter().map(|n| n[1]).fold(f64::INFINITY, f64::min);
                    let top = band_top(self.mesh, fields, *x).ok_or_else(|| invalid("no element column at x"))?;
                    ids.retain(|&n| self.mesh.nodes[n][1] - y0 >= top);
                }
                if ids.len() < 2 {
                    // nothing taut left to fit
                    return Ok(f64::NAN);
                }
                let pts: Vec<(f64, f64)> = ids
                    .iter()
                    .map(|&n| (self.mesh.nodes[n][along.index()], self.u[3 * n + component.index()]))
                    .collect();
                let m = pts.len() as f64;
                let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / m, b + p.1 / m));
                let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
                let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
                if sxx == 0.0 {
                    return Err(invalid("nodes share one coordinate"));
                }
                Ok(scale * sxy / sxx)
            }
            Probe::Reaction { nodes, component, scale, .. } => {
                let ids = nodes.resolve(self.mesh).map_err(fem)?;
                let f = internal_force(self.mesh, self.u, self.material, self.models).map_err(fem)?;
                Ok(scale * ids.iter().map(|&n| f[3 * n + component.index()]).sum::<f64>())
            }
            Probe::WrinkledFraction { center, direction, half_width, max_distance, .. } => {
                let len = direction[0].hypot(direction[1]);
                if len == 0.0 {
                    return Err(invalid("zero direction"));
                }
                let d = [direction[0] / len, direction[1] / len];
                let (mut inside, mut wrinkled) = (0usize, 0usize);
                for f in self.fields.as_ref().expect("fields computed above").iter().flatten() {
                    let r = [f.reference_position[0] - center[0], f.reference_position[1] - center[1]];
                    let along = r[0] * d[0] + r[1] * d[1];
                    let across = r[0] * d[1] - r[1] * d[0];
                    if across.abs() <= *half_width && along.abs() <= *max_distance {
                        inside += 1;
                        wrinkled += usize::from(f.state == MembraneState::Wrinkled);
                    }
                }
                if inside == 0 {
                    return Err(invalid("band contains no quadrature points"));
                }
                Ok(wrinkled as f64 / inside as f64)
            }
        }
    }
}

/// Height of the wrinkled band, measured from the bottom of the mesh, in
/// the column of elements whose span contains `x` (nearest column if none).
fn band_top(mesh: &Mesh, fields: &[Vec<PointFields>], x: f64) -> Option<f64> {
    let column_of = |e: usize| mesh.element_centroid(e)[0];
    let nearest = (0..mesh.elements.len()).map(column_of).min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))?;
    let tol = 1e-9 * (1.0 + nearest.abs());
    // quadrature points of the column, x nearest to the probe line, sorted in y
    let mut pts: Vec<&PointFields> = (0..mesh.elements.len())
        .filter(|&e| (column_of(e) - nearest).abs() <= tol)
        .flat_map(|e| fields[e].iter())
        .collect();
    let qx = pts.iter().map(|p| p.reference_position[0]).min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))?;
    pts.retain(|p| (p.reference_position[0] - qx).abs() <= 1e-9 * (1.0 + qx.abs()));
    pts.sort_by(|a, b| a.reference_position[1].total_cmp(&b.reference_position[1]));
    let y0 = mesh.nodes.iter().map(|n| n[1]).fold(f64::INFINITY, f64::min);
    let top = pts.iter().rposition(|p| p.state == MembraneState::Wrinkled);
    Some(match top {
        None => 0.0,
        Some(i) => {
            let y = pts[i].reference_position[1];
            let y_next = pts.get(i + 1).map_or_else(
                || mesh.nodes.iter().map(|n| n[1]).fold(f64::NEG_INFINITY, f64::max),
                |p| p.reference_position[1],
            );
            0.5 * (y + y_next) - y0
        }
    })
}

/// Displacement at a reference point: the nodal value when a node sits
/// there, otherwise interpolated inside the containing element.
pub fn interpolate_displacement(mesh: &Mesh, u: &[f64], at: [f64; 2]) -> Result<[f64; 3], FemError> {
    if let Ok(nodes) = NodeSelector::At(at).resolve(mesh) {
        let n = nodes[0];
        return Ok([u[3 * n], u[3 * n + 1], u[3 * n + 2]]);
    }
    let (e, xi, eta) = mesh.locate(at)?;
    let shape = Shape2::eval(mesh.order, xi, eta);
    let mut out = [0.0; 3];
    for (k, &n) in mesh.elements[e].iter().enumerate() {
        for d in 0..3 {
            out[d] += shape.n[k] * u[3 * n + d];
        }
    }
    Ok(out)
}
