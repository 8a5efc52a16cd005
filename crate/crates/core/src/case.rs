//! JSON case files: a complete, serialisable description of one run.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constitutive::{ConstitutiveError, Material, Model};
use crate::fem::{build_rect_mesh, FemError, Load, Mesh, NodeSelector, Region, Spring};
use crate::probes::Probe;
use crate::solver::{DofConstraint, Problem, SolverConfig, StageSpec};

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("{pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error("invalid case: {0}")]
    Invalid(String),
    #[error(transparent)]
    Material(#[from] ConstitutiveError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    Rect {
        lx: f64,
        ly: f64,
        nx: usize,
        ny: usize,
        order: usize,
        #[serde(default)]
        origin: [f64; 2],
    },
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh, FemError> {
        match *self {
            MeshSpec::Rect { lx, ly, nx, ny, order, origin } => build_rect_mesh(lx, ly, nx, ny, order, origin),
        }
    }
}

/// Elements whose reference centroid lies in `region` use `model` instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOverride {
    pub region: Region,
    pub model: Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dof {
    X,
    Y,
    Z,
}

impl Dof {
    pub fn index(self) -> usize {
        match self {
            Dof::X => 0,
            Dof::Y => 1,
            Dof::Z => 2,
        }
    }
}

/// Prescribed displacement `value × factor(channel)` (plain `value` when no
/// channel is given) on the selected DOFs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub nodes: NodeSelector,
    pub dofs: Vec<Dof>,
    #[serde(default)]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
}

/// DOFs frozen at their stage-start values for one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hold {
    pub nodes: NodeSelector,
    pub dofs: Vec<Dof>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub name: String,
    pub steps: usize,
    /// Channel factors reached at the end of the stage.
    #[serde(default)]
    pub targets: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hold: Vec<Hold>,
}

/// Expected probe value at the end of a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub probe: String,
    /// Stage whose final step is compared; the last stage when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    pub value: f64,
    pub rel_tol: f64,
    #[serde(default)]
    pub source: String,
}

/// Starting displacement field of the first Newton iteration. A flat,
/// stress-free membrane has no out-of-plane stiffness, so transverse loads
/// need a curved start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialShape {
    /// `u = amplitude · (1 − (ξ² + ζ²)/2)` with `ξ, ζ ∈ [−1, 1]` spanning the
    /// mesh bounding box: a paraboloid vanishing at the four corners whose
    /// slope is nonzero everywhere except the centre.
    CornerSag { amplitude: [f64; 3] },
}

impl InitialShape {
    pub fn displacement(&self, mesh: &Mesh) -> Vec<f64> {
        let InitialShape::CornerSag { amplitude } = *self;
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &mesh.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let norm = |v: f64, k: usize| {
            let span = hi[k] - lo[k];
            if span > 0.0 {
                2.0 * (v - lo[k]) / span - 1.0
            } else {
                0.0
            }
        };
        mesh.nodes
            .iter()
            .flat_map(|p| {
                let (xi, zeta) = (norm(p[0], 0), norm(p[1], 1));
                let f = 1.0 - 0.5 * (xi * xi + zeta * zeta);
                amplitude.map(|a| a * f)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotPolicy {
    /// Field output after every step.
    #[default]
    All,
    /// Field output at the end of each stage.
    Stages,
    /// Final step only.
    Final,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Unit system note echoed into the run metadata.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub units: String,
    pub material: MaterialSpec,
    pub model: Model,
    #[serde(default)]
    pub eta: f64,
    /// Larger η values retried in order when the solve with `eta` fails.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eta_fallback: Vec<f64>,
    pub mesh: MeshSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub model_overrides: Vec<ModelOverride>,
    #[serde(default)]
    pub loads: Vec<Load>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub springs: Vec<Spring>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_shape: Option<InitialShape>,
    pub stages: Vec<Stage>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub snapshots: SnapshotPolicy,
    #[serde(default)]
    pub probes: Vec<Probe>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<Reference>,
}

/// A case turned into solver input.
#[derive(Debug, Clone)]
pub struct ResolvedCase {
    pub problem: Problem,
    pub stages: Vec<StageSpec>,
}

impl Case {
    pub fn from_json(text: &str) -> Result<Self, CaseError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let case: Case = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut tokens: Vec<String> = e
                .path()
                .iter()
                .filter_map(|seg| match seg {
                    serde_path_to_error::Segment::Seq { index } => Some(index.to_string()),
                    serde_path_to_error::Segment::Map { key } => Some(key.clone()),
                    serde_path_to_error::Segment::Enum { .. } | serde_path_to_error::Segment::Unknown => None,
                })
                .collect();
            let message = e.inner().to_string();
            // point at the missing member itself
            if let Some(field) = message.strip_prefix("missing field `").and_then(|m| m.split('`').next()) {
                tokens.push(field.to_string());
            }
            let pointer: String = tokens
                .iter()
                .map(|t| format!("/{}", t.replace('~', "~0").replace('/', "~1")))
                .collect();
            let pointer = if pointer.is_empty() { "/".to_string() } else { pointer };
            CaseError::Parse { pointer, message }
        })?;
        case.validate()?;
        Ok(case)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, CaseError> {
        let text = std::fs::read_to_string(path).map_err(|source| CaseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("case serialisation cannot fail")
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("case serialisation cannot fail"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn material(&self) -> Result<Material, ConstitutiveError> {
        Material::new(
            self.material.youngs_modulus,
            self.material.poisson_ratio,
            self.material.thickness,
            self.eta,
        )
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<(), CaseError> {
        self.material()?;
        if self.stages.is_empty() {
            return Err(CaseError::Invalid("at least one stage is required".into()));
        }
        if let Some(s) = self.stages.iter().find(|s| s.steps == 0) {
            return Err(CaseError::Invalid(format!("stage '{}' has zero steps", s.name)));
        }
        self.solver
            .validate()
            .map_err(|e| CaseError::Invalid(e.to_string()))?;
        if let Some(e) = self.eta_fallback.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(CaseError::Invalid(format!("fallback eta {e} outside [0, 1]")));
        }
        let mut names = BTreeSet::new();
        for p in &self.probes {
            if !names.insert(p.name()) {
                return Err(CaseError::Invalid(format!("duplicate probe name '{}'", p.name())));
            }
        }
        let stage_names: BTreeSet<&str> = self.stages.iter().map(|s| s.name.as_str()).collect();
        for r in &self.references {
            if !names.contains(r.probe.as_str()) {
                return Err(CaseError::Invalid(format!("reference to unknown probe '{}'", r.probe)));
            }
            if let Some(s) = &r.stage {
                if !stage_names.contains(s.as_str()) {
                    return Err(CaseError::Invalid(format!("reference to unknown stage '{s}'")));
                }
            }
        }
        Ok(())
    }

    /// Build the mesh and resolve node selectors into DOFs.
    pub fn resolve(&self) -> Result<ResolvedCase, CaseError> {
        self.validate()?;
        let mesh = self.mesh.build()?;
        let material = self.material()?;
        let models = (0..mesh.elements.len())
            .map(|e| {
                let c = mesh.element_centroid(e);
                self.model_overrides
                    .iter()
                    .rev()
                    .find(|o| o.region.contains(c))
                    .map_or(self.model, |o| o.model)
            })
            .collect();

        let mut constraints = Vec::new();
        for c in &self.constraints {
            for node in c.nodes.resolve(&mesh)? {
                for dof in &c.dofs {
                    constraints.push(DofConstraint {
                        dof: 3 * node + dof.index(),
                        value: c.value,
                        channel: c.channel.clone(),
                    });
                }
            }
        }
        // validate selectors of loads and springs up front
        for load in &self.loads {
            match load {
                Load::EdgeTraction { edge, .. } => {
                    mesh.edge(edge)?;
                }
                Load::NodalForce { nodes, .. } => {
                    nodes.resolve(&mesh)?;
                }
                _ => {}
            }
        }
        for s in &self.springs {
            s.nodes.resolve(&mesh)?;
        }
        let mut stages = Vec::new();
        for s in &self.stages {
            let mut hold = Vec::new();
            for h in &s.hold {
                for node in h.nodes.resolve(&mesh)? {
                    hold.extend(h.dofs.iter().map(|d| 3 * node + d.index()));
                }
            }
            stages.push(StageSpec {
                name: s.name.clone(),
                steps: s.steps,
                targets: s.targets.clone(),
                hold,
            });
        }
        let initial_u = self.initial_shape.map(|s| s.displacement(&mesh));
        Ok(ResolvedCase {
            problem: Problem {
                mesh,
                material,
                models,
                loads: self.loads.clone(),
                springs: self.springs.clone(),
                constraints,
                initial_u,
            },
            stages,
        })
    }
}
