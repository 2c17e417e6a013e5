//! Discrete connections: one unitary per edge of a surface mesh.
//!
//! The action is the log-plaquette functional `Σ_f ‖log P_f‖² / a_f`, whose
//! critical points have exactly constant curvature density `log P_f / a_f`.

mod action;
mod build;
mod flow;
mod verify;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{expm, random_skew_hermitian, random_unitary, MatrixJson, Unitary};
use crate::mesh::{MeshJson, Step, SurfaceMesh};

pub use action::{
    curvature_spectra, curvature_spectrum_spread, face_curvature, gradient_norm,
    plaquette_holonomy, total_flux, ym_action, ym_gradient,
};
pub use build::build_ym_field_from_rep;
pub use flow::{gradient_flow, solve_sector, FlowReport, FlowStep, SectorSetup, StepPolicy};
pub use verify::{
    apply_gauge, curvature_at_basepoint, loop_holonomy, shrinking_loop_curvature,
    verify_area_property, ShrinkRow,
};

#[derive(Clone, Debug)]
pub struct GaugeField {
    mesh: Arc<SurfaceMesh>,
    n: usize,
    links: Vec<Unitary>,
}

impl GaugeField {
    pub fn new(mesh: Arc<SurfaceMesh>, links: Vec<Unitary>) -> Result<Self> {
        if links.len() != mesh.num_edges() {
            return Err(Error::SizeMismatch {
                expected: mesh.num_edges(),
                found: links.len(),
            });
        }
        let n = links
            .first()
            .map(Unitary::dim)
            .ok_or(Error::EmptyInput("field needs at least one edge"))?;
        if let Some(u) = links.iter().find(|u| u.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.dim(),
            });
        }
        Ok(GaugeField { mesh, n, links })
    }

    pub fn identity(mesh: Arc<SurfaceMesh>, n: usize) -> Self {
        let links = vec![Unitary::identity(n); mesh.num_edges()];
        GaugeField { mesh, n, links }
    }

    /// `U_e = expm(ε·X_e)` with Gaussian skew-Hermitian `X_e`.
    pub fn random<R: Rng + ?Sized>(
        mesh: Arc<SurfaceMesh>,
        n: usize,
        rng: &mut R,
        eps: f64,
    ) -> Self {
        GaugeField::identity(mesh, n).perturbed(rng, eps)
    }

    /// `U_e ← expm(ε·X_e)·U_e` with Gaussian skew-Hermitian `X_e`.
    pub fn perturbed<R: Rng + ?Sized>(&self, rng: &mut R, eps: f64) -> Self {
        let links = self
            .links
            .iter()
            .map(|u| &expm(&random_skew_hermitian(rng, self.n).scale(eps)) * u)
            .collect();
        GaugeField {
            mesh: self.mesh.clone(),
            n: self.n,
            links,
        }
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<SurfaceMesh> {
        &self.mesh
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn links(&self) -> &[Unitary] {
        &self.links
    }

    pub fn link(&self, e: usize) -> &Unitary {
        &self.links[e]
    }

    /// Transport along one step: `U_e` forwards, `U_e^*` backwards.
    pub fn step_matrix(&self, s: Step) -> Unitary {
        if s.sign > 0 {
            self.links[s.edge].clone()
        } else {
            self.links[s.edge].inverse()
        }
    }

    pub(crate) fn with_links(&self, links: Vec<Unitary>) -> Self {
        GaugeField {
            mesh: self.mesh.clone(),
            n: self.n,
            links,
        }
    }

    pub fn set_link(&mut self, e: usize, u: Unitary) -> Result<()> {
        if e >= self.links.len() {
            return Err(Error::SizeMismatch {
                expected: self.links.len(),
                found: e + 1,
            });
        }
        if u.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: u.dim(),
            });
        }
        self.links[e] = u;
        Ok(())
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            mesh: self.mesh.to_json(),
            n: self.n,
            edges: self.links.iter().map(MatrixJson::from).collect(),
        }
    }

    pub fn from_json(json: &FieldJson) -> Result<Self> {
        let mesh = Arc::new(SurfaceMesh::from_json(&json.mesh)?);
        let links = json
            .edges
            .iter()
            .map(|m| Unitary::new(m.to_matrix()?))
            .collect::<Result<Vec<_>>>()?;
        let field = GaugeField::new(mesh, links)?;
        if field.n != json.n {
            return Err(Error::DimensionMismatch {
                expected: json.n,
                found: field.n,
            });
        }
        Ok(field)
    }
}

/// Field snapshot: `{"mesh": mesh, "n": n, "edges": [matrix per edge]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub mesh: MeshJson,
    pub n: usize,
    pub edges: Vec<MatrixJson>,
}

/// A unitary at each vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeTransform {
    g: Vec<Unitary>,
}

impl GaugeTransform {
    pub fn new(g: Vec<Unitary>) -> Result<Self> {
        let n = g.first().map(Unitary::dim).ok_or(Error::EmptyInput(
            "gauge transform needs at least one vertex",
        ))?;
        if let Some(u) = g.iter().find(|u| u.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.dim(),
            });
        }
        Ok(GaugeTransform { g })
    }

    pub fn identity(num_vertices: usize, n: usize) -> Self {
        GaugeTransform {
            g: vec![Unitary::identity(n); num_vertices],
        }
    }

    /// Haar-random unitary at every vertex.
    pub fn random<R: Rng + ?Sized>(num_vertices: usize, n: usize, rng: &mut R) -> Self {
        GaugeTransform {
            g: (0..num_vertices).map(|_| random_unitary(rng, n)).collect(),
        }
    }

    pub fn values(&self) -> &[Unitary] {
        &self.g
    }

    pub fn at(&self, v: usize) -> &Unitary {
        &self.g[v]
    }
}
