//! Yang-Mills connections on closed surfaces.
//!
//! - [`lie`]: U(n) and u(n) numerics (exponential, principal logarithm, commutants).
//! - [`mesh`]: torus grids and subdivided octahedra with a normalized area form,
//!   based loops and the area they enclose.
//! - [`gamma`]: the central extension `Γ_ℝ` of the surface group by ℝ, with its
//!   area cocycle and word problem.
//! - [`rep`]: homomorphisms `Γ_ℝ → U(n)`, irreducibility, and the discrete
//!   classification on the sphere.
//! - [`lattice`]: discrete connections, the Yang-Mills action and its gradient
//!   flow, and checks that holonomy depends only on enclosed area.

pub mod error;
pub mod gamma;
pub mod lattice;
pub mod lie;
pub mod mesh;
pub mod policy;
pub mod rep;

pub use error::{Error, Result};
pub use gamma::{
    gamma_inv, gamma_mul, loop_class, word_problem, GammaRElement, Letter, SurfaceWord,
};
pub use lattice::{
    apply_gauge, build_ym_field_from_rep, curvature_spectra, face_curvature, gradient_flow,
    loop_holonomy, plaquette_holonomy, shrinking_loop_curvature, verify_area_property, ym_action,
    ym_gradient, FlowReport, GaugeField, GaugeTransform, StepPolicy,
};
pub use lie::{
    commutant_dimension, conjugacy_residual, expm, inner, logm_principal, SkewHermitian, Unitary,
};
pub use mesh::{build_sphere_mesh, build_torus_mesh, enclosed_area, MeshLoop, Step, SurfaceMesh};
pub use policy::NumericPolicy;
pub use rep::{
    enumerate_sphere_classes, evaluate, irreducible, validate_rep, ym_action_value, WeightVector,
    YangMillsRep,
};
