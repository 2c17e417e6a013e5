use thiserror::Error;

use crate::lattice::FlowReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not skew-Hermitian (residual {residual:e})")]
    NotSkewHermitian { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    /// An eigenvalue sits within the branch tolerance of -1, so the principal
    /// logarithm is not well defined. Refine the mesh or reduce the flux.
    #[error("eigenvalue within {gap:e} of -1; principal logarithm undefined")]
    BranchCut { gap: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("unsupported mesh: {0}")]
    UnsupportedMesh(String),

    #[error("malformed loop: {0}")]
    MalformedLoop(String),

    #[error("loop is not null-homotopic (period winding ({p}, {q}))")]
    NotNullHomotopic { p: i64, q: i64 },

    #[error("loop based at vertex {found}, expected basepoint {expected}")]
    BasepointMismatch { expected: usize, found: usize },

    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: usize, right: usize },

    #[error("invalid representation: {0}")]
    InvalidRep(String),

    #[error("size mismatch: expected {expected} entries, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),

    #[error("gradient flow did not converge after {} iterations (gradient norm {:e})", .0.iterations, .0.final_gradient_norm)]
    NotConverged(Box<FlowReport>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
