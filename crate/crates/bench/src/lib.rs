//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use areahol_core::lattice::build_ym_field_from_rep;
use areahol_core::rep::quantized_lambda;
use areahol_core::{build_torus_mesh, GaugeField, Unitary, YangMillsRep};

/// Constant-curvature U(1) field with flux `k` on an N×N torus.
pub fn flux_field(n: usize, k: i64) -> GaugeField {
    let id = Unitary::identity(1);
    let rep = YangMillsRep::new(1, vec![id.clone()], vec![id], quantized_lambda(&[k]))
        .expect("valid shapes");
    build_ym_field_from_rep(Arc::new(build_torus_mesh(n).expect("n >= 2")), &rep)
        .expect("quantized rep")
}
