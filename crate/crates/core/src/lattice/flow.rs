use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::action::{gradient_norm, ym_action, ym_gradient};
use super::build::build_ym_field_from_rep;
use super::GaugeField;
use crate::error::{Error, Result};
use crate::lie::{expm, SkewHermitian, Unitary};
use crate::mesh::SurfaceMesh;
use crate::rep::{quantized_lambda, YangMillsRep};

/// Backtracking line search for [`gradient_flow`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    /// Step tried first in every iteration. `None` uses the smallest face
    /// area over 16, about the inverse of the largest Hessian eigenvalue.
    pub initial_step: Option<f64>,
    /// Halvings allowed before the iteration gives up.
    pub max_halvings: u32,
    /// Sufficient-decrease constant `c` in `S(η) ≤ S - c·η·‖G‖²`.
    pub armijo: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            initial_step: None,
            max_halvings: 40,
            armijo: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowStep {
    pub iteration: usize,
    pub action: f64,
    pub gradient_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub iterations: usize,
    pub final_action: f64,
    pub final_gradient_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_history: Option<Vec<FlowStep>>,
}

fn descend(field: &GaugeField, grad: &[SkewHermitian], eta: f64) -> GaugeField {
    let links: Vec<Unitary> = field
        .links()
        .par_iter()
        .zip(grad.par_iter())
        .map(|(u, g)| &expm(&g.scale(-eta)) * u)
        .collect();
    field.with_links(links)
}

/// Riemannian gradient descent `U_e ← exp(-η G_e) U_e` with a backtracking
/// line search restarted from the initial step every iteration.
///
/// A trial step whose plaquettes hit the branch cut counts as a rejection.
/// Fails with [`Error::NotConverged`] when `max_iter` is reached or the line
/// search runs out of halvings.
pub fn gradient_flow(
    field: &GaugeField,
    policy: &StepPolicy,
    tol: f64,
    max_iter: usize,
    trace: bool,
) -> Result<(GaugeField, FlowReport)> {
    let eta0 = policy.initial_step.unwrap_or_else(|| {
        field
            .mesh()
            .face_areas()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            / 16.0
    });
    let mut history = trace.then(Vec::new);
    let mut current = field.clone();
    let mut action = ym_action(&current)?;
    let mut iterations = 0;
    loop {
        let grad = ym_gradient(&current)?;
        let gnorm = gradient_norm(&grad);
        if let Some(h) = history.as_mut() {
            h.push(FlowStep {
                iteration: iterations,
                action,
                gradient_norm: gnorm,
            });
        }
        let report = |iterations| FlowReport {
            iterations,
            final_action: action,
            final_gradient_norm: gnorm,
            seed: None,
            step_history: history.clone(),
        };
        if gnorm <= tol {
            return Ok((current, report(iterations)));
        }
        if iterations >= max_iter {
            return Err(Error::NotConverged(Box::new(report(iterations))));
        }
        // Roundoff in a sum of many faces can exceed the predicted decrease near convergence.
        let slack = 1e-13 * action.max(1.0);
        let mut eta = eta0;
        let mut accepted = None;
        for _ in 0..=policy.max_halvings {
            let trial = descend(&current, &grad, eta);
            if let Ok(s) = ym_action(&trial) {
                if s <= action - policy.armijo * eta * gnorm * gnorm + slack {
                    accepted = Some((trial, s));
                    break;
                }
            }
            eta *= 0.5;
        }
        let Some((next, s)) = accepted else {
            return Err(Error::NotConverged(Box::new(report(iterations))));
        };
        current = next;
        action = s;
        iterations += 1;
    }
}

/// Initial condition for [`solve_sector`].
#[derive(Clone, Debug)]
pub struct SectorSetup {
    pub mesh: Arc<SurfaceMesh>,
    pub n: usize,
    /// Topological sector: the first eigenvalue of the starting curvature is `2πk`.
    pub flux: i64,
    /// Size `ε` of the random perturbation `exp(εX)` applied to every edge.
    pub perturbation: f64,
    pub seed: u64,
}

/// Starts from the constant-curvature field with `Λ = 2πi·diag(k, 0, …)`,
/// perturbs it randomly, and flows to a critical point. The seed is recorded
/// in the report.
pub fn solve_sector(
    setup: &SectorSetup,
    policy: &StepPolicy,
    tol: f64,
    max_iter: usize,
    trace: bool,
) -> Result<(GaugeField, FlowReport)> {
    let mesh = &setup.mesh;
    let genus = mesh.genus();
    let mut weights = vec![0; setup.n];
    if let Some(w) = weights.first_mut() {
        *w = setup.flux;
    }
    let id = Unitary::identity(setup.n);
    let rep = YangMillsRep::new(
        genus,
        vec![id.clone(); genus],
        vec![id; genus],
        quantized_lambda(&weights),
    )?;
    let start = build_ym_field_from_rep(mesh.clone(), &rep)?;
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let start = start.perturbed(&mut rng, setup.perturbation);
    let with_seed = |mut r: FlowReport| {
        r.seed = Some(setup.seed);
        r
    };
    match gradient_flow(&start, policy, tol, max_iter, trace) {
        Ok((field, report)) => Ok((field, with_seed(report))),
        Err(Error::NotConverged(report)) => Err(Error::NotConverged(Box::new(with_seed(*report)))),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::lattice::action::{curvature_spectrum_spread, total_flux};
    use crate::mesh::{build_sphere_mesh, build_torus_mesh};

    fn setup(mesh: SurfaceMesh, n: usize, flux: i64, seed: u64) -> SectorSetup {
        SectorSetup {
            mesh: Arc::new(mesh),
            n,
            flux,
            perturbation: 0.3,
            seed,
        }
    }

    #[test]
    fn critical_start_needs_no_iterations() {
        let field = GaugeField::identity(Arc::new(build_torus_mesh(4).unwrap()), 2);
        let (out, report) =
            gradient_flow(&field, &StepPolicy::default(), 1e-10, 10, false).unwrap();
        assert_eq!(report.iterations, 0);
        assert_eq!(out.links(), field.links());
        assert!(report.step_history.is_none());
    }

    #[test]
    fn u1_flux_sector_reaches_its_minimum() {
        let s = setup(build_torus_mesh(8).unwrap(), 1, 1, 3);
        let (field, report) = solve_sector(&s, &StepPolicy::default(), 1e-9, 20_000, true).unwrap();
        assert!((report.final_action - 4.0 * PI * PI).abs() < 1e-6);
        assert!((total_flux(&field).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(report.seed, Some(3));
        let history = report.step_history.unwrap();
        assert_eq!(history.len(), report.iterations + 1);
        assert!(history
            .windows(2)
            .all(|w| w[1].action <= w[0].action + 1e-12));
    }

    #[test]
    fn sphere_flux_sector() {
        let s = setup(build_sphere_mesh(2).unwrap(), 1, 1, 4);
        let (field, report) =
            solve_sector(&s, &StepPolicy::default(), 1e-9, 20_000, false).unwrap();
        assert!((report.final_action - 4.0 * PI * PI).abs() < 1e-6);
        assert!(curvature_spectrum_spread(&field).unwrap() < 1e-6);
    }

    #[test]
    fn nonabelian_flow_converges_to_constant_curvature() {
        let s = setup(build_torus_mesh(6).unwrap(), 2, 0, 5);
        let (field, report) =
            solve_sector(&s, &StepPolicy::default(), 1e-9, 20_000, false).unwrap();
        assert!(report.final_gradient_norm <= 1e-9);
        assert!(curvature_spectrum_spread(&field).unwrap() < 1e-6);
    }

    #[test]
    fn exhausted_iterations_report_progress() {
        let s = setup(build_torus_mesh(4).unwrap(), 1, 1, 6);
        match solve_sector(&s, &StepPolicy::default(), 1e-14, 3, false) {
            Err(Error::NotConverged(report)) => {
                assert_eq!(report.iterations, 3);
                assert_eq!(report.seed, Some(6));
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }
}
