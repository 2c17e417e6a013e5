use std::f64::consts::PI;

use rayon::prelude::*;

use super::GaugeField;
use crate::error::Result;
use crate::lie::{inner_unchecked, logm_principal, CMatrix, SkewHermitian, Unitary};

fn step_matrices(field: &GaugeField, f: usize) -> Vec<CMatrix> {
    field
        .mesh()
        .face(f)
        .iter()
        .map(|s| {
            let u = field.link(s.edge).matrix();
            if s.sign > 0 {
                u.clone()
            } else {
                u.adjoint()
            }
        })
        .collect()
}

fn ordered_product(mats: &[CMatrix], n: usize) -> CMatrix {
    mats.iter().fold(CMatrix::identity(n, n), |acc, m| m * acc)
}

/// Product of the edge transports around face `f`, later steps on the left,
/// starting at the face's first vertex.
pub fn plaquette_holonomy(field: &GaugeField, f: usize) -> Unitary {
    Unitary::from_matrix_unchecked(ordered_product(&step_matrices(field, f), field.n()))
}

/// `logm(P_f) / a_f`.
pub fn face_curvature(field: &GaugeField, f: usize) -> Result<SkewHermitian> {
    Ok(logm_principal(&plaquette_holonomy(field, f))?.scale(1.0 / field.mesh().face_area(f)))
}

fn face_logs(field: &GaugeField) -> Result<Vec<SkewHermitian>> {
    (0..field.mesh().num_faces())
        .into_par_iter()
        .map(|f| logm_principal(&plaquette_holonomy(field, f)))
        .collect()
}

/// `Σ_f a_f ⟨F_f, F_f⟩ = Σ_f ‖log P_f‖² / a_f`.
pub fn ym_action(field: &GaugeField) -> Result<f64> {
    let logs = face_logs(field)?;
    let areas = field.mesh().face_areas();
    Ok(logs
        .iter()
        .zip(areas)
        .map(|(l, a)| inner_unchecked(l.matrix(), l.matrix()) / a)
        .sum())
}

/// Per-edge gradient `G_e` with `d/ds S(U_e ← exp(sX)U_e) = ⟨G_e, X⟩`.
///
/// With `L = log P` commuting with `P`, the derivative of `‖log P‖²` along
/// `P ← exp(sY)P` is `2⟨L, Y⟩`. A forward step at position `j` of the
/// boundary gives `Y = R X R^*` with `R` the product of the later steps; a
/// backward step gives `Y = -R' X R'^*` with `R'` including the step itself.
pub fn ym_gradient(field: &GaugeField) -> Result<Vec<SkewHermitian>> {
    let mesh = field.mesh();
    let n = field.n();
    let per_face: Vec<Vec<CMatrix>> = (0..mesh.num_faces())
        .into_par_iter()
        .map(|f| {
            let mats = step_matrices(field, f);
            let p = Unitary::from_matrix_unchecked(ordered_product(&mats, n));
            let l = logm_principal(&p)?;
            let c = 2.0 / mesh.face_area(f);
            let steps = mesh.face(f);
            let mut out = vec![CMatrix::zeros(n, n); mats.len()];
            let mut suffix = CMatrix::identity(n, n);
            for j in (0..mats.len()).rev() {
                if steps[j].sign > 0 {
                    out[j] = (suffix.adjoint() * l.matrix() * &suffix).scale(c);
                    suffix *= &mats[j];
                } else {
                    suffix *= &mats[j];
                    out[j] = (suffix.adjoint() * l.matrix() * &suffix).scale(-c);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok((0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let [(fp, jp), (fm, jm)] = mesh.edge_faces(e);
            SkewHermitian::project(&(&per_face[fp][jp] + &per_face[fm][jm]))
        })
        .collect())
}

/// `sqrt(Σ_e ⟨G_e, G_e⟩)`.
pub fn gradient_norm(grad: &[SkewHermitian]) -> f64 {
    grad.iter()
        .map(|g| inner_unchecked(g.matrix(), g.matrix()))
        .sum::<f64>()
        .sqrt()
}

/// Ascending eigenvalues `λ` of `F_f = iλ` for every face. These are gauge
/// invariant, unlike the raw curvature matrices.
pub fn curvature_spectra(field: &GaugeField) -> Result<Vec<Vec<f64>>> {
    (0..field.mesh().num_faces())
        .into_par_iter()
        .map(|f| Ok(face_curvature(field, f)?.spectrum()))
        .collect()
}

/// Largest deviation of any face's curvature spectrum from face 0's.
pub fn curvature_spectrum_spread(field: &GaugeField) -> Result<f64> {
    let spectra = curvature_spectra(field)?;
    let first = &spectra[0];
    Ok(spectra
        .iter()
        .flat_map(|s| s.iter().zip(first).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max))
}

/// `Σ_f Im tr log P_f / 2π`, an integer for any field whose plaquettes avoid
/// the branch cut.
pub fn total_flux(field: &GaugeField) -> Result<f64> {
    Ok(face_logs(field)?.iter().map(|l| l.trace().im).sum::<f64>() / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lie::{expm, random_skew_hermitian, C64};
    use crate::mesh::{build_sphere_mesh, build_torus_mesh};

    #[test]
    fn identity_field_is_flat_and_critical() {
        let field = GaugeField::identity(Arc::new(build_torus_mesh(4).unwrap()), 2);
        assert_eq!(plaquette_holonomy(&field, 3), Unitary::identity(2));
        assert_eq!(face_curvature(&field, 3).unwrap().norm(), 0.0);
        assert_eq!(ym_action(&field).unwrap(), 0.0);
        assert_eq!(gradient_norm(&ym_gradient(&field).unwrap()), 0.0);
    }

    #[test]
    fn single_edge_touches_two_faces_with_opposite_phase() {
        let mesh = Arc::new(build_torus_mesh(4).unwrap());
        let mut field = GaugeField::identity(mesh.clone(), 1);
        let e = 9;
        field.set_link(e, Unitary::from_phases(&[0.4])).unwrap();
        let [(fp, _), (fm, _)] = mesh.edge_faces(e);
        for f in 0..mesh.num_faces() {
            let z = plaquette_holonomy(&field, f).matrix()[(0, 0)];
            let expected = if f == fp {
                C64::from_polar(1.0, 0.4)
            } else if f == fm {
                C64::from_polar(1.0, -0.4)
            } else {
                C64::new(1.0, 0.0)
            };
            assert!((z - expected).norm() < 1e-15);
        }
        assert!(total_flux(&field).unwrap().abs() < 1e-14);
    }

    fn directional_derivative(field: &GaugeField, e: usize, x: &SkewHermitian, h: f64) -> f64 {
        let shifted = |s: f64| {
            let mut links = field.links().to_vec();
            links[e] = &expm(&x.scale(s)) * &links[e];
            ym_action(&field.with_links(links)).unwrap()
        };
        (shifted(h) - shifted(-h)) / (2.0 * h)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (mesh, n) in [
            (build_torus_mesh(3).unwrap(), 2),
            (build_sphere_mesh(1).unwrap(), 2),
            (build_torus_mesh(3).unwrap(), 1),
        ] {
            let field = GaugeField::random(Arc::new(mesh), n, &mut rng, 0.3);
            let grad = ym_gradient(&field).unwrap();
            for (e, g) in grad.iter().enumerate() {
                let x = random_skew_hermitian(&mut rng, n);
                let fd = directional_derivative(&field, e, &x, 1e-5);
                let exact = inner_unchecked(g.matrix(), x.matrix());
                assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                    "edge {e}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn doubling_areas_halves_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mesh = build_torus_mesh(3).unwrap();
        let field = GaugeField::random(Arc::new(mesh.clone()), 2, &mut rng, 0.3);
        let doubled = GaugeField::new(
            Arc::new(mesh.scale_areas_unchecked(2.0)),
            field.links().to_vec(),
        )
        .unwrap();
        for f in 0..9 {
            let a = face_curvature(&field, f).unwrap();
            let b = face_curvature(&doubled, f).unwrap();
            assert!(a.scale(0.5).sub(&b).norm() < 1e-14);
        }
    }

    #[test]
    fn random_u1_fields_have_integer_flux() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let field =
                GaugeField::random(Arc::new(build_torus_mesh(4).unwrap()), 1, &mut rng, 1.5);
            if let Ok(k) = total_flux(&field) {
                assert!((k - k.round()).abs() < 1e-12);
            }
        }
        let sphere = GaugeField::random(Arc::new(build_sphere_mesh(2).unwrap()), 1, &mut rng, 0.3);
        assert!(total_flux(&sphere).unwrap().abs() < 1e-12);
    }
}
