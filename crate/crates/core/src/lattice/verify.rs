use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::action::face_curvature;
use super::{GaugeField, GaugeTransform};
use crate::error::{Error, Result};
use crate::lie::{expm, CMatrix, SkewHermitian, Unitary};
use crate::mesh::{enclosed_area, MeshLoop};

fn path_transport(field: &GaugeField, steps: &[crate::mesh::Step]) -> CMatrix {
    let n = field.n();
    steps.iter().fold(CMatrix::identity(n, n), |acc, s| {
        let u = field.link(s.edge).matrix();
        if s.sign > 0 {
            u * acc
        } else {
            u.adjoint() * acc
        }
    })
}

/// Parallel transport around a closed loop, later steps on the left.
pub fn loop_holonomy(field: &GaugeField, lp: &MeshLoop) -> Result<Unitary> {
    lp.validate(field.mesh())?;
    Ok(Unitary::from_matrix_unchecked(path_transport(
        field,
        lp.steps(),
    )))
}

/// `U_e ← g(head)·U_e·g(tail)⁻¹`.
pub fn apply_gauge(field: &GaugeField, g: &GaugeTransform) -> Result<GaugeField> {
    let mesh = field.mesh();
    if g.values().len() != mesh.num_vertices() {
        return Err(Error::SizeMismatch {
            expected: mesh.num_vertices(),
            found: g.values().len(),
        });
    }
    if g.at(0).dim() != field.n() {
        return Err(Error::DimensionMismatch {
            expected: field.n(),
            found: g.at(0).dim(),
        });
    }
    let links = mesh
        .edges()
        .par_iter()
        .zip(field.links().par_iter())
        .map(|(&[t, h], u)| {
            Unitary::from_matrix_unchecked(
                g.at(h).matrix() * u.matrix() * g.at(t).matrix().adjoint(),
            )
        })
        .collect();
    Ok(field.with_links(links))
}

/// Curvature of face `f` transported to the basepoint frame: `T⁻¹ F_f T`
/// with `T` the transport along a shortest path from the basepoint to the
/// face's first vertex.
pub fn curvature_at_basepoint(field: &GaugeField, f: usize) -> Result<SkewHermitian> {
    let mesh = field.mesh();
    let path = crate::mesh::vertex_path(mesh, mesh.basepoint(), mesh.face_start(f));
    let t = Unitary::from_matrix_unchecked(path_transport(field, &path));
    Ok(face_curvature(field, f)?.conjugate_by(&t.inverse()))
}

/// `‖hol(ℓ₁) - exp(ΔA·Λ)·hol(ℓ₂)‖_F` with `ΔA` the area enclosed by `ℓ₁·ℓ₂⁻¹`.
pub fn verify_area_property(
    field: &GaugeField,
    loop1: &MeshLoop,
    loop2: &MeshLoop,
    lambda: &SkewHermitian,
) -> Result<f64> {
    let mesh = field.mesh();
    for lp in [loop1, loop2] {
        if lp.base() != mesh.basepoint() {
            return Err(Error::BasepointMismatch {
                expected: mesh.basepoint(),
                found: lp.base(),
            });
        }
    }
    if lambda.dim() != field.n() {
        return Err(Error::DimensionMismatch {
            expected: field.n(),
            found: lambda.dim(),
        });
    }
    let area = enclosed_area(mesh, &loop1.mul(&loop2.reverse())?)?.value;
    let h1 = loop_holonomy(field, loop1)?;
    let h2 = loop_holonomy(field, loop2)?;
    Ok(h1.distance(&(&expm(&lambda.scale(area)) * &h2)))
}

/// One row of the curvature-limit table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkRow {
    pub block: usize,
    pub area: f64,
    pub residual: f64,
}

/// `‖(H_s - I)/s - Λ‖_F` for the k×k corner blocks at the basepoint, where
/// `Λ` is the curvature of the face at that corner. On a critical field the
/// residual is `O(s)`.
pub fn shrinking_loop_curvature(field: &GaugeField, blocks: &[usize]) -> Result<Vec<ShrinkRow>> {
    let mesh = field.mesh();
    let n = mesh
        .torus_n()
        .ok_or_else(|| Error::UnsupportedMesh("shrinking loops need a torus grid".into()))?;
    if n < 4 {
        return Err(Error::MeshTooCoarse(format!("N = {n}, need N >= 4")));
    }
    let lambda = curvature_at_basepoint(field, 0)?;
    let id = CMatrix::identity(field.n(), field.n());
    blocks
        .iter()
        .map(|&k| {
            let lp = MeshLoop::corner_block(mesh, k)?;
            let area = enclosed_area(mesh, &lp)?.value;
            let h = loop_holonomy(field, &lp)?;
            let residual = ((h.matrix() - &id).scale(1.0 / area) - lambda.matrix()).norm();
            Ok(ShrinkRow {
                block: k,
                area,
                residual,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lattice::action::{plaquette_holonomy, ym_action};
    use crate::lattice::build_ym_field_from_rep;
    use crate::lie::conjugacy_residual;
    use crate::mesh::{
        build_sphere_mesh, build_torus_mesh, random_homotopic_pair, random_null_homotopic_loop,
        Step,
    };
    use crate::rep::{quantized_lambda, YangMillsRep};

    fn flux_field(n: usize, k: i64) -> GaugeField {
        let id = Unitary::identity(1);
        let rep = YangMillsRep::new(1, vec![id.clone()], vec![id], quantized_lambda(&[k])).unwrap();
        build_ym_field_from_rep(Arc::new(build_torus_mesh(n).unwrap()), &rep).unwrap()
    }

    #[test]
    fn loop_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let field = GaugeField::random(Arc::new(build_torus_mesh(4).unwrap()), 2, &mut rng, 0.5);
        let mesh = field.mesh();
        assert_eq!(
            loop_holonomy(&field, &MeshLoop::constant(0)).unwrap(),
            Unitary::identity(2)
        );
        let lp = random_null_homotopic_loop(mesh, &mut rng, 12);
        let there_and_back = lp.mul(&lp.reverse()).unwrap();
        assert!(
            loop_holonomy(&field, &there_and_back)
                .unwrap()
                .distance(&Unitary::identity(2))
                < 1e-14
        );
        let bad = MeshLoop::new(0, vec![Step::new(0, 1)]);
        assert!(loop_holonomy(&field, &bad).is_err());
    }

    #[test]
    fn face_boundary_loops_conjugate_plaquettes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let field = GaugeField::random(Arc::new(build_sphere_mesh(2).unwrap()), 2, &mut rng, 0.5);
        for f in 0..field.mesh().num_faces() {
            let h = loop_holonomy(&field, &MeshLoop::face_boundary(field.mesh(), f)).unwrap();
            assert!(conjugacy_residual(&h, &plaquette_holonomy(&field, f)).unwrap() < 1e-10);
        }
    }

    #[test]
    fn gauge_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let field = GaugeField::random(Arc::new(build_torus_mesh(4).unwrap()), 2, &mut rng, 0.5);
        let mesh = field.mesh();
        let same = apply_gauge(&field, &GaugeTransform::identity(16, 2)).unwrap();
        assert_eq!(same.links(), field.links());
        let g = GaugeTransform::random(16, 2, &mut rng);
        let moved = apply_gauge(&field, &g).unwrap();
        assert!((ym_action(&moved).unwrap() - ym_action(&field).unwrap()).abs() < 1e-10);
        let lp = random_null_homotopic_loop(mesh, &mut rng, 10);
        let h = loop_holonomy(&field, &lp).unwrap();
        let h2 = loop_holonomy(&moved, &lp).unwrap();
        assert!(h2.distance(&h.conjugate_by(g.at(mesh.basepoint()))) < 1e-12);
        for f in 0..16 {
            let start = mesh.face_start(f);
            let p = plaquette_holonomy(&field, f).conjugate_by(g.at(start));
            assert!(plaquette_holonomy(&moved, f).distance(&p) < 1e-12);
        }
        assert!(matches!(
            apply_gauge(&field, &GaugeTransform::identity(3, 2)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn area_property_on_flux_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let field = flux_field(6, 1);
        let lambda = quantized_lambda(&[1]);
        for _ in 0..20 {
            let (l1, l2) = random_homotopic_pair(field.mesh(), &mut rng, 10);
            assert!(verify_area_property(&field, &l1, &l2, &lambda).unwrap() < 1e-10);
            assert_eq!(
                verify_area_property(&field, &l1, &l1, &lambda).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn flat_fields_are_homotopy_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let field = flux_field(5, 0);
        let zero = SkewHermitian::zeros(1);
        for _ in 0..20 {
            let (l1, l2) = random_homotopic_pair(field.mesh(), &mut rng, 10);
            assert!(verify_area_property(&field, &l1, &l2, &zero).unwrap() < 1e-12);
        }
    }

    #[test]
    fn shrinking_loops() {
        let flat = flux_field(8, 0);
        assert!(shrinking_loop_curvature(&flat, &[4, 2, 1])
            .unwrap()
            .iter()
            .all(|r| r.residual < 1e-12));
        let table = shrinking_loop_curvature(&flux_field(16, 1), &[8, 4, 2, 1]).unwrap();
        for w in table.windows(2) {
            let ratio = w[0].residual / w[1].residual;
            let area_ratio = w[0].area / w[1].area;
            assert!((ratio / area_ratio - 1.0).abs() < 0.2, "{table:?}");
        }
        assert!(matches!(
            shrinking_loop_curvature(&flux_field(3, 1), &[1]),
            Err(Error::MeshTooCoarse(_))
        ));
        assert!(shrinking_loop_curvature(&flux_field(8, 1), &[8]).is_err());
    }
}
