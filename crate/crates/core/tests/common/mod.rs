#![allow(dead_code)]

use std::f64::consts::PI;

use areahol_core::lie::{
    expm, random_skew_hermitian, random_unitary, CMatrix, SkewHermitian, Unitary, C64,
};
use areahol_core::rep::YangMillsRep;
use nalgebra::Schur;
use rand::Rng;

/// Eigenvalues sorted by argument, with matching unit eigenvectors as columns.
fn sorted_eigen(u: &Unitary) -> (Vec<C64>, CMatrix) {
    let (q, t) = Schur::new(u.matrix().clone()).unpack();
    let n = u.dim();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| t[(i, i)].arg().total_cmp(&t[(j, j)].arg()));
    let vals = idx.iter().map(|&i| t[(i, i)]).collect();
    let vecs = CMatrix::from_fn(n, n, |r, c| q[(r, idx[c])]);
    (vals, vecs)
}

fn special(u: Unitary) -> Unitary {
    let det = u.matrix().determinant();
    let root = C64::from_polar(1.0, -det.arg() / 2.0);
    Unitary::from_matrix_unchecked(u.matrix().map(|z| z * root))
}

fn commutator(a: &Unitary, b: &Unitary) -> Unitary {
    &(&(a * b) * &a.inverse()) * &b.inverse()
}

/// An irreducible genus-2 rep into U(2) with `Λ = iπI`.
///
/// `A₁, B₁` are random in SU(2). With `D = -[A₁, B₁]⁻¹`, pick `A₂ = exp(θY)`
/// so that `A₂⁻¹D` and `A₂⁻¹` have equal trace (bisection on θ), then `B₂`
/// conjugates one onto the other, giving `[A₂, B₂] = D`.
pub fn genus_two_rep<R: Rng + ?Sized>(rng: &mut R) -> YangMillsRep {
    let a1 = special(random_unitary(rng, 2));
    let b1 = special(random_unitary(rng, 2));
    let d = Unitary::from_matrix_unchecked(-commutator(&a1, &b1).inverse().into_matrix());
    let y = {
        let x = random_skew_hermitian(rng, 2);
        let traceless = x.sub(&SkewHermitian::scalar(2, x.trace().im / 2.0));
        traceless.scale(1.0 / (traceless.norm() / 2f64.sqrt()))
    };
    let gap = |theta: f64| {
        let a2inv = expm(&y.scale(-theta));
        ((a2inv.matrix() * d.matrix()).trace() - a2inv.matrix().trace()).re
    };
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a2 = expm(&y.scale(0.5 * (lo + hi)));
    let (_, v) = sorted_eigen(&a2.inverse());
    let (_, w) = sorted_eigen(&Unitary::from_matrix_unchecked(
        a2.inverse().matrix() * d.matrix(),
    ));
    let b2 = Unitary::from_matrix_unchecked(w * v.adjoint());
    YangMillsRep::new(2, vec![a1, a2], vec![b1, b2], SkewHermitian::scalar(2, PI)).unwrap()
}
