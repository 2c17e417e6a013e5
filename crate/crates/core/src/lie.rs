//! Numerics for the unitary group U(n) and its Lie algebra u(n).
//!
//! Both exponential and logarithm go through an eigendecomposition rather
//! than Padé approximants: unitary matrices are normal, so the spectral route
//! keeps results unitary up to roundoff and pins the principal branch.

use std::f64::consts::PI;
use std::ops::Mul;

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// An element of u(n): an n×n skew-Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewHermitian(CMatrix);

/// An element of U(n).
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary(CMatrix);

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

/// Frobenius norm of `a - b`.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

impl SkewHermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &NumericPolicy::DEFAULT)
    }

    pub fn new_with(m: CMatrix, policy: &NumericPolicy) -> Result<Self> {
        check_square(&m)?;
        let residual = (&m + m.adjoint()).norm();
        if residual > policy.skew_tol {
            return Err(Error::NotSkewHermitian { residual });
        }
        Ok(SkewHermitian(m))
    }

    /// Wraps `m` without checking. Callers guarantee skew-Hermiticity.
    pub fn from_matrix_unchecked(m: CMatrix) -> Self {
        SkewHermitian(m)
    }

    /// Skew-Hermitian part `(m - m^*)/2` of an arbitrary square matrix.
    pub fn project(m: &CMatrix) -> Self {
        SkewHermitian((m - m.adjoint()).scale(0.5))
    }

    pub fn zeros(n: usize) -> Self {
        SkewHermitian(CMatrix::zeros(n, n))
    }

    /// The central element `iλ·I_n`.
    pub fn scalar(n: usize, lambda: f64) -> Self {
        SkewHermitian(CMatrix::from_diagonal_element(n, n, C64::new(0.0, lambda)))
    }

    /// `diag(iθ_1, …, iθ_n)`.
    pub fn from_imag_diagonal(theta: &[f64]) -> Self {
        let n = theta.len();
        SkewHermitian(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(0.0, theta[i])
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        SkewHermitian(self.0.scale(s))
    }

    pub fn add(&self, other: &SkewHermitian) -> Self {
        SkewHermitian(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SkewHermitian) -> Self {
        SkewHermitian(&self.0 - &other.0)
    }

    /// `W X W^*`.
    pub fn conjugate_by(&self, w: &Unitary) -> Self {
        SkewHermitian(&w.0 * &self.0 * w.0.adjoint())
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Eigenvalues of `X` are `iλ_k`; returns the `λ_k` in ascending order.
    pub fn spectrum(&self) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![self.0[(0, 0)].im];
        }
        let h = hermitian_from_skew(&self.0);
        let mut vals: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }
}

/// `-iX`, symmetrized so the Hermitian eigensolver sees exact symmetry.
fn hermitian_from_skew(x: &CMatrix) -> CMatrix {
    let h = x.map(|z| -I * z);
    (&h + h.adjoint()).scale(0.5)
}

impl Unitary {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with(m, &NumericPolicy::DEFAULT)
    }

    pub fn new_with(m: CMatrix, policy: &NumericPolicy) -> Result<Self> {
        let n = check_square(&m)?;
        let residual = (&m * m.adjoint() - CMatrix::identity(n, n)).norm();
        if residual > policy.unitary_tol {
            return Err(Error::NotUnitary { residual });
        }
        let det_gap = (m.clone().determinant().norm() - 1.0).abs();
        if det_gap > policy.unitary_tol {
            return Err(Error::NotUnitary { residual: det_gap });
        }
        Ok(Unitary(m))
    }

    /// Wraps `m` without checking. Callers guarantee unitarity.
    pub fn from_matrix_unchecked(m: CMatrix) -> Self {
        Unitary(m)
    }

    pub fn identity(n: usize) -> Self {
        Unitary(CMatrix::identity(n, n))
    }

    /// `diag(e^{iθ_1}, …, e^{iθ_n})`.
    pub fn from_phases(theta: &[f64]) -> Self {
        let n = theta.len();
        Unitary(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::from_polar(1.0, theta[i])
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn inverse(&self) -> Self {
        Unitary(self.0.adjoint())
    }

    /// `W U W^*`.
    pub fn conjugate_by(&self, w: &Unitary) -> Self {
        Unitary(&w.0 * &self.0 * w.0.adjoint())
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        (&self.0 * self.0.adjoint() - CMatrix::identity(n, n)).norm()
    }

    pub fn distance(&self, other: &Unitary) -> f64 {
        frobenius_distance(&self.0, &other.0)
    }

    /// Eigenvalue arguments in `(-π, π]`, ascending.
    pub fn eigen_args(&self) -> Vec<f64> {
        let mut args: Vec<f64> = unitary_eigen(&self.0)
            .0
            .iter()
            .map(|z| principal_arg(*z))
            .collect();
        args.sort_by(f64::total_cmp);
        args
    }
}

impl Mul for &Unitary {
    type Output = Unitary;

    fn mul(self, rhs: &Unitary) -> Unitary {
        Unitary(&self.0 * &rhs.0)
    }
}

impl Mul for Unitary {
    type Output = Unitary;

    fn mul(self, rhs: Unitary) -> Unitary {
        Unitary(self.0 * rhs.0)
    }
}

fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Eigenvalues and unitary eigenvectors of a normal matrix via complex Schur.
fn unitary_eigen(m: &CMatrix) -> (Vec<C64>, CMatrix) {
    let n = m.nrows();
    if is_diagonal(m) {
        return ((0..n).map(|i| m[(i, i)]).collect(), CMatrix::identity(n, n));
    }
    let (q, t) = nalgebra::Schur::new(m.clone()).unpack();
    ((0..n).map(|i| t[(i, i)]).collect(), q)
}

/// Matrix exponential of a skew-Hermitian matrix.
pub fn expm(x: &SkewHermitian) -> Unitary {
    let m = x.matrix();
    let n = m.nrows();
    if is_diagonal(m) {
        let theta: Vec<f64> = (0..n).map(|i| m[(i, i)].im).collect();
        return Unitary::from_phases(&theta);
    }
    let eig = SymmetricEigen::new(hermitian_from_skew(m));
    let v = eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, l)));
    Unitary(&v * phases * v.adjoint())
}

pub fn logm_principal(u: &Unitary) -> Result<SkewHermitian> {
    logm_principal_with(u, &NumericPolicy::DEFAULT)
}

/// Principal logarithm: eigenvalue arguments land in `(-π, π)`.
///
/// Fails with [`Error::BranchCut`] when an eigenvalue lies within
/// `policy.branch_eps` of -1.
pub fn logm_principal_with(u: &Unitary, policy: &NumericPolicy) -> Result<SkewHermitian> {
    let (vals, q) = unitary_eigen(u.matrix());
    let mut theta = Vec::with_capacity(vals.len());
    for z in vals {
        let a = z.arg();
        let gap = PI - a.abs();
        if gap < policy.branch_eps {
            return Err(Error::BranchCut { gap });
        }
        theta.push(a);
    }
    let d = SkewHermitian::from_imag_diagonal(&theta);
    if u.dim() == 1 || is_diagonal(u.matrix()) {
        return Ok(d);
    }
    Ok(SkewHermitian::project(&(&q * d.matrix() * q.adjoint())))
}

/// Invariant inner product `⟨X, Y⟩ = tr(X Y^*)`, real on u(n).
pub fn inner(x: &SkewHermitian, y: &SkewHermitian) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(inner_unchecked(x.matrix(), y.matrix()))
}

pub(crate) fn inner_unchecked(x: &CMatrix, y: &CMatrix) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .sum()
}

/// Real basis of u(n): `iE_jj`, then `E_jk - E_kj` and `i(E_jk + E_kj)` for `j < k`.
pub fn u_n_basis(n: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(n * n);
    for j in 0..n {
        let mut m = CMatrix::zeros(n, n);
        m[(j, j)] = I;
        basis.push(m);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = C64::new(1.0, 0.0);
            m[(k, j)] = C64::new(-1.0, 0.0);
            basis.push(m);
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = I;
            m[(k, j)] = I;
            basis.push(m);
        }
    }
    basis
}

pub fn commutant_dimension(mats: &[Unitary]) -> Result<usize> {
    commutant_dimension_with(mats, &NumericPolicy::DEFAULT)
}

/// Real dimension of `{X ∈ u(n) : XM = MX for every M}`.
///
/// A value of 1 means only the scalars `iλI` commute with the whole set,
/// i.e. the set acts irreducibly.
pub fn commutant_dimension_with(mats: &[Unitary], policy: &NumericPolicy) -> Result<usize> {
    let first = mats
        .first()
        .ok_or(Error::EmptyInput("commutant needs at least one matrix"))?;
    let n = first.dim();
    if let Some(bad) = mats.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let basis = u_n_basis(n);
    let block = 2 * n * n;
    let mut system = DMatrix::<f64>::zeros(block * mats.len(), basis.len());
    for (mi, m) in mats.iter().enumerate() {
        for (col, b) in basis.iter().enumerate() {
            let c = b * m.matrix() - m.matrix() * b;
            for (k, z) in c.iter().enumerate() {
                system[(mi * block + 2 * k, col)] = z.re;
                system[(mi * block + 2 * k + 1, col)] = z.im;
            }
        }
    }
    let svd = SVD::new(system, false, false);
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > policy.commutant_sv)
        .count();
    Ok(basis.len() - rank)
}

/// Largest angular gap between the sorted eigenvalue arguments of `u` and `v`.
///
/// Zero exactly when `u` and `v` are conjugate in U(n), up to roundoff.
pub fn conjugacy_residual(u: &Unitary, v: &Unitary) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let gap = u
        .eigen_args()
        .iter()
        .zip(v.eigen_args())
        .map(|(a, b)| {
            let d = (a - b).abs();
            d.min(2.0 * PI - d)
        })
        .fold(0.0, f64::max);
    Ok(gap)
}

/// Gaussian skew-Hermitian matrix: `(Z - Z^*)/2` with standard complex normal `Z`.
pub fn random_skew_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SkewHermitian {
    let z = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    SkewHermitian::project(&z)
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Unitary {
    let z = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Unitary(q)
}

/// Wire form of a complex matrix: `{"n": n, "re": [[…]], "im": [[…]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        MatrixJson {
            n,
            re: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.n;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !rows_ok(&self.re) || !rows_ok(&self.im) {
            return Err(Error::Parse(format!(
                "matrix JSON does not hold {n}x{n} arrays"
            )));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

impl From<&Unitary> for MatrixJson {
    fn from(u: &Unitary) -> Self {
        MatrixJson::from_matrix(u.matrix())
    }
}

impl From<&SkewHermitian> for MatrixJson {
    fn from(x: &SkewHermitian) -> Self {
        MatrixJson::from_matrix(x.matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Truncated Taylor series, independent of the spectral route.
    fn expm_series(x: &CMatrix, terms: usize) -> CMatrix {
        let n = x.nrows();
        let mut sum = CMatrix::identity(n, n);
        let mut term = CMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * x / c(k as f64, 0.0);
            sum += &term;
        }
        sum
    }

    #[test]
    fn expm_of_zero_is_identity() {
        assert_eq!(expm(&SkewHermitian::zeros(2)), Unitary::identity(2));
    }

    #[test]
    fn expm_euler_identity() {
        let u = expm(&SkewHermitian::scalar(1, PI));
        assert!((u.matrix()[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn expm_matches_power_series_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = random_skew_hermitian(&mut rng, 3).scale(0.7);
            let u = expm(&x);
            let series = expm_series(x.matrix(), 30);
            assert!(frobenius_distance(u.matrix(), &series) < 1e-10);
            let back = &u * &expm(&x.scale(-1.0));
            assert!(back.distance(&Unitary::identity(3)) < 1e-10);
        }
    }

    #[test]
    fn expm_stays_unitary_for_large_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=4 {
            for _ in 0..10 {
                let x = random_skew_hermitian(&mut rng, n);
                let x = x.scale(10.0 / x.norm());
                assert!(expm(&x).unitarity_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn logm_simple_cases() {
        let zero = logm_principal(&Unitary::identity(3)).unwrap();
        assert!(zero.norm() < 1e-15);
        let quarter = logm_principal(&Unitary::from_phases(&[PI / 2.0])).unwrap();
        assert!((quarter.matrix()[(0, 0)] - c(0.0, PI / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn logm_refuses_near_minus_one() {
        let err = logm_principal(&Unitary::from_phases(&[0.2, PI - 1e-10])).unwrap_err();
        assert!(matches!(err, Error::BranchCut { .. }));
        assert!(logm_principal(&Unitary::from_phases(&[PI - 1e-6])).is_ok());
    }

    #[test]
    fn logm_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=4 {
            for _ in 0..20 {
                let x = random_skew_hermitian(&mut rng, n);
                let radius = x.spectrum().iter().fold(0.0f64, |m, l| m.max(l.abs()));
                let x = x.scale(1.5 / radius.max(1e-3));
                let back = logm_principal(&expm(&x)).unwrap();
                assert!(
                    frobenius_distance(back.matrix(), x.matrix()) < 1e-10,
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn inner_product_values() {
        let x = SkewHermitian::from_imag_diagonal(&[1.0, -1.0]);
        assert!((inner(&x, &x).unwrap() - 2.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let y = random_skew_hermitian(&mut rng, 2);
        assert_eq!(inner(&SkewHermitian::zeros(2), &y).unwrap(), 0.0);
        assert!(matches!(
            inner(&x, &SkewHermitian::zeros(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inner_product_is_ad_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let x = random_skew_hermitian(&mut rng, 3);
            let y = random_skew_hermitian(&mut rng, 3);
            let w = random_unitary(&mut rng, 3);
            let lhs = inner(&x.conjugate_by(&w), &y.conjugate_by(&w)).unwrap();
            assert!((lhs - inner(&x, &y).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant_dimension(&[Unitary::identity(2)]).unwrap(), 4);
        let z = Unitary::from_phases(&[0.0, PI]);
        let j = Unitary::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap();
        assert_eq!(commutant_dimension(&[z.clone(), j]).unwrap(), 1);
        assert_eq!(
            commutant_dimension(&[Unitary::from_phases(&[0.3, 1.1])]).unwrap(),
            2
        );
        assert!(commutant_dimension(&[]).is_err());
        assert!(commutant_dimension(&[z, Unitary::identity(3)]).is_err());
    }

    #[test]
    fn commutant_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let set = vec![
            Unitary::from_phases(&[0.1, 0.1, 0.9]),
            Unitary::from_phases(&[0.4, 0.4, -1.0]),
        ];
        let w = random_unitary(&mut rng, 3);
        let conj: Vec<_> = set.iter().map(|m| m.conjugate_by(&w)).collect();
        assert_eq!(commutant_dimension(&set).unwrap(), 5);
        assert_eq!(commutant_dimension(&conj).unwrap(), 5);
    }

    #[test]
    fn conjugacy_residual_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_unitary(&mut rng, 3);
        assert!(conjugacy_residual(&u, &u).unwrap() < 1e-12);
        let w = random_unitary(&mut rng, 3);
        assert!(conjugacy_residual(&u, &u.conjugate_by(&w)).unwrap() < 1e-10);
        let gap = conjugacy_residual(
            &Unitary::identity(2),
            &Unitary::from_phases(&[PI / 2.0, 0.0]),
        )
        .unwrap();
        assert!((gap - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for n in 1..=5 {
            let u = random_unitary(&mut rng, n);
            assert!(Unitary::new(u.into_matrix()).is_ok());
        }
    }

    #[test]
    fn constructors_validate() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            Unitary::new(m.clone()),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            SkewHermitian::new(m),
            Err(Error::NotSkewHermitian { .. })
        ));
        assert!(matches!(
            Unitary::new(CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn matrix_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let u = random_unitary(&mut rng, 2);
        let text = serde_json::to_string(&MatrixJson::from(&u)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), *u.matrix());
        let bad = MatrixJson {
            n: 2,
            re: vec![vec![1.0]],
            im: vec![vec![0.0]],
        };
        assert!(bad.to_matrix().is_err());
    }
}
