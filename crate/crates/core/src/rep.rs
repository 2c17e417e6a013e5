//! Homomorphisms `ρ: Γ_ℝ → U(n)`.
//!
//! A rep is fixed by the images `A_i, B_i` of the surface generators and a
//! central generator `Λ ∈ u(n)` with `ρ(empty, t) = exp(tΛ)`. It is well
//! defined exactly when `∏[A_i, B_i] = exp(Λ)` and `Λ` commutes with every
//! generator image. Such reps are the holonomies of Yang-Mills connections
//! with curvature `Λ ⊗ ω`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::GammaRElement;
use crate::lie::{
    commutant_dimension_with, expm, inner, CMatrix, MatrixJson, SkewHermitian, Unitary, C64,
};
use crate::policy::NumericPolicy;

#[derive(Clone, Debug, PartialEq)]
pub struct YangMillsRep {
    genus: usize,
    n: usize,
    a: Vec<Unitary>,
    b: Vec<Unitary>,
    lambda: SkewHermitian,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepDiagnostics {
    /// `‖∏[A_i, B_i] - exp(Λ)‖_F`.
    pub relator_residual: f64,
    /// Largest `‖ΛX - XΛ‖_F` over the generator images.
    pub centrality_residual: f64,
    /// Genus 0 only: distance of the spectrum of `Λ/2πi` to the integers.
    pub quantization_residual: Option<f64>,
    pub ok: bool,
}

impl YangMillsRep {
    /// Checks shapes only; use [`validate_rep`] for the defining constraints.
    pub fn new(
        genus: usize,
        a: Vec<Unitary>,
        b: Vec<Unitary>,
        lambda: SkewHermitian,
    ) -> Result<Self> {
        let n = lambda.dim();
        for (name, list) in [("A", &a), ("B", &b)] {
            if list.len() != genus {
                return Err(Error::InvalidRep(format!(
                    "{name} has {} entries, genus is {genus}",
                    list.len()
                )));
            }
            if let Some(m) = list.iter().find(|m| m.dim() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        Ok(YangMillsRep {
            genus,
            n,
            a,
            b,
            lambda,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[Unitary] {
        &self.a
    }

    pub fn b(&self) -> &[Unitary] {
        &self.b
    }

    pub fn lambda(&self) -> &SkewHermitian {
        &self.lambda
    }

    /// Conjugates every generator image and `Λ` by `w`.
    pub fn conjugate_by(&self, w: &Unitary) -> Self {
        YangMillsRep {
            genus: self.genus,
            n: self.n,
            a: self.a.iter().map(|m| m.conjugate_by(w)).collect(),
            b: self.b.iter().map(|m| m.conjugate_by(w)).collect(),
            lambda: self.lambda.conjugate_by(w),
        }
    }

    /// Block-diagonal direct sum `ρ ⊕ σ`.
    pub fn direct_sum(&self, other: &YangMillsRep) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch {
                left: self.genus,
                right: other.genus,
            });
        }
        let sum = |x: &CMatrix, y: &CMatrix| block_diag(x, y);
        let a = self
            .a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| Unitary::from_matrix_unchecked(sum(x.matrix(), y.matrix())))
            .collect();
        let b = self
            .b
            .iter()
            .zip(&other.b)
            .map(|(x, y)| Unitary::from_matrix_unchecked(sum(x.matrix(), y.matrix())))
            .collect();
        let lambda =
            SkewHermitian::from_matrix_unchecked(sum(self.lambda.matrix(), other.lambda.matrix()));
        YangMillsRep::new(self.genus, a, b, lambda)
    }

    pub fn to_json(&self) -> RepJson {
        RepJson {
            genus: self.genus,
            n: self.n,
            a: self.a.iter().map(MatrixJson::from).collect(),
            b: self.b.iter().map(MatrixJson::from).collect(),
            lambda: MatrixJson::from(&self.lambda),
        }
    }

    pub fn from_json(json: &RepJson) -> Result<Self> {
        let unitaries = |list: &[MatrixJson]| {
            list.iter()
                .map(|m| Unitary::new(m.to_matrix()?))
                .collect::<Result<Vec<_>>>()
        };
        let rep = YangMillsRep::new(
            json.genus,
            unitaries(&json.a)?,
            unitaries(&json.b)?,
            SkewHermitian::new(json.lambda.to_matrix()?)?,
        )?;
        if rep.n != json.n {
            return Err(Error::DimensionMismatch {
                expected: json.n,
                found: rep.n,
            });
        }
        Ok(rep)
    }
}

fn block_diag(x: &CMatrix, y: &CMatrix) -> CMatrix {
    let (p, q) = (x.nrows(), y.nrows());
    let mut m = CMatrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(x);
    m.view_mut((p, p), (q, q)).copy_from(y);
    m
}

/// Wire form: `{"genus", "n", "A": [matrix…], "B": [matrix…], "Lambda": matrix}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepJson {
    pub genus: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<MatrixJson>,
    #[serde(rename = "B")]
    pub b: Vec<MatrixJson>,
    #[serde(rename = "Lambda")]
    pub lambda: MatrixJson,
}

fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y * x.adjoint() * y.adjoint()
}

/// `∏_i [A_i, B_i]` in order.
pub fn relator_image(rep: &YangMillsRep) -> Unitary {
    let n = rep.n;
    let m = rep
        .a
        .iter()
        .zip(&rep.b)
        .fold(CMatrix::identity(n, n), |acc, (a, b)| {
            acc * commutator(a.matrix(), b.matrix())
        });
    Unitary::from_matrix_unchecked(m)
}

pub fn validate_rep(rep: &YangMillsRep) -> Result<RepDiagnostics> {
    validate_rep_with(rep, &NumericPolicy::DEFAULT)
}

pub fn validate_rep_with(rep: &YangMillsRep, policy: &NumericPolicy) -> Result<RepDiagnostics> {
    let relator_residual = relator_image(rep).distance(&expm(&rep.lambda));
    let l = rep.lambda.matrix();
    let centrality_residual = rep
        .a
        .iter()
        .chain(&rep.b)
        .map(|m| (l * m.matrix() - m.matrix() * l).norm())
        .fold(0.0, f64::max);
    let quantization_residual = (rep.genus == 0).then(|| {
        rep.lambda
            .spectrum()
            .iter()
            .map(|x| (x / (2.0 * PI) - (x / (2.0 * PI)).round()).abs())
            .fold(0.0, f64::max)
    });
    let ok = relator_residual <= policy.rep_tol
        && centrality_residual <= policy.rep_tol
        && quantization_residual.is_none_or(|q| q <= policy.rep_tol);
    Ok(RepDiagnostics {
        relator_residual,
        centrality_residual,
        quantization_residual,
        ok,
    })
}

fn require_valid(rep: &YangMillsRep) -> Result<()> {
    let d = validate_rep(rep)?;
    if !d.ok {
        return Err(Error::InvalidRep(format!(
            "relator residual {:e}, centrality residual {:e}, quantization residual {:?}",
            d.relator_residual, d.centrality_residual, d.quantization_residual
        )));
    }
    Ok(())
}

/// `ρ(word, t) = ρ_free(word) · exp(tΛ)`.
pub fn evaluate(rep: &YangMillsRep, x: &GammaRElement) -> Result<Unitary> {
    require_valid(rep)?;
    if x.genus() != rep.genus {
        return Err(Error::GenusMismatch {
            left: rep.genus,
            right: x.genus(),
        });
    }
    let n = rep.n;
    let mut m = CMatrix::identity(n, n);
    for l in x.word().letters() {
        let img = if l.is_a() {
            &rep.a[l.handle() - 1]
        } else {
            &rep.b[l.handle() - 1]
        };
        if l.is_inverse() {
            m *= img.matrix().adjoint();
        } else {
            m *= img.matrix();
        }
    }
    Ok(Unitary::from_matrix_unchecked(m) * expm(&rep.lambda.scale(x.t())))
}

/// Irreducibility via the commutant of the image. For an irreducible rep the
/// curvature must be central, `Λ = iλI`; that is checked too.
pub fn irreducible(rep: &YangMillsRep) -> Result<bool> {
    require_valid(rep)?;
    let mut mats: Vec<Unitary> = rep.a.iter().chain(&rep.b).cloned().collect();
    mats.push(expm(&rep.lambda.scale(0.5)));
    let irreducible = commutant_dimension_with(&mats, &NumericPolicy::DEFAULT)? == 1;
    if irreducible {
        let n = rep.n;
        let lambda = rep.lambda.trace().im / n as f64;
        let gap = rep.lambda.sub(&SkewHermitian::scalar(n, lambda)).norm();
        if gap > NumericPolicy::DEFAULT.rep_tol {
            return Err(Error::InvalidRep(format!(
                "irreducible rep with non-central curvature (gap {gap:e})"
            )));
        }
    }
    Ok(irreducible)
}

/// Yang-Mills action `∫ ‖Λ ⊗ ω‖² = ⟨Λ, Λ⟩` on a surface of total area 1.
pub fn ym_action_value(rep: &YangMillsRep) -> Result<f64> {
    require_valid(rep)?;
    inner(&rep.lambda, &rep.lambda)
}

/// A homomorphism `U(1) → U(n)` up to conjugacy: `e^{iθ} ↦ diag(e^{ik_jθ})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct WeightVector(Vec<i64>);

impl WeightVector {
    pub fn new(k: Vec<i64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::EmptyInput("weight vector needs at least one entry"));
        }
        if k.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!(
                "weights {k:?} are not weakly decreasing"
            )));
        }
        Ok(WeightVector(k))
    }

    /// Sorts arbitrary integer weights into the canonical decreasing order.
    pub fn from_unsorted(mut k: Vec<i64>) -> Result<Self> {
        k.sort_unstable_by(|a, b| b.cmp(a));
        WeightVector::new(k)
    }

    pub fn weights(&self) -> &[i64] {
        &self.0
    }

    pub fn is_flat(&self) -> bool {
        self.0.iter().all(|k| *k == 0)
    }

    /// `4π² Σ k_j²`.
    pub fn action(&self) -> f64 {
        4.0 * PI * PI * self.0.iter().map(|k| (k * k) as f64).sum::<f64>()
    }
}

impl TryFrom<Vec<i64>> for WeightVector {
    type Error = Error;

    fn try_from(k: Vec<i64>) -> Result<Self> {
        WeightVector::new(k)
    }
}

impl From<WeightVector> for Vec<i64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// All weight vectors of length `n` with entries in `[-kmax, kmax]`,
/// lexicographically descending.
pub fn enumerate_sphere_classes(n: usize, kmax: u32) -> Vec<WeightVector> {
    fn extend(
        prefix: &mut Vec<i64>,
        n: usize,
        upper: i64,
        lower: i64,
        out: &mut Vec<WeightVector>,
    ) {
        if prefix.len() == n {
            out.push(WeightVector(prefix.clone()));
            return;
        }
        for k in (lower..=upper).rev() {
            prefix.push(k);
            extend(prefix, n, k, lower, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        extend(
            &mut Vec::with_capacity(n),
            n,
            kmax as i64,
            -(kmax as i64),
            &mut out,
        );
    }
    out
}

/// Number of size-`n` multisets from `2·kmax + 1` values: `C(n + 2·kmax, n)`.
pub fn sphere_class_count(n: usize, kmax: u32) -> u128 {
    let top = n as u128 + 2 * kmax as u128;
    (0..n as u128).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
}

/// Genus-0 rep with `Λ = 2πi·diag(k)`: the closed geodesic `t ↦ diag(e^{2πik_j t})`.
pub fn sphere_rep(k: &WeightVector) -> YangMillsRep {
    let theta: Vec<f64> = k.0.iter().map(|&kj| 2.0 * PI * kj as f64).collect();
    YangMillsRep {
        genus: 0,
        n: theta.len(),
        a: Vec::new(),
        b: Vec::new(),
        lambda: SkewHermitian::from_imag_diagonal(&theta),
    }
}

/// `Λ = 2πi·diag(k)` as a matrix, without the rep wrapper.
pub fn quantized_lambda(k: &[i64]) -> SkewHermitian {
    SkewHermitian::from_imag_diagonal(&k.iter().map(|&kj| 2.0 * PI * kj as f64).collect::<Vec<_>>())
}

/// Real `n²`-dimensional coordinates of a rep's generator images, used by tests
/// that compare reps entrywise.
pub fn flatten_images(rep: &YangMillsRep) -> DMatrix<C64> {
    let n = rep.n;
    let cols = 2 * rep.genus + 1;
    let mut m = DMatrix::zeros(n, n * cols);
    for (k, u) in rep.a.iter().chain(&rep.b).enumerate() {
        m.view_mut((0, k * n), (n, n)).copy_from(u.matrix());
    }
    m.view_mut((0, 2 * rep.genus * n), (n, n))
        .copy_from(rep.lambda.matrix());
    m
}
