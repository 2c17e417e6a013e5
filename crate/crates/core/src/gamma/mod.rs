//! The central extension `Γ_ℝ` of the surface group, realized as the group of
//! based loops modulo homotopy-with-zero-area.
//!
//! Elements are pairs `(word, t)`: a surface-group word in a normal form and a
//! real central coordinate measured in units of total surface area. The
//! generator `J = (empty, 1)` is central and equals the relator `∏[a_i, b_i]`.
//!
//! Normal forms by genus:
//! - genus 0: empty word, `t` reduced into `(-1/2, 1/2]` (the circle ℝ/ℤ);
//! - genus 1: `a^p b^q` with the Heisenberg law `b a = J⁻¹ a b`;
//! - genus ≥ 2: Dehn-reduced words. These are not unique, so equality always
//!   goes through [`word_problem`].

mod dehn;
mod word;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{enclosed_area, period_winding, MeshLoop, SurfaceMesh};
use crate::policy::NumericPolicy;

pub use word::{clip, Letter, SurfaceWord};

use dehn::RelatorTable;

/// Representative of `t mod 1` in `(-1/2, 1/2]`.
pub fn reduce_mod_one(t: f64) -> f64 {
    t - (t - 0.5).ceil()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaRElement {
    word: SurfaceWord,
    t: f64,
}

impl GammaRElement {
    /// Normalizes an arbitrary word and central coordinate.
    pub fn new(genus: usize, letters: Vec<Letter>, t: f64) -> Result<Self> {
        let word = SurfaceWord::new(genus, letters)?;
        Ok(normalize(genus, word.letters().to_vec(), t))
    }

    pub fn identity(genus: usize) -> Self {
        GammaRElement {
            word: SurfaceWord::empty(genus),
            t: 0.0,
        }
    }

    /// `(empty, t)`; `central(g, 1.0)` is the generator `J`.
    pub fn central(genus: usize, t: f64) -> Self {
        normalize(genus, Vec::new(), t)
    }

    /// Parses the text word format and normalizes.
    pub fn parse(genus: usize, word: &str, t: f64) -> Result<Self> {
        let word = SurfaceWord::parse(genus, word)?;
        Ok(normalize(genus, word.letters().to_vec(), t))
    }

    pub fn genus(&self) -> usize {
        self.word.genus()
    }

    pub fn word(&self) -> &SurfaceWord {
        &self.word
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Exponents `(p, q)` of the genus-1 normal form `a^p b^q`.
    pub fn heisenberg_exponents(&self) -> Option<(i64, i64)> {
        (self.genus() == 1).then(|| {
            self.word.letters().iter().fold((0, 0), |(p, q), l| {
                if l.is_a() {
                    (p + l.exponent(), q)
                } else {
                    (p, q + l.exponent())
                }
            })
        })
    }

    pub fn to_json(&self) -> GammaJson {
        GammaJson {
            genus: self.genus(),
            word: self.word.to_string(),
            t: self.t,
        }
    }

    pub fn from_json(json: &GammaJson) -> Result<Self> {
        GammaRElement::parse(json.genus, &json.word, json.t)
    }
}

fn normalize(genus: usize, letters: Vec<Letter>, t: f64) -> GammaRElement {
    match genus {
        0 => {
            debug_assert!(letters.is_empty());
            GammaRElement {
                word: SurfaceWord::empty(0),
                t: reduce_mod_one(t),
            }
        }
        1 => {
            let (mut p, mut q, mut t) = (0i64, 0i64, t);
            for l in letters {
                if l.is_a() {
                    // a^p b^q · a^{±1} = J^{∓q} a^{p±1} b^q
                    t -= (q * l.exponent()) as f64;
                    p += l.exponent();
                } else {
                    q += l.exponent();
                }
            }
            GammaRElement {
                word: heisenberg_word(p, q),
                t,
            }
        }
        g => {
            let (w, shift) = RelatorTable::new(g).reduce(letters);
            GammaRElement {
                word: SurfaceWord::from_reduced(g, w),
                t: t + shift as f64,
            }
        }
    }
}

fn heisenberg_word(p: i64, q: i64) -> SurfaceWord {
    let a = if p >= 0 {
        Letter::a(1)
    } else {
        Letter::a(1).inv()
    };
    let b = if q >= 0 {
        Letter::b(1)
    } else {
        Letter::b(1).inv()
    };
    let letters = std::iter::repeat_n(a, p.unsigned_abs() as usize)
        .chain(std::iter::repeat_n(b, q.unsigned_abs() as usize))
        .collect();
    SurfaceWord::from_reduced(1, letters)
}

fn check_genus(x: &GammaRElement, y: &GammaRElement) -> Result<()> {
    if x.genus() != y.genus() {
        return Err(Error::GenusMismatch {
            left: x.genus(),
            right: y.genus(),
        });
    }
    Ok(())
}

/// Product `x · y`: concatenate, add central parts, renormalize.
pub fn gamma_mul(x: &GammaRElement, y: &GammaRElement) -> Result<GammaRElement> {
    check_genus(x, y)?;
    if let (Some((p, q)), Some((r, u))) = (x.heisenberg_exponents(), y.heisenberg_exponents()) {
        return Ok(GammaRElement {
            word: heisenberg_word(p + r, q + u),
            t: x.t + y.t - (q * r) as f64,
        });
    }
    let mut letters = x.word.letters().to_vec();
    letters.extend_from_slice(y.word.letters());
    Ok(normalize(x.genus(), letters, x.t + y.t))
}

pub fn gamma_inv(x: &GammaRElement) -> GammaRElement {
    normalize(x.genus(), x.word.inverse().letters().to_vec(), -x.t)
}

pub fn word_problem(x: &GammaRElement, y: &GammaRElement) -> Result<bool> {
    word_problem_with(x, y, &NumericPolicy::DEFAULT)
}

/// Decides `x = y` in `Γ_ℝ` by reducing `x · y⁻¹`.
pub fn word_problem_with(
    x: &GammaRElement,
    y: &GammaRElement,
    policy: &NumericPolicy,
) -> Result<bool> {
    let q = gamma_mul(x, &gamma_inv(y))?;
    let dt = if x.genus() == 0 {
        reduce_mod_one(q.t)
    } else {
        q.t
    };
    Ok(q.word.is_empty() && dt.abs() <= policy.word_t_tol)
}

/// The class of a based mesh loop in `Φ(M)/Φ_ω(M) ≅ Γ_ℝ`.
///
/// On the torus, a loop of period winding `(p, q)` is compared against the
/// standard representative `α^p · β^q`; the area between the two is the
/// central coordinate.
pub fn loop_class(mesh: &SurfaceMesh, lp: &MeshLoop) -> Result<GammaRElement> {
    lp.validate(mesh)?;
    if lp.base() != mesh.basepoint() {
        return Err(Error::BasepointMismatch {
            expected: mesh.basepoint(),
            found: lp.base(),
        });
    }
    match mesh.genus() {
        0 => Ok(GammaRElement::central(0, enclosed_area(mesh, lp)?.value)),
        1 => {
            let (p, q) = period_winding(mesh, lp);
            let standard = standard_loop(mesh, p, q)?;
            let t = enclosed_area(mesh, &lp.mul(&standard.reverse())?)?.value;
            Ok(GammaRElement {
                word: heisenberg_word(p, q),
                t,
            })
        }
        g => Err(Error::UnsupportedMesh(format!(
            "no mesh loops in genus {g}"
        ))),
    }
}

/// `α^p · β^q` through the basepoint of a torus grid.
pub fn standard_loop(mesh: &SurfaceMesh, p: i64, q: i64) -> Result<MeshLoop> {
    let (Some(alpha), Some(beta)) = (mesh.alpha_loop(), mesh.beta_loop()) else {
        return Err(Error::UnsupportedMesh(
            "period cycles need a torus grid".into(),
        ));
    };
    alpha.pow(p).mul(&beta.pow(q))
}

/// Random element with a word of `len` random letters and `t` uniform in `[-1, 1)`.
pub fn random_element<R: Rng + ?Sized>(rng: &mut R, genus: usize, len: usize) -> GammaRElement {
    let t = rng.random_range(-1.0..1.0);
    if genus == 0 {
        return GammaRElement::central(0, t);
    }
    let letters: Vec<Letter> = (0..len)
        .map(|_| {
            let h = rng.random_range(1..=genus);
            let l = if rng.random_bool(0.5) {
                Letter::a(h)
            } else {
                Letter::b(h)
            };
            if rng.random_bool(0.5) {
                l.inv()
            } else {
                l
            }
        })
        .collect();
    normalize(genus, word::free_reduce(letters), t)
}

fn format_t(t: f64) -> String {
    let s = format!("{t:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

impl fmt::Display for GammaRElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.genus() == 0 {
            write!(f, "t={} (mod 1)", format_t(self.t))
        } else if self.word.is_empty() {
            write!(f, "(empty, t={})", format_t(self.t))
        } else {
            write!(f, "{}, t={}", self.word, format_t(self.t))
        }
    }
}

/// Wire form: `{"genus": g, "word": "a1 b1^-1", "t": 0.25}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaJson {
    pub genus: usize,
    pub word: String,
    pub t: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_sphere_mesh, build_torus_mesh};

    fn el(g: usize, w: &str, t: f64) -> GammaRElement {
        GammaRElement::parse(g, w, t).unwrap()
    }

    #[test]
    fn mod_one_representative() {
        assert_eq!(reduce_mod_one(0.5), 0.5);
        assert_eq!(reduce_mod_one(-0.5), 0.5);
        assert!((reduce_mod_one(0.7) + 0.3).abs() < 1e-15);
        assert!((reduce_mod_one(2.25) - 0.25).abs() < 1e-15);
        assert_eq!(reduce_mod_one(0.0), 0.0);
    }

    #[test]
    fn heisenberg_products() {
        let a = el(1, "a", 0.0);
        let b = el(1, "b", 0.0);
        assert_eq!(gamma_mul(&a, &b).unwrap(), el(1, "a b", 0.0));
        let ba = gamma_mul(&b, &a).unwrap();
        assert_eq!(ba.word().to_string(), "a b");
        assert_eq!(ba.t(), -1.0);
        assert_eq!(el(1, "b a", 0.0), ba);
    }

    #[test]
    fn relator_is_one_unit_of_area() {
        for g in 1..=4 {
            let r = GammaRElement::new(g, SurfaceWord::relator(g).letters().to_vec(), 0.0).unwrap();
            assert!(r.word().is_empty());
            assert_eq!(r.t(), 1.0);
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(
            gamma_inv(&GammaRElement::central(2, 0.4)),
            GammaRElement::central(2, -0.4)
        );
        let x = el(0, "", 0.3);
        assert!((gamma_inv(&x).t() + 0.3).abs() < 1e-15);
        let ab = el(1, "a b", 0.0);
        let inv = gamma_inv(&ab);
        assert_eq!(inv.heisenberg_exponents(), Some((-1, -1)));
        assert_eq!(inv.t(), -1.0);
        assert_eq!(gamma_mul(&ab, &inv).unwrap(), GammaRElement::identity(1));
    }

    #[test]
    fn word_problem_examples() {
        let x = el(1, "a b", 0.0);
        assert!(word_problem(&x, &x).unwrap());
        assert!(!word_problem(&x, &el(1, "a b", 0.5)).unwrap());
        assert!(word_problem(&el(0, "", 0.2), &el(0, "", 1.2)).unwrap());
        assert!(word_problem(&x, &el(2, "", 0.0)).is_err());
    }

    #[test]
    fn display_formats() {
        assert_eq!(
            el(2, "a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1", 0.0).to_string(),
            "(empty, t=1)"
        );
        assert_eq!(el(1, "b a", 0.0).to_string(), "a b, t=-1");
        assert_eq!(el(0, "", 0.7).to_string(), "t=-0.3 (mod 1)");
        assert_eq!(el(0, "", 0.0).to_string(), "t=0 (mod 1)");
    }

    #[test]
    fn json_round_trip() {
        let x = el(3, "a1 b3^-1 a2", -0.125);
        let text = serde_json::to_string(&x.to_json()).unwrap();
        let back = GammaRElement::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert!(word_problem(&x, &back).unwrap());
        assert_eq!(back, x);
    }

    #[test]
    fn loop_classes_on_small_torus() {
        let mesh = build_torus_mesh(2).unwrap();
        let face = MeshLoop::face_boundary(&mesh, 0);
        assert_eq!(
            loop_class(&mesh, &face).unwrap(),
            GammaRElement::central(1, 0.25)
        );
        let alpha = mesh.alpha_loop().unwrap();
        assert_eq!(loop_class(&mesh, &alpha).unwrap(), el(1, "a", 0.0));
        let beta = mesh.beta_loop().unwrap();
        assert_eq!(loop_class(&mesh, &beta).unwrap(), el(1, "b", 0.0));
        let ba = beta.mul(&alpha).unwrap();
        assert_eq!(loop_class(&mesh, &ba).unwrap(), el(1, "b a", 0.0));
    }

    #[test]
    fn loop_class_on_sphere_is_area_mod_one() {
        let mesh = build_sphere_mesh(1).unwrap();
        let face = MeshLoop::face_boundary(&mesh, 3);
        assert_eq!(
            loop_class(&mesh, &face).unwrap(),
            GammaRElement::central(0, 0.125)
        );
        let far = MeshLoop::constant(2);
        assert!(matches!(
            loop_class(&mesh, &far),
            Err(Error::BasepointMismatch { .. })
        ));
    }
}
