//! Numeric tolerances used across the crate.
//!
//! Every threshold lives here so callers (and tests) can tighten them in one
//! place. The free functions without a `_with` suffix use [`NumericPolicy::DEFAULT`].

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericPolicy {
    /// Frobenius residual allowed in `X + X^*` for skew-Hermitian matrices.
    pub skew_tol: f64,
    /// Frobenius residual allowed in `U U^* - I`, and in `|det U| - 1`.
    pub unitary_tol: f64,
    /// Angular distance from -1 below which the principal logarithm refuses.
    pub branch_eps: f64,
    /// Singular values below this count toward the commutant null space.
    pub commutant_sv: f64,
    /// Residual allowed in the relator and centrality constraints of a rep.
    pub rep_tol: f64,
    /// Central-coordinate tolerance when deciding equality in the extended group.
    pub word_t_tol: f64,
    /// Allowed deviation of the total surface area from 1.
    pub area_sum_tol: f64,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy = NumericPolicy {
        skew_tol: 1e-12,
        unitary_tol: 1e-12,
        branch_eps: 1e-8,
        commutant_sv: 1e-9,
        rep_tol: 1e-9,
        word_t_tol: 1e-9,
        area_sum_tol: 1e-12,
    };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}
