//! Explicit solutions of the singular Monge-Ampère equation and the
//! dimension bounds they are sharp for.

mod facet_origin;
mod vanishing_line;

pub use facet_origin::{BodyMesh, FacetOrigin, FacetOriginEval, ProfileReport, ProfileRow};
pub use vanishing_line::{Grid, SweepRow, VanishingLine, VanishingLineEval, VerifyReport};

use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Error, Result};

/// Linear form `(a·p + b·n + c) / 2` with integer coefficients stored in the
/// fields `p`, `n` and `constant`. Identities between exponents are checked
/// on the coefficients, exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfIntegerForm {
    pub p: i64,
    pub n: i64,
    pub constant: i64,
}

impl HalfIntegerForm {
    pub fn p() -> Self {
        HalfIntegerForm { p: 2, n: 0, constant: 0 }
    }

    pub fn n() -> Self {
        HalfIntegerForm { p: 0, n: 2, constant: 0 }
    }

    pub fn constant(c: i64) -> Self {
        HalfIntegerForm { p: 0, n: 0, constant: 2 * c }
    }

    pub fn plus(self, o: Self) -> Self {
        HalfIntegerForm { p: self.p + o.p, n: self.n + o.n, constant: self.constant + o.constant }
    }

    pub fn scaled(self, k: i64) -> Self {
        HalfIntegerForm { p: k * self.p, n: k * self.n, constant: k * self.constant }
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0 && self.n == 0 && self.constant == 0
    }

    pub fn eval(&self, n: f64, p: f64) -> f64 {
        (self.p as f64 * p + self.n as f64 * n + self.constant as f64) / 2.0
    }
}

/// Lower bound `-n + 1 + 2r` on `p` for a solution vanishing on an
/// `r`-dimensional set.
pub fn zero_set_exponent_bound(n: usize, r: usize) -> Result<f64> {
    if n < 2 || r < 1 || r + 1 > n {
        return Err(Error::Domain(format!("need 1 ≤ r ≤ n - 1, got n = {n}, r = {r}")));
    }
    Ok(1.0 + 2.0 * r as f64 - n as f64)
}

/// Whether a zero set of dimension `r` is compatible with exponent `p`.
pub fn zero_set_admissible(n: usize, r: usize, p: f64) -> Result<bool> {
    Ok(p >= zero_set_exponent_bound(n, r)?)
}

/// Whether every solution body is guaranteed smooth: `n ∈ {2, 3}` or `p < 4 - n`.
pub fn smoothness_guaranteed(n: usize, p: f64) -> Result<bool> {
    check_exponent(p)?;
    if n < 2 {
        return Err(Error::Domain(format!("dimension n = {n} must be at least 2")));
    }
    Ok(n <= 3 || p < 4.0 - n as f64)
}

/// Strict upper bound `(n+1)/2` on `dim N(K,o)` when the origin is on the boundary.
pub fn origin_cone_dim_bound(n: usize) -> f64 {
    (n as f64 + 1.0) / 2.0
}
