//! From the sphere to the tangent hyperplane at a point `e`: restriction of
//! a support function and the matching transformation of the density.

use super::{Domain, PLConvexFunction, Piece};
use crate::convex::Polytope;
use crate::error::{check_exponent, domain, Result};
use crate::geom::{dot, norm, orthonormal_complement};

fn check_unit(e: &[f64]) -> Result<()> {
    if e.is_empty() || (norm(e) - 1.0).abs() > 1e-12 {
        return domain("e must be a unit vector");
    }
    Ok(())
}

/// Orthonormal basis of `e^⊥` used as coordinates on the tangent plane.
pub fn tangent_frame(e: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_unit(e)?;
    Ok(orthonormal_complement(e))
}

/// `(1 + ‖x‖²)^{-n/2}`.
pub fn radial_jacobian(x: &[f64], n: usize) -> f64 {
    (1.0 + dot(x, x)).powf(-(n as f64) / 2.0)
}

/// `g(y) = (1+‖y‖²)^{-(n+p)/2} f((e+y)/√(1+‖y‖²))` for `y ∈ e^⊥` given in
/// ambient coordinates.
pub fn transfer_density(f: impl Fn(&[f64]) -> f64, p: f64, e: &[f64], y: &[f64]) -> Result<f64> {
    check_exponent(p)?;
    check_unit(e)?;
    if y.len() != e.len() || y.iter().any(|t| !t.is_finite()) {
        return domain("y must be a finite point of the ambient space");
    }
    if dot(y, e).abs() > 1e-12 * norm(y).max(1.0) {
        return domain("y must be orthogonal to e");
    }
    let s = 1.0 + dot(y, y);
    let r = s.sqrt();
    let x: Vec<f64> = e.iter().zip(y).map(|(a, b)| (a + b) / r).collect();
    let n = e.len() as f64;
    Ok(s.powf(-(n + p) / 2.0) * f(&x))
}

/// `v(y) = h_P(y + e)` on a domain of `e^⊥`, in the coordinates of
/// [`tangent_frame`]: one affine piece `y ↦ ⟨z, y⟩ + ⟨z, e⟩` per vertex `z`.
pub fn restrict_support(poly: &Polytope, e: &[f64], dom: Domain) -> Result<PLConvexFunction> {
    let frame = tangent_frame(e)?;
    if e.len() != poly.dim() {
        return domain("e must live in the ambient space of the polytope");
    }
    if dom.dim() + 1 != poly.dim() {
        return domain("the domain must have dimension n - 1");
    }
    if !poly.contains(&vec![0.0; poly.dim()]) {
        return domain("the origin must belong to the polytope");
    }
    let pieces = poly
        .vertices()
        .iter()
        .map(|z| Piece { a: frame.iter().map(|b| dot(z, b)).collect(), b: dot(z, e) })
        .collect();
    PLConvexFunction::new(dom, pieces)
}
