//! Polytopal convex bodies in dimensions 2 and 3: support functions, faces,
//! normal cones, surface area measures and L_p area measures.
//!
//! All types are immutable after construction.

mod cone;
mod measure;
mod polytope;

pub use cone::Cone;
pub use measure::{Atom, DiscreteMeasure};
pub use polytope::{axis_box, positively_spanning, Facet, Polytope, ANGLE_TOL, INCIDENCE_TOL, UNIT_TOL};
pub(crate) use polytope::angle_between;

use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, domain, Result};
use crate::geom::{self, dot, norm};

/// A compact convex set given by its extreme points, possibly of lower
/// dimension than the ambient space (a face of a polytope, a subgradient).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub vertices: Vec<Vec<f64>>,
    /// Affine dimension of the set.
    pub dim: usize,
}

impl Face {
    /// Builds the face from a point list, removing duplicates and interior points.
    pub fn from_points(points: Vec<Vec<f64>>, tol: f64) -> Self {
        let mut uniq: Vec<Vec<f64>> = Vec::new();
        for p in points {
            if !uniq.iter().any(|q| geom::dist(q, &p) <= tol) {
                uniq.push(p);
            }
        }
        let dim = geom::affine_dim(&uniq, tol);
        let vertices = extreme_points(uniq, dim, tol);
        Face { vertices, dim }
    }

    /// Volume in the ambient dimension (zero for lower-dimensional sets).
    pub fn ambient_volume(&self) -> f64 {
        let d = self.vertices.first().map_or(0, |v| v.len());
        if self.dim < d {
            return 0.0;
        }
        match d {
            1 => {
                let (lo, hi) = self
                    .vertices
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v[0]), b.max(v[0])));
                hi - lo
            }
            2 => {
                let pts: Vec<geom::P2> = self.vertices.iter().map(|v| [v[0], v[1]]).collect();
                geom::polygon_area(&pts).abs()
            }
            _ => Polytope::from_vertices(d, &self.vertices).map_or(0.0, |p| p.volume()),
        }
    }
}

/// Orders planar point sets counterclockwise and keeps only extreme points.
fn extreme_points(points: Vec<Vec<f64>>, dim: usize, tol: f64) -> Vec<Vec<f64>> {
    let d = points.first().map_or(0, |v| v.len());
    if d == 2 && dim == 2 {
        let pts: Vec<geom::P2> = points.iter().map(|v| [v[0], v[1]]).collect();
        return geom::hull2d(&pts, tol).into_iter().map(|i| points[i].clone()).collect();
    }
    if dim == 1 {
        // Keep the two endpoints of the segment.
        let mut best = (0, 0, -1.0);
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let l = geom::dist(&points[i], &points[j]);
                if l > best.2 {
                    best = (i, j, l);
                }
            }
        }
        return vec![points[best.0].clone(), points[best.1].clone()];
    }
    points
}

/// `h_P(u) = max_z ⟨u, z⟩`.
pub fn support(p: &Polytope, u: &[f64]) -> Result<f64> {
    check_direction(p, u)?;
    Ok(p.vertices().iter().map(|z| dot(u, z)).fold(f64::NEG_INFINITY, f64::max))
}

/// The face `F(P,u) = {z ∈ P : ⟨z,u⟩ = h_P(u)}`.
pub fn face(p: &Polytope, u: &[f64]) -> Result<Face> {
    let h = support(p, u)?;
    let tol = p.incidence_tol() * norm(u);
    let pts: Vec<Vec<f64>> = p.vertices().iter().filter(|z| dot(u, z) >= h - tol).cloned().collect();
    Ok(Face::from_points(pts, p.incidence_tol()))
}

/// Normal cone `N(P,z)`, generated by the normals of the facets through `z`.
pub fn normal_cone(p: &Polytope, z: &[f64]) -> Result<Cone> {
    if z.len() != p.dim() || !p.contains(z) {
        return domain("point does not belong to the polytope");
    }
    let gens: Vec<Vec<f64>> = p.facets_through(z).into_iter().map(|i| p.facets()[i].normal.clone()).collect();
    Ok(Cone::new(p.dim(), gens))
}

/// Surface area measure: one atom per facet with the facet's (n-1)-volume.
pub fn surface_area_measure(p: &Polytope) -> DiscreteMeasure {
    let atoms = (0..p.facets().len())
        .map(|i| Atom { u: p.facets()[i].normal.clone(), w: p.facet_area(i) })
        .collect();
    DiscreteMeasure::new_unchecked(atoms)
}

/// L_p area measure `h^{1-p} dS_P` for `p < 1`; requires `o ∈ P`.
pub fn lp_area_measure(p: &Polytope, exponent: f64) -> Result<DiscreteMeasure> {
    check_exponent(exponent)?;
    if !p.contains(&vec![0.0; p.dim()]) {
        return domain("the origin must belong to the polytope");
    }
    let tol = p.incidence_tol();
    let atoms = (0..p.facets().len())
        .map(|i| {
            let f = &p.facets()[i];
            let h = if f.h <= tol { 0.0 } else { f.h };
            Atom { u: f.normal.clone(), w: h.powf(1.0 - exponent) * p.facet_area(i) }
        })
        .collect();
    Ok(DiscreteMeasure::new_unchecked(atoms))
}

fn check_direction(p: &Polytope, u: &[f64]) -> Result<()> {
    if u.len() != p.dim() {
        return domain(format!("direction must have {} components", p.dim()));
    }
    if !(norm(u) > 0.0) || u.iter().any(|x| !x.is_finite()) {
        return domain("direction must be a finite nonzero vector");
    }
    Ok(())
}
