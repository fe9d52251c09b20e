//! Regularity checks on a polytopal body `K` with `o ∈ K`: where the origin
//! sits, the normal cone `N(K,o)`, the two validity conditions for the
//! spherical equation, and the set `X₀` of boundary faces whose normal cones
//! lie in `N(K,o)`.
//!
//! Verdicts assume that `K` solves the L_p Minkowski problem with a density
//! bounded between positive constants; they evaluate hypotheses and
//! conclusions on the given polytope.

use serde::Serialize;

use crate::closed_forms::{origin_cone_dim_bound, smoothness_guaranteed};
use crate::convex::{normal_cone, Cone, Face, Polytope};
use crate::error::{check_exponent, domain, Result};
use crate::solver::LpProblem;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OriginLocation {
    Interior,
    /// The smallest face containing the origin.
    Boundary { face: Face },
}

/// A boundary face with its normal cone dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceInfo {
    pub vertices: Vec<Vec<f64>>,
    pub dim: usize,
    pub normal_cone_dim: usize,
    /// (n-1)-volume, nonzero only for facets.
    pub mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    /// The conclusion concerns the idealized body and is left to the caller.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub hypothesis: bool,
    pub conclusion: Option<bool>,
    pub status: Status,
    pub note: String,
}

impl Verdict {
    fn new(name: &str, hypothesis: bool, conclusion: Option<bool>, note: String) -> Self {
        let status = match (hypothesis, conclusion) {
            (false, _) => Status::NotApplicable,
            (true, Some(true)) => Status::Pass,
            (true, Some(false)) => Status::Fail,
            (true, None) => Status::Undecided,
        };
        Verdict { name: name.to_string(), hypothesis, conclusion, status, note }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub dim: usize,
    pub p: f64,
    pub origin_location: OriginLocation,
    /// `dim N(K,o)`.
    pub origin_cone_dim: usize,
    /// The support function vanishes only on a null subset of the sphere,
    /// i.e. `dim N(K,o) < n`.
    pub zero_set_null: bool,
    /// `h_i^{1-p} A_i / f_i - 1` per problem atom; `None` where `h_i = 0`.
    pub positive_part_residuals: Option<Vec<Option<f64>>>,
    /// `S_K(N(K,o) ∩ S^{n-1}) = 0`.
    pub origin_faces_null: bool,
    /// `S_K(N(K,o) ∩ S^{n-1})`: total area of the facets through the origin.
    pub origin_face_mass: f64,
    /// Faces `F` with `N(K,F) ⊂ N(K,o)`.
    pub x0: Vec<FaceInfo>,
    /// `H^{n-1}(X₀)`.
    pub x0_mass: f64,
    /// Vertices and edges whose normal cone has dimension at least 2.
    pub non_smooth_vertices: usize,
    pub non_smooth_edges: usize,
    pub verdicts: Vec<Verdict>,
}

/// Every vertex, edge (in dimension 3) and facet with the facets containing it.
fn faces(poly: &Polytope) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for v in 0..poly.vertices().len() {
        let through: Vec<usize> =
            (0..poly.facets().len()).filter(|&i| poly.facets()[i].vertex_ids.contains(&v)).collect();
        out.push((vec![v], through));
    }
    if poly.dim() == 3 {
        for (i, j, len) in poly.ridges() {
            if len <= 0.0 {
                continue;
            }
            let shared: Vec<usize> = poly.facets()[i]
                .vertex_ids
                .iter()
                .copied()
                .filter(|v| poly.facets()[j].vertex_ids.contains(v))
                .collect();
            out.push((shared, vec![i, j]));
        }
    }
    for i in 0..poly.facets().len() {
        out.push((poly.facets()[i].vertex_ids.clone(), vec![i]));
    }
    out
}

fn origin_data(poly: &Polytope) -> Result<(Cone, Vec<usize>)> {
    let o = vec![0.0; poly.dim()];
    let cone = normal_cone(poly, &o)?;
    Ok((cone, poly.facets_through(&o)))
}

/// Builds the full report. With a problem, also the residuals on `{h > 0}`.
pub fn diagnose(poly: &Polytope, p: f64, problem: Option<&LpProblem>) -> Result<RegularityReport> {
    check_exponent(p)?;
    let n = poly.dim();
    let (cone, through) = origin_data(poly).or_else(|_| domain("the origin must belong to the body"))?;
    let tol = poly.incidence_tol();
    let origin_location = if through.is_empty() {
        OriginLocation::Interior
    } else {
        let pts: Vec<Vec<f64>> = poly
            .vertices()
            .iter()
            .enumerate()
            .filter(|(v, _)| through.iter().all(|&i| poly.facets()[i].vertex_ids.contains(v)))
            .map(|(_, z)| z.clone())
            .collect();
        OriginLocation::Boundary { face: Face::from_points(pts, tol) }
    };
    let origin_face_mass: f64 = through.iter().map(|&i| poly.facet_area(i)).sum();
    let total: f64 = (0..poly.facets().len()).map(|i| poly.facet_area(i)).sum();

    let positive_part_residuals = match problem {
        None => None,
        Some(pr) => {
            if pr.dim() != n {
                return domain("problem and body have different dimensions");
            }
            let mut out = Vec::with_capacity(pr.normals().len());
            for (u, f) in pr.normals().iter().zip(pr.targets()) {
                let r = match poly.facet_with_normal(u) {
                    Some(i) if poly.facets()[i].h > tol => {
                        Some(poly.facets()[i].h.powf(1.0 - p) * poly.facet_area(i) / f - 1.0)
                    }
                    Some(_) => None,
                    None => Some(-1.0),
                };
                out.push(r);
            }
            Some(out)
        }
    };

    let mut x0 = Vec::new();
    let mut non_smooth_vertices = 0;
    let mut non_smooth_edges = 0;
    for (verts, facets) in faces(poly) {
        let normals: Vec<Vec<f64>> = facets.iter().map(|&i| poly.facets()[i].normal.clone()).collect();
        let nc = Cone::new(n, normals);
        let fdim = n - nc.dim();
        if nc.dim() >= 2 {
            if fdim == 0 {
                non_smooth_vertices += 1;
            } else {
                non_smooth_edges += 1;
            }
        }
        if cone.dim() > 0 && nc.is_subcone_of(&cone) {
            let mass = if facets.len() == 1 { poly.facet_area(facets[0]) } else { 0.0 };
            x0.push(FaceInfo {
                vertices: verts.iter().map(|&v| poly.vertices()[v].clone()).collect(),
                dim: fdim,
                normal_cone_dim: nc.dim(),
                mass,
            });
        }
    }
    let x0_mass = x0.iter().map(|f| f.mass).sum();
    let mut report = RegularityReport {
        dim: n,
        p,
        origin_cone_dim: cone.dim(),
        zero_set_null: cone.dim() < n,
        origin_location,
        positive_part_residuals,
        origin_faces_null: origin_face_mass <= 1e-12 * total,
        origin_face_mass,
        x0,
        x0_mass,
        non_smooth_vertices,
        non_smooth_edges,
        verdicts: Vec::new(),
    };
    report.verdicts = verdicts_from(&report);
    Ok(report)
}

/// Hypothesis and conclusion of each regularity statement on this body.
pub fn theorem_verdicts(poly: &Polytope, p: f64) -> Result<Vec<Verdict>> {
    Ok(diagnose(poly, p, None)?.verdicts)
}

fn verdicts_from(r: &RegularityReport) -> Vec<Verdict> {
    let n = r.dim;
    let on_boundary = matches!(r.origin_location, OriginLocation::Boundary { .. });
    let interior = !on_boundary;
    let polytope_note = format!(
        "the polytope has {} non-smooth vertices and {} non-smooth edges; smoothness of the modeled body is left to the caller",
        r.non_smooth_vertices, r.non_smooth_edges
    );
    let bound = origin_cone_dim_bound(n);
    let mut bound_note = format!("dim N(K,o) = {} against the strict bound {bound}", r.origin_cone_dim);
    if n < 4 {
        bound_note.push_str("; the bound is stated for n ≥ 4 and is evaluated here for reference");
    }
    vec![
        Verdict::new(
            "origin_cone_at_most_n_minus_1",
            on_boundary,
            Some(r.origin_cone_dim < n),
            format!("dim N(K,o) = {}, n = {n}", r.origin_cone_dim),
        ),
        Verdict::new(
            "boundary_origin_smooth_implies_smooth",
            on_boundary && r.origin_cone_dim == 1,
            None,
            polytope_note.clone(),
        ),
        Verdict::new(
            "origin_interior_for_low_p",
            r.p <= 2.0 - n as f64,
            Some(interior),
            format!("p = {}, 2 - n = {}", r.p, 2.0 - n as f64),
        ),
        Verdict::new(
            "smooth_in_low_dimension",
            smoothness_guaranteed(n, r.p).unwrap_or(false),
            None,
            polytope_note.clone(),
        ),
        Verdict::new(
            "null_x0_implies_smooth",
            r.x0_mass == 0.0,
            None,
            format!("H^(n-1)(X0) = {}; {polytope_note}", r.x0_mass),
        ),
        Verdict::new(
            "origin_normal_cone_dimension_bound",
            on_boundary,
            Some((r.origin_cone_dim as f64) < bound),
            bound_note,
        ),
    ]
}

/// For `p ≤ 2 - n` and targets bounded below on positively spanning normals
/// the origin must be interior; any other outcome is an anomaly.
pub fn interiority_check(poly: &Polytope, p: f64, problem: &LpProblem) -> Result<Verdict> {
    check_exponent(p)?;
    let n = poly.dim();
    let applicable = p <= 2.0 - n as f64 && problem.dim() == n;
    let (_, through) = origin_data(poly).or_else(|_| domain("the origin must belong to the body"))?;
    let min_f = problem.targets().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Verdict::new(
        "origin_interior_for_low_p",
        applicable,
        Some(through.is_empty()),
        format!("p = {p}, 2 - n = {}, min target = {min_f}", 2.0 - n as f64),
    ))
}
