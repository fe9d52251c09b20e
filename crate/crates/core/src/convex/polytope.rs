use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geom::{self, dot, norm, P2};

/// Relative tolerance for vertex-facet incidence (times the diameter).
pub const INCIDENCE_TOL: f64 = 1e-9;
/// Tolerance on the length of stored facet normals.
pub const UNIT_TOL: f64 = 1e-12;
/// Angular separation below which two normals are considered equal.
pub const ANGLE_TOL: f64 = 1e-9;

/// One facet: outward unit normal, support number and its vertex cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub h: f64,
    pub vertex_ids: Vec<usize>,
}

/// A convex polytope with nonempty interior in dimension 2 or 3, stored in
/// both vertex and facet form.
///
/// Facet vertex cycles are counterclockwise seen from outside (in the plane:
/// the two endpoints of an edge, in counterclockwise order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeWire")]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
    #[serde(skip)]
    diameter: f64,
}

#[derive(Deserialize)]
struct PolytopeWire {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
}

impl TryFrom<PolytopeWire> for Polytope {
    type Error = Error;
    fn try_from(w: PolytopeWire) -> Result<Self> {
        Polytope::from_parts(w.dim, w.vertices, w.facets)
    }
}

impl Polytope {
    /// Convex hull of a point cloud.
    pub fn from_vertices(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim)?;
        if points.iter().any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite())) {
            return domain(format!("points must be finite and {dim}-dimensional"));
        }
        let diam = geom::bbox_diameter(points);
        if diam <= 0.0 {
            return Err(Error::Degenerate("empty or single-point input".into()));
        }
        let tol = 1e-10 * diam;
        match dim {
            2 => {
                let pts: Vec<P2> = points.iter().map(|p| [p[0], p[1]]).collect();
                let hull = geom::hull2d(&pts, tol);
                if hull.len() < 3 {
                    return Err(Error::Degenerate("points are collinear".into()));
                }
                let vertices: Vec<Vec<f64>> = hull.iter().map(|&i| points[i].clone()).collect();
                let m = vertices.len();
                let facets = (0..m)
                    .map(|i| {
                        let a = &vertices[i];
                        let b = &vertices[(i + 1) % m];
                        let e = geom::sub(b, a);
                        let l = norm(&e);
                        let normal = vec![e[1] / l, -e[0] / l];
                        let h = 0.5 * (dot(&normal, a) + dot(&normal, b));
                        Facet { normal, h, vertex_ids: vec![i, (i + 1) % m] }
                    })
                    .collect();
                Self::assemble(2, vertices, facets)
            }
            _ => {
                let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
                let hull = geom::hull3d(&pts, tol)?;
                let mut remap = vec![usize::MAX; pts.len()];
                let mut vertices = Vec::new();
                for f in &hull {
                    for &i in &f.cycle {
                        if remap[i] == usize::MAX {
                            remap[i] = vertices.len();
                            vertices.push(points[i].clone());
                        }
                    }
                }
                let facets = hull
                    .into_iter()
                    .map(|f| Facet {
                        normal: f.normal.to_vec(),
                        h: f.offset,
                        vertex_ids: f.cycle.iter().map(|&i| remap[i]).collect(),
                    })
                    .collect();
                Self::assemble(3, vertices, facets)
            }
        }
    }

    /// Intersection of the half-spaces `⟨u_i, x⟩ ≤ h_i`.
    ///
    /// Normals whose half-space is redundant produce no facet. The normals
    /// must positively span the space so that the intersection is bounded.
    pub fn from_halfspaces(normals: &[Vec<f64>], h: &[f64]) -> Result<Self> {
        let dim = normals.first().map_or(0, |u| u.len());
        check_dim(dim)?;
        if normals.len() != h.len() || normals.iter().any(|u| u.len() != dim) {
            return domain("normals and support numbers disagree in shape");
        }
        let primal = if h.iter().all(|&x| x > 0.0) {
            polar_vertices(normals, h)?
        } else {
            enumerate_vertices(normals, h)?
        };
        Self::with_given_facets(dim, primal, normals, h)
    }

    /// Facets keep the given planes exactly; refitting them from the
    /// vertices is ill-conditioned for tiny facets.
    fn with_given_facets(dim: usize, vertices: Vec<Vec<f64>>, normals: &[Vec<f64>], h: &[f64]) -> Result<Self> {
        let diam = geom::bbox_diameter(&vertices);
        if vertices.len() < dim + 1 || diam <= 0.0 {
            return Err(Error::Degenerate("the half-spaces do not bound a full-dimensional body".into()));
        }
        let tol = INCIDENCE_TOL * diam;
        let mut facets = Vec::new();
        for (u, &hi) in normals.iter().zip(h) {
            let ids: Vec<usize> = (0..vertices.len()).filter(|&v| (dot(u, &vertices[v]) - hi).abs() <= tol).collect();
            if ids.len() < dim {
                continue;
            }
            let pts: Vec<Vec<f64>> = ids.iter().map(|&v| vertices[v].clone()).collect();
            if geom::affine_dim(&pts, tol) + 1 < dim {
                continue;
            }
            let frame = geom::orthonormal_complement(u);
            let coords: Vec<Vec<f64>> = pts.iter().map(|z| frame.iter().map(|b| dot(z, b)).collect()).collect();
            let vertex_ids = if dim == 2 {
                let (lo, hi_) = (0..ids.len()).fold((0, 0), |(a, b), k| {
                    (if coords[k][0] < coords[a][0] { k } else { a }, if coords[k][0] > coords[b][0] { k } else { b })
                });
                // Counterclockwise: the outward normal is the edge direction turned clockwise.
                let e = geom::sub(&vertices[ids[hi_]], &vertices[ids[lo]]);
                if e[1] * u[0] - e[0] * u[1] > 0.0 {
                    vec![ids[lo], ids[hi_]]
                } else {
                    vec![ids[hi_], ids[lo]]
                }
            } else {
                let m = coords.len() as f64;
                let c = [coords.iter().map(|x| x[0]).sum::<f64>() / m, coords.iter().map(|x| x[1]).sum::<f64>() / m];
                let mut order: Vec<usize> = (0..ids.len()).collect();
                let ang = |k: usize| (coords[k][1] - c[1]).atan2(coords[k][0] - c[0]);
                order.sort_by(|&a, &b| ang(a).total_cmp(&ang(b)));
                let mut cyc: Vec<usize> = order.into_iter().map(|k| ids[k]).collect();
                let b = geom::cross3(&frame[0], &frame[1]);
                if dot(&b, u) < 0.0 {
                    cyc.reverse();
                }
                cyc
            };
            facets.push(Facet { normal: u.clone(), h: hi, vertex_ids });
        }
        Self::assemble(dim, vertices, facets)
    }

    /// Builds from both representations and checks that they agree.
    pub fn from_parts(dim: usize, vertices: Vec<Vec<f64>>, facets: Vec<Facet>) -> Result<Self> {
        check_dim(dim)?;
        let p = Self::assemble(dim, vertices, facets)?;
        let hull = Self::from_vertices(dim, &p.vertices)?;
        if hull.vertices.len() != p.vertices.len() || hull.facets.len() != p.facets.len() {
            return Err(Error::Schema(format!(
                "vertex/facet description mismatch: hull of vertices has {} vertices and {} facets, input has {} and {}",
                hull.vertices.len(),
                hull.facets.len(),
                p.vertices.len(),
                p.facets.len()
            )));
        }
        let tol = INCIDENCE_TOL * p.diameter;
        for f in &p.facets {
            let matched = hull.facets.iter().any(|g| {
                angle_between(&f.normal, &g.normal) <= 1e-7 && (f.h - g.h).abs() <= tol
            });
            if !matched {
                return Err(Error::Schema(format!(
                    "facet with normal {:?} is not a facet of the hull of the vertices",
                    f.normal
                )));
            }
        }
        Ok(p)
    }

    fn assemble(dim: usize, vertices: Vec<Vec<f64>>, facets: Vec<Facet>) -> Result<Self> {
        let diameter = geom::bbox_diameter(&vertices);
        let p = Polytope { dim, vertices, facets, diameter };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        if self.vertices.len() < n + 1 || self.facets.len() < n + 1 {
            return Err(Error::Degenerate("too few vertices or facets".into()));
        }
        let tol = INCIDENCE_TOL * self.diameter;
        for (i, f) in self.facets.iter().enumerate() {
            if f.normal.len() != n || (norm(&f.normal) - 1.0).abs() > UNIT_TOL {
                return Err(Error::Schema(format!("facet {i}: normal is not a unit {n}-vector")));
            }
            if f.vertex_ids.len() < n || f.vertex_ids.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::Schema(format!("facet {i}: bad vertex list")));
            }
            for &v in &f.vertex_ids {
                if (dot(&f.normal, &self.vertices[v]) - f.h).abs() > tol {
                    return Err(Error::Schema(format!("facet {i}: vertex {v} off the facet plane")));
                }
            }
            for (v, z) in self.vertices.iter().enumerate() {
                if dot(&f.normal, z) > f.h + tol {
                    return Err(Error::Schema(format!("vertex {v} violates facet {i}")));
                }
            }
        }
        if !(self.volume() > 0.0) {
            return Err(Error::Degenerate("polytope has zero volume".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Bounding-box diameter, the length scale for incidence tolerances.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn incidence_tol(&self) -> f64 {
        INCIDENCE_TOL * self.diameter
    }

    /// (n-1)-volume of facet `i`.
    pub fn facet_area(&self, i: usize) -> f64 {
        let f = &self.facets[i];
        match self.dim {
            2 => geom::dist(&self.vertices[f.vertex_ids[0]], &self.vertices[f.vertex_ids[1]]),
            _ => {
                let pts: Vec<[f64; 3]> = f
                    .vertex_ids
                    .iter()
                    .map(|&v| {
                        let z = &self.vertices[v];
                        [z[0], z[1], z[2]]
                    })
                    .collect();
                let cyc: Vec<usize> = (0..pts.len()).collect();
                geom::polygon_area3(&pts, &cyc)
            }
        }
    }

    pub fn volume(&self) -> f64 {
        let n = self.dim as f64;
        (0..self.facets.len())
            .map(|i| self.facets[i].h * self.facet_area(i))
            .sum::<f64>()
            / n
    }

    /// Index of the facet whose normal matches `u` within the angular tolerance.
    pub fn facet_with_normal(&self, u: &[f64]) -> Option<usize> {
        self.facets
            .iter()
            .position(|f| angle_between(&f.normal, u) <= ANGLE_TOL.max(1e-8))
    }

    /// Whether `z` lies in the polytope up to the incidence tolerance.
    pub fn contains(&self, z: &[f64]) -> bool {
        let tol = self.incidence_tol();
        self.facets.iter().all(|f| dot(&f.normal, z) <= f.h + tol)
    }

    /// Whether the origin is an interior point (every support number exceeds the tolerance).
    pub fn origin_interior(&self) -> bool {
        let tol = self.incidence_tol();
        self.facets.iter().all(|f| f.h > tol)
    }

    /// Indices of facets containing `z`.
    pub fn facets_through(&self, z: &[f64]) -> Vec<usize> {
        let tol = self.incidence_tol();
        (0..self.facets.len())
            .filter(|&i| (dot(&self.facets[i].normal, z) - self.facets[i].h).abs() <= tol)
            .collect()
    }

    /// Pairs of facets sharing an (n-2)-face, with the (n-2)-volume of the
    /// shared face (1 for the shared vertex of two polygon edges).
    pub fn ridges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        let m = self.facets.len();
        for i in 0..m {
            for j in i + 1..m {
                let shared: Vec<usize> = self.facets[i]
                    .vertex_ids
                    .iter()
                    .copied()
                    .filter(|v| self.facets[j].vertex_ids.contains(v))
                    .collect();
                match (self.dim, shared.len()) {
                    (2, 1) => out.push((i, j, 1.0)),
                    (3, k) if k >= 2 => {
                        let pts: Vec<Vec<f64>> =
                            shared.iter().map(|&v| self.vertices[v].clone()).collect();
                        let mut len: f64 = 0.0;
                        for a in 0..pts.len() {
                            for b in a + 1..pts.len() {
                                len = len.max(geom::dist(&pts[a], &pts[b]));
                            }
                        }
                        out.push((i, j, len));
                    }
                    _ => {}
                }
            }
        }
        out
    }

    /// The polytope dilated by `s > 0` about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return domain("scale factor must be positive");
        }
        let vertices = self.vertices.iter().map(|v| geom::scale(v, s)).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet { normal: f.normal.clone(), h: f.h * s, vertex_ids: f.vertex_ids.clone() })
            .collect();
        Self::assemble(self.dim, vertices, facets)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        domain(format!("dimension {dim} not supported (only 2 and 3)"))
    }
}

pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    let c = (dot(a, b) / (na * nb)).clamp(-1.0, 1.0);
    // Use the chord for small angles: acos loses precision near 1.
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / na - y / nb).collect();
    let chord = norm(&d);
    if c > 0.5 {
        2.0 * (0.5 * chord).asin()
    } else {
        c.acos()
    }
}

/// Vertices of `{x : ⟨u_i,x⟩ ≤ h_i}` for strictly positive `h`, via the hull
/// of the polar points `u_i / h_i`.
fn polar_vertices(normals: &[Vec<f64>], h: &[f64]) -> Result<Vec<Vec<f64>>> {
    let dim = normals[0].len();
    let dual: Vec<Vec<f64>> = normals.iter().zip(h).map(|(u, &s)| geom::scale(u, 1.0 / s)).collect();
    let diam = geom::bbox_diameter(&dual);
    let tol = 1e-12 * diam.max(f64::MIN_POSITIVE);
    let unbounded = || Error::Problem("normals do not positively span the space; the intersection is unbounded".into());
    match dim {
        2 => {
            let pts: Vec<P2> = dual.iter().map(|p| [p[0], p[1]]).collect();
            let hull = geom::hull2d(&pts, tol);
            if hull.len() < 3 {
                return Err(unbounded());
            }
            let m = hull.len();
            let mut out = Vec::with_capacity(m);
            for k in 0..m {
                let a = pts[hull[k]];
                let b = pts[hull[(k + 1) % m]];
                // Edge line ⟨w, x⟩ = 1 through a and b.
                let det = a[0] * b[1] - a[1] * b[0];
                if det <= tol * diam {
                    return Err(unbounded());
                }
                out.push(vec![(b[1] - a[1]) / det, (a[0] - b[0]) / det]);
            }
            Ok(out)
        }
        _ => {
            let pts: Vec<[f64; 3]> = dual.iter().map(|p| [p[0], p[1], p[2]]).collect();
            let facets = geom::hull3d(&pts, tol).map_err(|_| unbounded())?;
            let mut out = Vec::with_capacity(facets.len());
            for f in facets {
                if f.offset <= tol {
                    return Err(unbounded());
                }
                out.push(f.normal.iter().map(|x| x / f.offset).collect());
            }
            Ok(out)
        }
    }
}

/// Brute-force vertex enumeration over all n-subsets of hyperplanes.
fn enumerate_vertices(normals: &[Vec<f64>], h: &[f64]) -> Result<Vec<Vec<f64>>> {
    let dim = normals[0].len();
    let m = normals.len();
    let scale = h.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-10 * scale;
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |x: Vec<f64>| {
        if normals.iter().zip(h).all(|(u, &s)| dot(u, &x) <= s + tol)
            && !out.iter().any(|y| geom::dist(y, &x) <= tol)
        {
            out.push(x);
        }
    };
    if dim == 2 {
        for i in 0..m {
            for j in i + 1..m {
                let (a, b) = (&normals[i], &normals[j]);
                let det = a[0] * b[1] - a[1] * b[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                push(vec![(h[i] * b[1] - h[j] * a[1]) / det, (a[0] * h[j] - b[0] * h[i]) / det]);
            }
        }
    } else {
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let (a, b, c) = (&normals[i], &normals[j], &normals[k]);
                    let bc = geom::cross3(b, c);
                    let det = dot(a, &bc);
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let ca = geom::cross3(c, a);
                    let ab = geom::cross3(a, b);
                    let x: Vec<f64> =
                        (0..3).map(|t| (h[i] * bc[t] + h[j] * ca[t] + h[k] * ab[t]) / det).collect();
                    push(x);
                }
            }
        }
    }
    if out.len() < dim + 1 {
        return Err(Error::Degenerate("half-space intersection has empty interior".into()));
    }
    // Bounded only if the normals positively span; the hull step then
    // succeeds. An unbounded intersection still has finitely many vertices, so
    // check spanning explicitly.
    if !positively_spanning(normals) {
        return Err(Error::Problem("normals do not positively span the space".into()));
    }
    Ok(out)
}

/// Whether the vectors positively span their ambient space (the origin is an
/// interior point of their convex hull).
pub fn positively_spanning(vectors: &[Vec<f64>]) -> bool {
    let Some(dim) = vectors.first().map(|v| v.len()) else { return false };
    if vectors.len() < dim + 1 {
        return false;
    }
    let tol = 1e-12;
    match dim {
        2 => {
            let pts: Vec<P2> = vectors.iter().map(|p| [p[0], p[1]]).collect();
            let hull = geom::hull2d(&pts, tol);
            if hull.len() < 3 {
                return false;
            }
            let poly: Vec<P2> = hull.iter().map(|&i| pts[i]).collect();
            let m = poly.len();
            (0..m).all(|i| geom::cross2(poly[i], poly[(i + 1) % m], [0.0, 0.0]) > tol)
        }
        3 => {
            let pts: Vec<[f64; 3]> = vectors.iter().map(|p| [p[0], p[1], p[2]]).collect();
            match geom::hull3d(&pts, tol) {
                Ok(facets) => facets.iter().all(|f| f.offset > tol),
                Err(_) => false,
            }
        }
        _ => false,
    }
}

/// Axis-aligned box `∏ [lo_k, hi_k]`.
pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Polytope> {
    let dim = lo.len();
    let mut pts = Vec::new();
    for mask in 0..(1usize << dim) {
        pts.push((0..dim).map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] }).collect());
    }
    Polytope::from_vertices(dim, &pts)
}
