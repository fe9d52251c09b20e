//! Piecewise-linear convex functions `v(x) = max_j (⟨a_j, x⟩ + b_j)` on a
//! bounded convex domain of dimension 1 or 2, and their Monge-Ampère
//! measures in the Alexandrov sense.
//!
//! The measure of a PL function is purely atomic: each vertex of the
//! max-subdivision carries the volume of the convex hull of the gradients
//! active there.

mod alexandrov;
mod transfer;

pub use alexandrov::{check_alexandrov, AlexandrovOptions, AlexandrovReport, CellComparison, Density};
pub use transfer::{radial_jacobian, restrict_support, tangent_frame, transfer_density};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::convex::Face;
use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::geom::{self, dot, norm, P2};

/// A bounded convex domain with nonempty interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    /// Counterclockwise convex polygon.
    Polygon(Vec<P2>),
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return domain(format!("invalid interval [{lo}, {hi}]"));
        }
        Ok(Domain::Interval { lo, hi })
    }

    /// The convex hull of `points`, which must have positive area.
    pub fn polygon(points: &[P2]) -> Result<Self> {
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return domain("domain vertices must be finite");
        }
        let poly: Vec<P2> = geom::hull2d(points, 0.0).into_iter().map(|i| points[i]).collect();
        if poly.len() < 3 || !(geom::polygon_area(&poly) > 0.0) {
            return domain("domain polygon has empty interior");
        }
        Ok(Domain::Polygon(poly))
    }

    pub fn rectangle(lo: P2, hi: P2) -> Result<Self> {
        Domain::polygon(&[lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Polygon(_) => 2,
        }
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            Domain::Interval { lo, hi } => vec![vec![*lo], vec![*hi]],
            Domain::Polygon(p) => p.iter().map(|v| v.to_vec()).collect(),
        }
    }

    pub fn diameter(&self) -> f64 {
        geom::bbox_diameter(&self.vertices())
    }

    /// Length or area.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval { lo, hi } => hi - lo,
            Domain::Polygon(p) => geom::polygon_area(p),
        }
    }

    /// Closed membership with absolute tolerance.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Domain::Interval { lo, hi } => x.len() == 1 && x[0] >= lo - tol && x[0] <= hi + tol,
            Domain::Polygon(p) => x.len() == 2 && geom::in_convex_polygon(p, [x[0], x[1]], tol),
        }
    }

    /// Half-spaces `⟨w, x⟩ ≤ c` whose intersection is the domain.
    pub fn halfspaces(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            Domain::Interval { lo, hi } => vec![(vec![1.0], *hi), (vec![-1.0], -lo)],
            Domain::Polygon(p) => (0..p.len())
                .map(|i| {
                    let a = p[i];
                    let b = p[(i + 1) % p.len()];
                    let w = [b[1] - a[1], a[0] - b[0]];
                    let l = w[0].hypot(w[1]);
                    let w = vec![w[0] / l, w[1] / l];
                    let c = w[0] * a[0] + w[1] * a[1];
                    (w, c)
                })
                .collect(),
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for Domain {
    type Error = Error;
    fn try_from(pts: Vec<Vec<f64>>) -> Result<Self> {
        if pts.len() == 2 && pts.iter().all(|p| p.len() == 1) {
            return Domain::interval(pts[0][0].min(pts[1][0]), pts[0][0].max(pts[1][0]));
        }
        if pts.len() >= 3 && pts.iter().all(|p| p.len() == 2) {
            let p2: Vec<P2> = pts.iter().map(|p| [p[0], p[1]]).collect();
            return Domain::polygon(&p2);
        }
        Err(Error::Schema("domain must be two 1-point coordinates or at least three planar points".into()))
    }
}

impl From<Domain> for Vec<Vec<f64>> {
    fn from(d: Domain) -> Self {
        d.vertices()
    }
}

/// The affine function `x ↦ ⟨a, x⟩ + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Piece {
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) + self.b
    }
}

/// Closed cell of the max-subdivision where a given piece attains the max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub piece: usize,
    /// Counterclockwise polygon, or the two endpoints in dimension 1.
    pub region: Vec<Vec<f64>>,
    pub volume: f64,
}

/// Vertex of the max-subdivision with its subgradient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vertex {
    pub point: Vec<f64>,
    pub value: f64,
    pub active: Vec<usize>,
    pub image: Face,
    /// Volume of the subgradient image.
    pub mass: f64,
}

/// The set `{v = 0}` of a nonnegative function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSet {
    pub vertices: Vec<Vec<f64>>,
    pub dim: usize,
}

/// Region in the domain, used to evaluate the Monge-Ampère measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Points { points: Vec<Vec<f64>> },
    /// Closed convex polygon; vertex order is irrelevant.
    Polygon { vertices: Vec<P2> },
    Interval { lo: f64, hi: f64 },
    /// Points `y` whose lift `(y, 1)` makes an angle of at most
    /// `acos(min_cos)` with `axis ∈ ℝ^{d+1}`: the central projection of a
    /// spherical cap in the open upper hemisphere.
    Cap { axis: Vec<f64>, min_cos: f64 },
    Union { parts: Vec<Region> },
}

impl Region {
    pub fn point(x: Vec<f64>) -> Self {
        Region::Points { points: vec![x] }
    }

    fn normalized(&self) -> Region {
        match self {
            Region::Polygon { vertices } => {
                let idx = geom::hull2d(vertices, 0.0);
                Region::Polygon { vertices: idx.into_iter().map(|i| vertices[i]).collect() }
            }
            Region::Cap { axis, min_cos } => {
                Region::Cap { axis: geom::normalized(axis).unwrap_or_else(|| axis.clone()), min_cos: *min_cos }
            }
            Region::Union { parts } => Region::Union { parts: parts.iter().map(Region::normalized).collect() },
            r => r.clone(),
        }
    }

    fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Region::Points { points } => points.iter().any(|p| geom::dist(p, x) <= tol),
            Region::Polygon { vertices } => x.len() == 2 && geom::in_convex_polygon(vertices, [x[0], x[1]], tol),
            Region::Interval { lo, hi } => x.len() == 1 && x[0] >= lo - tol && x[0] <= hi + tol,
            Region::Cap { axis, min_cos } => {
                let mut lift = x.to_vec();
                lift.push(1.0);
                let l = norm(&lift);
                dot(axis, &lift) >= (min_cos - 1e-12) * l
            }
            Region::Union { parts } => parts.iter().any(|r| r.contains(x, tol)),
        }
    }

    fn within(&self, dom: &Domain, tol: f64) -> Result<()> {
        let d = dom.dim();
        let inside = |x: &[f64]| x.len() == d && dom.contains(x, tol);
        let ok = match self {
            Region::Points { points } => points.iter().all(|x| inside(x)),
            Region::Polygon { vertices } => d == 2 && vertices.iter().all(|v| inside(v)),
            Region::Interval { lo, hi } => d == 1 && lo <= hi && inside(&[*lo]) && inside(&[*hi]),
            Region::Cap { axis, min_cos } => {
                if axis.len() != d + 1 || !(*min_cos > -1.0 && *min_cos <= 1.0) {
                    false
                } else {
                    let rho = min_cos.acos();
                    let mut up = vec![0.0; d + 1];
                    up[d] = 1.0;
                    let in_hemisphere = crate::convex::angle_between(axis, &up) + rho < std::f64::consts::FRAC_PI_2;
                    // max of ⟨W, ·⟩ over the cap is nonpositive iff the angle
                    // between W and the axis is at least ρ + π/2.
                    let bounded = dom.halfspaces().into_iter().all(|(w, c)| {
                        let mut big = w;
                        big.push(-c);
                        crate::convex::angle_between(&big, axis) >= rho + std::f64::consts::FRAC_PI_2 - 1e-12
                    });
                    in_hemisphere && bounded
                }
            }
            Region::Union { parts } => return parts.iter().try_for_each(|r| r.within(dom, tol)),
        };
        if ok {
            Ok(())
        } else {
            domain("region is not contained in the domain of the function")
        }
    }
}

/// One entry of the cell list of [`MAReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MACell {
    pub region: Vec<Vec<f64>>,
    pub image: Face,
    pub image_volume: f64,
}

/// Subdivision cells (point images) followed by the atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MAReport {
    pub cells: Vec<MACell>,
    pub total_mass: f64,
    pub zero_set: Option<ZeroSet>,
}

#[derive(Serialize, Deserialize)]
struct PlWire {
    domain: Domain,
    pieces: Vec<Piece>,
}

/// `v(x) = max_j (⟨a_j, x⟩ + b_j)` on a bounded convex domain. Pieces that
/// are nowhere the max (up to a null set) are pruned on construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PlWire", into = "PlWire")]
pub struct PLConvexFunction {
    domain: Domain,
    pieces: Vec<Piece>,
    cells: Vec<Cell>,
    vertices: Vec<Vertex>,
    active_tol: f64,
    point_tol: f64,
    gradient_tol: f64,
}

impl TryFrom<PlWire> for PLConvexFunction {
    type Error = Error;
    fn try_from(w: PlWire) -> Result<Self> {
        PLConvexFunction::new(w.domain, w.pieces)
    }
}

impl From<PLConvexFunction> for PlWire {
    fn from(v: PLConvexFunction) -> Self {
        PlWire { domain: v.domain, pieces: v.pieces }
    }
}

impl PLConvexFunction {
    pub fn new(domain: Domain, pieces: Vec<Piece>) -> Result<Self> {
        Self::with_exec(domain, pieces, Exec::default())
    }

    /// Max of the tangent planes of a differentiable convex function at the
    /// given `(point, value, gradient)` samples.
    pub fn from_tangent_planes(domain: Domain, samples: &[(Vec<f64>, f64, Vec<f64>)]) -> Result<Self> {
        let pieces = samples
            .iter()
            .map(|(x, v, g)| Piece { a: g.clone(), b: v - dot(g, x) })
            .collect();
        Self::new(domain, pieces)
    }

    pub fn with_exec(domain: Domain, pieces: Vec<Piece>, exec: Exec) -> Result<Self> {
        let d = domain.dim();
        if pieces.is_empty() {
            return domain_err("at least one affine piece is required");
        }
        for p in &pieces {
            if p.a.len() != d {
                return domain_err(&format!("piece gradients must have {d} components"));
            }
            if !p.b.is_finite() || p.a.iter().any(|x| !x.is_finite()) {
                return domain_err("piece coefficients must be finite");
            }
        }
        let verts = domain.vertices();
        let radius = verts.iter().map(|v| norm(v)).fold(0.0, f64::max);
        let scale = pieces.iter().map(|p| norm(&p.a) * radius + p.b.abs()).fold(1.0, f64::max);
        let grad_scale = pieces.iter().map(|p| norm(&p.a)).fold(1.0, f64::max);
        let active_tol = 1e-9 * scale;
        let point_tol = 1e-9 * domain.diameter();
        let gradient_tol = 1e-12 * grad_scale;

        let raw = exec.map_range(pieces.len(), |j| cell_region(&domain, &pieces, j));
        let min_volume = 1e-13 * domain.measure();
        let mut kept = Vec::new();
        let mut cells = Vec::new();
        for (j, (region, volume)) in raw.into_iter().enumerate() {
            if volume > min_volume {
                cells.push(Cell { piece: kept.len(), region, volume });
                kept.push(pieces[j].clone());
            }
        }
        if kept.is_empty() {
            return domain_err("no piece is active on a set of positive measure");
        }
        let mut f = PLConvexFunction {
            domain,
            pieces: kept,
            cells,
            vertices: Vec::new(),
            active_tol,
            point_tol,
            gradient_tol,
        };
        f.vertices = f.subdivision_vertices(exec);
        Ok(f)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// All vertices of the max-subdivision, including domain corners.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Vertices carrying positive Monge-Ampère mass.
    pub fn atoms(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(|v| v.mass > 0.0)
    }

    /// Tolerance on values below which a piece counts as active.
    pub fn active_tol(&self) -> f64 {
        self.active_tol
    }

    pub fn point_tol(&self) -> f64 {
        self.point_tol
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.vertices.iter().map(|v| v.value).fold(f64::INFINITY, f64::min)
    }

    fn active_at(&self, x: &[f64]) -> (f64, Vec<usize>) {
        let vals: Vec<f64> = self.pieces.iter().map(|p| p.eval(x)).collect();
        let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let act = (0..vals.len()).filter(|&j| m - vals[j] <= self.active_tol).collect();
        (m, act)
    }

    fn image_of(&self, active: &[usize]) -> Face {
        Face::from_points(active.iter().map(|&j| self.pieces[j].a.clone()).collect(), self.gradient_tol)
    }

    /// `∂v(x)`: the convex hull of the gradients active at `x`.
    pub fn subgradient(&self, x: &[f64]) -> Result<Face> {
        if x.len() != self.dim() || !self.domain.contains(x, self.point_tol) {
            return domain("point lies outside the domain");
        }
        let (_, act) = self.active_at(x);
        Ok(self.image_of(&act))
    }

    /// `μ_v(ω) = H^d(∂v(ω))`.
    pub fn ma_measure(&self, region: &Region) -> Result<f64> {
        let region = region.normalized();
        region.within(&self.domain, self.point_tol)?;
        Ok(self.measure_of(&region))
    }

    fn measure_of(&self, region: &Region) -> f64 {
        match region {
            Region::Points { points } => {
                let mut seen: Vec<&Vec<f64>> = Vec::new();
                let mut total = 0.0;
                for x in points {
                    if seen.iter().any(|q| geom::dist(q, x) <= self.point_tol) {
                        continue;
                    }
                    seen.push(x);
                    let (_, act) = self.active_at(x);
                    total += self.image_of(&act).ambient_volume();
                }
                total
            }
            Region::Union { parts } if parts.iter().all(|r| matches!(r, Region::Points { .. })) => {
                let points = parts
                    .iter()
                    .flat_map(|r| match r {
                        Region::Points { points } => points.clone(),
                        _ => Vec::new(),
                    })
                    .collect();
                self.measure_of(&Region::Points { points })
            }
            r => self.atoms().filter(|v| r.contains(&v.point, self.point_tol)).map(|v| v.mass).sum(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms().map(|v| v.mass).sum()
    }

    /// `{v ≤ tol}` when the minimum of `v` is within tolerance of zero.
    pub fn zero_set(&self) -> Option<ZeroSet> {
        if self.min_value() > self.active_tol {
            return None;
        }
        let pts: Vec<Vec<f64>> = match &self.domain {
            Domain::Interval { lo, hi } => {
                let (mut lo, mut hi) = (*lo, *hi);
                for p in &self.pieces {
                    let (a, c) = (p.a[0], self.active_tol - p.b);
                    if a > 0.0 {
                        hi = hi.min(c / a);
                    } else if a < 0.0 {
                        lo = lo.max(c / a);
                    } else if c < 0.0 {
                        return None;
                    }
                }
                if lo > hi {
                    return None;
                }
                vec![vec![lo], vec![hi]]
            }
            Domain::Polygon(poly) => {
                let mut c = poly.clone();
                for p in &self.pieces {
                    c = geom::clip_halfplane(&c, [p.a[0], p.a[1]], self.active_tol - p.b, 0.0);
                    if c.is_empty() {
                        return None;
                    }
                }
                c.iter().map(|v| v.to_vec()).collect()
            }
        };
        // The clipping slack inflates S by about active_tol / |a|.
        let f = Face::from_points(pts, self.point_tol.max(1e3 * self.active_tol / self.gradient_scale()));
        Some(ZeroSet { vertices: f.vertices, dim: f.dim })
    }

    fn gradient_scale(&self) -> f64 {
        self.pieces.iter().map(|p| norm(&p.a)).fold(1.0, f64::max)
    }

    pub fn report(&self) -> MAReport {
        let mut cells: Vec<MACell> = self
            .cells
            .iter()
            .map(|c| MACell {
                region: c.region.clone(),
                image: Face { vertices: vec![self.pieces[c.piece].a.clone()], dim: 0 },
                image_volume: 0.0,
            })
            .collect();
        cells.extend(self.atoms().map(|v| MACell {
            region: vec![v.point.clone()],
            image: v.image.clone(),
            image_volume: v.mass,
        }));
        MAReport { cells, total_mass: self.total_mass(), zero_set: self.zero_set() }
    }

    fn subdivision_vertices(&self, exec: Exec) -> Vec<Vertex> {
        let tol = self.point_tol.max(f64::MIN_POSITIVE);
        let mut uniq: Vec<Vec<f64>> = Vec::new();
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let key = |x: &[f64]| -> Vec<i64> { x.iter().map(|t| (t / (4.0 * tol)).floor() as i64).collect() };
        for c in &self.cells {
            for x in &c.region {
                let k = key(x);
                let mut dup = false;
                for_each_neighbor(&k, |nk| {
                    if let Some(ids) = buckets.get(nk) {
                        if ids.iter().any(|&i| geom::dist(&uniq[i], x) <= tol) {
                            dup = true;
                        }
                    }
                });
                if !dup {
                    buckets.entry(k).or_default().push(uniq.len());
                    uniq.push(x.clone());
                }
            }
        }
        exec.map(&uniq, |x| {
            let (value, active) = self.active_at(x);
            let image = self.image_of(&active);
            let mass = image.ambient_volume();
            Vertex { point: x.clone(), value, active, image, mass }
        })
    }
}

fn domain_err<T>(msg: &str) -> Result<T> {
    domain(msg.to_string())
}

fn for_each_neighbor(k: &[i64], mut f: impl FnMut(&Vec<i64>)) {
    match k.len() {
        1 => {
            for d in -1..=1 {
                f(&vec![k[0] + d]);
            }
        }
        _ => {
            for d0 in -1..=1 {
                for d1 in -1..=1 {
                    f(&vec![k[0] + d0, k[1] + d1]);
                }
            }
        }
    }
}

/// Closed cell of piece `j` and its volume.
fn cell_region(dom: &Domain, pieces: &[Piece], j: usize) -> (Vec<Vec<f64>>, f64) {
    let pj = &pieces[j];
    match dom {
        Domain::Interval { lo, hi } => {
            let (mut lo, mut hi) = (*lo, *hi);
            for (k, pk) in pieces.iter().enumerate() {
                if k == j {
                    continue;
                }
                let c = pk.a[0] - pj.a[0];
                let off = pj.b - pk.b;
                if c > 0.0 {
                    hi = hi.min(off / c);
                } else if c < 0.0 {
                    lo = lo.max(off / c);
                } else if off < 0.0 || (off == 0.0 && k < j) {
                    return (Vec::new(), 0.0);
                }
            }
            if hi > lo {
                (vec![vec![lo], vec![hi]], hi - lo)
            } else {
                (Vec::new(), 0.0)
            }
        }
        Domain::Polygon(poly) => {
            let mut c = poly.clone();
            for (k, pk) in pieces.iter().enumerate() {
                if k == j {
                    continue;
                }
                let nrm = [pk.a[0] - pj.a[0], pk.a[1] - pj.a[1]];
                let off = pj.b - pk.b;
                if nrm == [0.0, 0.0] {
                    if off < 0.0 || (off == 0.0 && k < j) {
                        return (Vec::new(), 0.0);
                    }
                    continue;
                }
                c = geom::clip_halfplane(&c, nrm, off, 0.0);
                if c.len() < 3 {
                    return (Vec::new(), 0.0);
                }
            }
            let area = geom::polygon_area(&c);
            (c.iter().map(|v| v.to_vec()).collect(), area)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn abs_sum() -> PLConvexFunction {
        let pieces = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
            .iter()
            .map(|a| Piece { a: a.to_vec(), b: 0.0 })
            .collect();
        PLConvexFunction::new(Domain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(), pieces).unwrap()
    }

    #[test]
    fn subgradients_of_abs_sum() {
        let v = abs_sum();
        let s = v.subgradient(&[0.0, 0.0]).unwrap();
        assert_eq!(s.dim, 2);
        assert!((s.ambient_volume() - 4.0).abs() < 1e-15);
        let s = v.subgradient(&[1.0, 0.5]).unwrap();
        assert_eq!(s.vertices, vec![vec![1.0, 1.0]]);
        let s = v.subgradient(&[1.0, 0.0]).unwrap();
        assert_eq!(s.dim, 1);
        assert!(s.vertices.iter().all(|g| g[0] == 1.0));
        assert!(v.subgradient(&[2.0, 0.0]).is_err());
    }

    #[test]
    fn measure_of_abs_sum() {
        let v = abs_sum();
        assert_eq!(v.ma_measure(&Region::point(vec![0.0, 0.0])).unwrap(), 4.0);
        let whole = Region::Polygon { vertices: vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]] };
        assert_eq!(v.ma_measure(&whole).unwrap(), 4.0);
        let off = Region::Polygon { vertices: vec![[0.1, 0.1], [0.9, 0.1], [0.5, 0.9]] };
        assert_eq!(v.ma_measure(&off).unwrap(), 0.0);
        assert!(v.ma_measure(&Region::point(vec![3.0, 0.0])).is_err());
        let z = v.zero_set().unwrap();
        assert_eq!(z.dim, 0);
        assert_eq!(v.cells().len(), 4);
        assert_eq!(v.atoms().count(), 1);
    }

    #[test]
    fn affine_function_has_no_mass() {
        let v = PLConvexFunction::new(
            Domain::rectangle([0.0, 0.0], [1.0, 2.0]).unwrap(),
            vec![Piece { a: vec![0.3, -2.0], b: 5.0 }],
        )
        .unwrap();
        assert_eq!(v.total_mass(), 0.0);
        assert!(v.zero_set().is_none());
    }

    #[test]
    fn redundant_pieces_are_pruned() {
        let v = PLConvexFunction::new(
            Domain::interval(-1.0, 1.0).unwrap(),
            vec![
                Piece { a: vec![1.0], b: 0.0 },
                Piece { a: vec![-1.0], b: 0.0 },
                Piece { a: vec![0.0], b: -5.0 },
                Piece { a: vec![1.0], b: 0.0 },
            ],
        )
        .unwrap();
        assert_eq!(v.pieces().len(), 2);
        assert_eq!(v.ma_measure(&Region::Interval { lo: -0.5, hi: 0.5 }).unwrap(), 2.0);
        assert_eq!(v.ma_measure(&Region::Interval { lo: 0.1, hi: 0.5 }).unwrap(), 0.0);
    }

    #[test]
    fn cone_over_polygon() {
        let k = 64;
        let pieces: Vec<Piece> = (0..k)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                Piece { a: vec![t.cos(), t.sin()], b: 0.0 }
            })
            .collect();
        let v = PLConvexFunction::new(Domain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(), pieces).unwrap();
        let m = v.ma_measure(&Region::point(vec![0.0, 0.0])).unwrap();
        let exact = 0.5 * k as f64 * (2.0 * std::f64::consts::PI / k as f64).sin();
        assert!((m - exact).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let v = abs_sum();
        let s = serde_json::to_string(&v).unwrap();
        let w: PLConvexFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(w.pieces(), v.pieces());
        assert!(serde_json::from_str::<PLConvexFunction>(r#"{"domain":[[0,0],[1,1]],"pieces":[]}"#).is_err());
    }
}
