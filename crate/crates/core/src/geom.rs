//! Low-level Euclidean helpers: vector arithmetic, planar polygons and
//! convex hulls in dimensions 2 and 3.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Largest pairwise distance bound: the diagonal of the bounding box.
pub fn bbox_diameter(points: &[Vec<f64>]) -> f64 {
    let Some(first) = points.first() else { return 0.0 };
    let d = first.len();
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in points {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    dist(&lo, &hi)
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `e`.
///
/// Built by Gram-Schmidt over the coordinate axes, skipping the axis most
/// aligned with `e`; for `e = ±e_k` this returns the remaining axes in order.
pub fn orthonormal_complement(e: &[f64]) -> Vec<Vec<f64>> {
    let n = e.len();
    let skip = (0..n)
        .max_by(|&i, &j| e[i].abs().total_cmp(&e[j].abs()))
        .unwrap_or(0);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in (0..n).filter(|&k| k != skip) {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        let c = dot(&v, e);
        for (vi, ei) in v.iter_mut().zip(e) {
            *vi -= c * ei;
        }
        for b in &basis {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let nv = norm(&v);
        basis.push(scale(&v, 1.0 / nv));
    }
    basis
}

/// Affine dimension of a finite point set (at most 3), with absolute tolerance.
pub fn affine_dim(points: &[Vec<f64>], tol: f64) -> usize {
    let Some(p0) = points.first() else { return 0 };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in points {
        let mut v = sub(p, p0);
        for b in &basis {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let nv = norm(&v);
        if nv > tol {
            basis.push(scale(&v, 1.0 / nv));
        }
    }
    basis.len()
}

/// Dimension of the linear span of a set of vectors.
pub fn span_dim(vectors: &[Vec<f64>], tol: f64) -> usize {
    let mut with_origin = vec![vec![0.0; vectors.first().map_or(0, |v| v.len())]];
    with_origin.extend(vectors.iter().cloned());
    affine_dim(&with_origin, tol)
}

// ---------------------------------------------------------------------------
// Planar polygons

pub type P2 = [f64; 2];

/// Signed area (positive for counterclockwise order).
pub fn polygon_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

pub fn polygon_centroid(poly: &[P2]) -> P2 {
    let n = poly.len() as f64;
    let (sx, sy) = poly.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
    [sx / n, sy / n]
}

/// Clips a convex polygon to the half-plane `⟨normal, x⟩ ≤ offset`.
pub fn clip_halfplane(poly: &[P2], normal: P2, offset: f64, tol: f64) -> Vec<P2> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let side = |p: &P2| normal[0] * p[0] + normal[1] * p[1] - offset;
    let mut out: Vec<P2> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let sa = side(&a);
        let sb = side(&b);
        let a_in = sa <= tol;
        let b_in = sb <= tol;
        if a_in {
            out.push(a);
        }
        if (sa < -tol && sb > tol) || (sa > tol && sb < -tol) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
        let _ = b_in;
    }
    dedup_cycle(out, tol.max(1e-15))
}

/// Removes consecutive near-duplicate points from a closed cycle.
pub fn dedup_cycle(points: Vec<P2>, tol: f64) -> Vec<P2> {
    let mut out: Vec<P2> = Vec::with_capacity(points.len());
    for p in points {
        if out
            .last()
            .is_none_or(|q: &P2| (q[0] - p[0]).abs() > tol || (q[1] - p[1]).abs() > tol)
        {
            out.push(p);
        }
    }
    while out.len() > 1 {
        let f = out[0];
        let l = out[out.len() - 1];
        if (f[0] - l[0]).abs() <= tol && (f[1] - l[1]).abs() <= tol {
            out.pop();
        } else {
            break;
        }
    }
    out
}

/// Closed-membership test for a counterclockwise convex polygon.
pub fn in_convex_polygon(poly: &[P2], x: P2, tol: f64) -> bool {
    let n = poly.len();
    match n {
        0 => false,
        1 => (poly[0][0] - x[0]).hypot(poly[0][1] - x[1]) <= tol,
        2 => dist_point_segment(x, poly[0], poly[1]) <= tol,
        _ => (0..n).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            cross2(a, b, x) >= -tol * len
        }),
    }
}

pub fn dist_point_segment(x: P2, a: P2, b: P2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let l2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if l2 > 0.0 {
        (((x[0] - a[0]) * ab[0] + (x[1] - a[1]) * ab[1]) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (x[0] - a[0] - t * ab[0]).hypot(x[1] - a[1] - t * ab[1])
}

/// Separating-axis test for two convex point sets given as vertex lists
/// (points, segments or counterclockwise polygons).
pub fn convex_sets_intersect(a: &[P2], b: &[P2], tol: f64) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let mut axes: Vec<P2> = Vec::new();
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            let e = [q[0] - p[0], q[1] - p[1]];
            if e[0] != 0.0 || e[1] != 0.0 {
                axes.push([-e[1], e[0]]);
                axes.push(e);
            }
        }
    }
    let d = [b[0][0] - a[0][0], b[0][1] - a[0][1]];
    if d[0] != 0.0 || d[1] != 0.0 {
        axes.push(d);
    }
    if axes.is_empty() {
        return true;
    }
    for ax in axes {
        let l = ax[0].hypot(ax[1]);
        let ax = [ax[0] / l, ax[1] / l];
        let proj = |s: &[P2]| {
            s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let v = ax[0] * p[0] + ax[1] * p[1];
                (lo.min(v), hi.max(v))
            })
        };
        let (alo, ahi) = proj(a);
        let (blo, bhi) = proj(b);
        if ahi < blo - tol || bhi < alo - tol {
            return false;
        }
    }
    true
}

/// Convex hull in the plane (Andrew's monotone chain). Returns indices of the
/// extreme points in counterclockwise order; collinear boundary points are
/// dropped.
pub fn hull2d(points: &[P2], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    idx.dedup_by(|a, b| {
        (points[*a][0] - points[*b][0]).abs() <= tol && (points[*a][1] - points[*b][1]).abs() <= tol
    });
    if idx.len() < 3 {
        return idx;
    }
    let turn = |o: usize, a: usize, b: usize| {
        let l = (points[b][0] - points[o][0]).hypot(points[b][1] - points[o][1]);
        cross2(points[o], points[a], points[b]) / l.max(f64::MIN_POSITIVE)
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= tol {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= tol {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// A facet of a three-dimensional hull: outward unit normal, plane offset and
/// the vertex cycle (indices into the input), counterclockwise seen from outside.
#[derive(Debug, Clone)]
pub struct HullFacet {
    pub normal: [f64; 3],
    pub offset: f64,
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [usize; 3],
    n: [f64; 3],
    d: f64,
    alive: bool,
}

fn tri(points: &[[f64; 3]], a: usize, b: usize, c: usize) -> Tri {
    let pa = points[a];
    let n = cross3(&sub(&points[b], &pa), &sub(&points[c], &pa));
    let l = norm(&n);
    let n = [n[0] / l, n[1] / l, n[2] / l];
    Tri { v: [a, b, c], n, d: dot(&n, &pa), alive: true }
}

/// Convex hull in space (incremental algorithm). `tol` is an absolute
/// distance below which points count as lying on a plane. Coplanar triangles
/// are merged into polygonal facets and collinear cycle vertices removed.
pub fn hull3d(points: &[[f64; 3]], tol: f64) -> Result<Vec<HullFacet>> {
    let n = points.len();
    if n < 4 {
        return Err(Error::Degenerate(format!("{n} points cannot span a 3-dimensional hull")));
    }
    let dist_pt = |i: usize, j: usize| dist(&points[i], &points[j]);
    // Initial simplex from extreme points.
    let i0 = (0..n).min_by(|&a, &b| points[a][0].total_cmp(&points[b][0])).unwrap();
    let i1 = (0..n).max_by(|&a, &b| dist_pt(i0, a).total_cmp(&dist_pt(i0, b))).unwrap();
    if dist_pt(i0, i1) <= tol {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let line_dist = |k: usize| {
        let c = cross3(&sub(&points[i1], &points[i0]), &sub(&points[k], &points[i0]));
        norm(&c) / dist_pt(i0, i1)
    };
    let i2 = (0..n).max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b))).unwrap();
    if line_dist(i2) <= tol {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let base = tri(points, i0, i1, i2);
    let plane_dist = |k: usize| dot(&base.n, &points[k]) - base.d;
    let i3 = (0..n)
        .max_by(|&a, &b| plane_dist(a).abs().total_cmp(&plane_dist(b).abs()))
        .unwrap();
    if plane_dist(i3).abs() <= tol {
        return Err(Error::Degenerate("points are coplanar".into()));
    }

    let mut faces: Vec<Tri> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add_face = |faces: &mut Vec<Tri>, edges: &mut HashMap<(usize, usize), usize>, t: Tri| {
        let id = faces.len();
        for k in 0..3 {
            edges.insert((t.v[k], t.v[(k + 1) % 3]), id);
        }
        faces.push(t);
    };
    let (a, b, c) = if plane_dist(i3) > 0.0 { (i0, i2, i1) } else { (i0, i1, i2) };
    for (x, y, z) in [(a, b, c), (a, i3, b), (b, i3, c), (c, i3, a)] {
        add_face(&mut faces, &mut edges, tri(points, x, y, z));
    }

    for p in 0..n {
        if [i0, i1, i2, i3].contains(&p) {
            continue;
        }
        let pp = points[p];
        let visible: Vec<usize> = (0..faces.len())
            .filter(|&f| faces[f].alive && dot(&faces[f].n, &pp) - faces[f].d > tol)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut is_visible = vec![false; faces.len()];
        for &f in &visible {
            is_visible[f] = true;
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &f in &visible {
            let v = faces[f].v;
            for k in 0..3 {
                let (s, t) = (v[k], v[(k + 1) % 3]);
                match edges.get(&(t, s)) {
                    Some(&g) if is_visible[g] => {}
                    _ => horizon.push((s, t)),
                }
            }
        }
        for &f in &visible {
            faces[f].alive = false;
            let v = faces[f].v;
            for k in 0..3 {
                let key = (v[k], v[(k + 1) % 3]);
                if edges.get(&key) == Some(&f) {
                    edges.remove(&key);
                }
            }
        }
        for (s, t) in horizon {
            add_face(&mut faces, &mut edges, tri(points, s, t, p));
        }
    }

    // Merge adjacent coplanar triangles.
    let alive: Vec<usize> = (0..faces.len()).filter(|&f| faces[f].alive).collect();
    let mut parent: HashMap<usize, usize> = alive.iter().map(|&f| (f, f)).collect();
    fn find(parent: &mut HashMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while parent[&r] != r {
            r = parent[&r];
        }
        let mut y = x;
        while parent[&y] != r {
            let nx = parent[&y];
            parent.insert(y, r);
            y = nx;
        }
        r
    }
    for &f in &alive {
        let v = faces[f].v;
        for k in 0..3 {
            let (s, t) = (v[k], v[(k + 1) % 3]);
            let Some(&g) = edges.get(&(t, s)) else { continue };
            let gv = faces[g].v;
            let opp_g = gv.iter().copied().find(|&x| x != s && x != t).unwrap();
            let opp_f = v.iter().copied().find(|&x| x != s && x != t).unwrap();
            let dg = (dot(&faces[f].n, &points[opp_g]) - faces[f].d).abs();
            let df = (dot(&faces[g].n, &points[opp_f]) - faces[g].d).abs();
            if dg <= tol && df <= tol {
                let (rf, rg) = (find(&mut parent, f), find(&mut parent, g));
                if rf != rg {
                    parent.insert(rf, rg);
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for &f in &alive {
        let r = find(&mut parent, f);
        groups.entry(r).or_default().push(f);
    }
    let mut roots: Vec<usize> = groups.keys().copied().collect();
    roots.sort_unstable();

    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let members = &groups[&r];
        let mut in_group = std::collections::HashSet::new();
        for &f in members {
            in_group.insert(f);
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &f in members {
            let v = faces[f].v;
            for k in 0..3 {
                let (s, t) = (v[k], v[(k + 1) % 3]);
                let interior = edges.get(&(t, s)).is_some_and(|g| in_group.contains(g));
                if !interior {
                    next.insert(s, t);
                }
            }
        }
        let start = *next.keys().min().unwrap();
        let mut cycle = vec![start];
        let mut cur = next[&start];
        while cur != start {
            cycle.push(cur);
            cur = *next
                .get(&cur)
                .ok_or_else(|| Error::Degenerate("open facet boundary in hull".into()))?;
            if cycle.len() > next.len() {
                return Err(Error::Degenerate("non-simple facet boundary in hull".into()));
            }
        }
        // Drop collinear vertices.
        let mut changed = true;
        while changed && cycle.len() > 3 {
            changed = false;
            for k in 0..cycle.len() {
                let a = points[cycle[(k + cycle.len() - 1) % cycle.len()]];
                let b = points[cycle[k]];
                let c = points[cycle[(k + 1) % cycle.len()]];
                let ab = sub(&b, &a);
                let ac = sub(&c, &a);
                let h = norm(&cross3(&ab, &ac)) / norm(&ac).max(f64::MIN_POSITIVE);
                if h <= tol {
                    cycle.remove(k);
                    changed = true;
                    break;
                }
            }
        }
        let (normal, offset) = newell_plane(points, &cycle);
        out.push(HullFacet { normal, offset, cycle });
    }
    Ok(out)
}

/// Plane through a planar cycle by Newell's method.
pub fn newell_plane(points: &[[f64; 3]], cycle: &[usize]) -> ([f64; 3], f64) {
    let mut nrm = [0.0; 3];
    let m = cycle.len();
    for k in 0..m {
        let a = points[cycle[k]];
        let b = points[cycle[(k + 1) % m]];
        nrm[0] += (a[1] - b[1]) * (a[2] + b[2]);
        nrm[1] += (a[2] - b[2]) * (a[0] + b[0]);
        nrm[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    let l = norm(&nrm);
    let nrm = [nrm[0] / l, nrm[1] / l, nrm[2] / l];
    let offset = cycle.iter().map(|&i| dot(&nrm, &points[i])).sum::<f64>() / m as f64;
    (nrm, offset)
}

/// Area of a planar polygon in space (vector area magnitude).
pub fn polygon_area3(points: &[[f64; 3]], cycle: &[usize]) -> f64 {
    let mut s = [0.0; 3];
    let m = cycle.len();
    if m < 3 {
        return 0.0;
    }
    for k in 0..m {
        let c = cross3(&points[cycle[k]], &points[cycle[(k + 1) % m]]);
        s[0] += c[0];
        s[1] += c[1];
        s[2] += c[2];
    }
    0.5 * norm(&s)
}
