//! Checks whether a PL function solves `v^{1-p} dμ_v = g dx` in the
//! Alexandrov sense: the zero set is null and, away from it, the measure of
//! each comparison cell matches `∫ g v^{p-1}`.

use serde::{Deserialize, Serialize};

use super::{Domain, PLConvexFunction, Piece, ZeroSet};
use crate::closed_forms::{FacetOrigin, VanishingLine};
use crate::error::{check_exponent, domain, Error, Result};
use crate::exec::Exec;
use crate::geom::{self, P2};

/// Built-in right-hand sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum Density {
    #[serde(rename = "constant")]
    Constant { value: f64 },
    /// `v^{1-p} det ∇²v` of the solution vanishing on a line, on `ℝⁿ`.
    #[serde(rename = "example32_rhs")]
    VanishingLineRhs(VanishingLine),
    /// `v^{1-p} det ∇²v` of the profile of the body with the origin in a
    /// facet, on `ℝ^{n-1}`.
    #[serde(rename = "example42_rhs")]
    FacetOriginRhs(FacetOrigin),
}

impl Density {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Density::Constant { value } => Ok(*value),
            Density::VanishingLineRhs(v) => v.rhs_at(x),
            Density::FacetOriginRhs(f) => f.rhs_at(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlexandrovOptions {
    /// Verdict threshold on the relative residual; quadrature aims at `tol/10`.
    pub tol: f64,
    /// Side of the comparison squares (intervals in dimension 1). Without it
    /// the comparison cells are the open cells of the subdivision.
    pub mesh: Option<f64>,
    /// Maximal dyadic refinement depth of the quadrature.
    pub max_depth: usize,
    pub exec: Exec,
}

impl Default for AlexandrovOptions {
    fn default() -> Self {
        AlexandrovOptions { tol: 1e-2, mesh: None, max_depth: 10, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellComparison {
    pub region: Vec<Vec<f64>>,
    pub measure: f64,
    pub integral: f64,
    /// `|μ - I| / max(|μ|, |I|)`, zero when both vanish.
    pub residual: f64,
    pub touches_zero_set: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlexandrovReport {
    pub zero_set: Option<ZeroSet>,
    /// `H^d(S) = 0`.
    pub zero_set_null: bool,
    /// Mass of the atoms off the zero set.
    pub atomic_mass: f64,
    /// Mass of the atoms on the zero set, where the equation says nothing.
    pub zero_set_mass: f64,
    pub mesh: Option<f64>,
    pub comparisons: Vec<CellComparison>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `μ_v` with `g v^{p-1} dx` cell by cell.
pub fn check_alexandrov(
    v: &PLConvexFunction,
    g: &Density,
    p: f64,
    opts: &AlexandrovOptions,
) -> Result<AlexandrovReport> {
    check_exponent(p)?;
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    if let Some(h) = opts.mesh {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter("mesh scale must be positive".into()));
        }
    }
    if v.min_value() < -v.active_tol() {
        return domain("v takes negative values");
    }
    let probe = v.domain().vertices()[0].clone();
    if !(g.eval(&probe)? >= 0.0) {
        return domain("density must be nonnegative");
    }
    let d = v.dim();
    let zero_set = v.zero_set();
    let zero_set_null = zero_set.as_ref().is_none_or(|z| z.dim < d);
    let s_pts: Vec<P2> = zero_set
        .as_ref()
        .map(|z| z.vertices.iter().map(|x| to_p2(x)).collect())
        .unwrap_or_default();
    let on_s = |x: &[f64]| v.value(x) <= v.active_tol();
    let mut atomic_mass = 0.0;
    let mut zero_set_mass = 0.0;
    for a in v.atoms() {
        if on_s(&a.point) {
            zero_set_mass += a.mass;
        } else {
            atomic_mass += a.mass;
        }
    }
    let quad = Quadrature {
        g,
        p,
        rel_tol: opts.tol / 10.0,
        max_depth: opts.max_depth,
        zero_set: &s_pts,
        s_tol: v.point_tol(),
    };
    let is_zero_piece = |pc: &Piece| pc.b.abs() <= v.active_tol() && geom::norm(&pc.a) <= v.active_tol();

    let comparisons: Vec<CellComparison> = match opts.mesh {
        None => {
            let parts = opts.exec.map(v.cells(), |c| {
                let pc = &v.pieces()[c.piece];
                if is_zero_piece(pc) {
                    return None;
                }
                let integral = quad.integrate(&c.region, pc);
                Some(CellComparison {
                    region: c.region.clone(),
                    measure: 0.0,
                    integral,
                    residual: relative(0.0, integral),
                    touches_zero_set: touches(&c.region, &s_pts, v.point_tol()),
                })
            });
            parts.into_iter().flatten().collect()
        }
        Some(h) => {
            let grid = MeshGrid::new(v.domain(), h);
            let per_cell = opts.exec.map(v.cells(), |c| {
                let pc = &v.pieces()[c.piece];
                if is_zero_piece(pc) {
                    return Vec::new();
                }
                grid.overlapping(&c.region)
                    .into_iter()
                    .filter_map(|q| {
                        let piece_region = grid.clip(q, &c.region);
                        (!piece_region.is_empty()).then(|| (q, quad.integrate(&piece_region, pc)))
                    })
                    .collect::<Vec<_>>()
            });
            let mut integral = vec![0.0; grid.count()];
            for (q, val) in per_cell.into_iter().flatten() {
                integral[q] += val;
            }
            let mut measure = vec![0.0; grid.count()];
            for a in v.atoms() {
                if !on_s(&a.point) {
                    measure[grid.index_of(&a.point)] += a.mass;
                }
            }
            (0..grid.count())
                .filter_map(|q| {
                    let region = grid.clip(q, &v.domain().vertices());
                    if region.is_empty() {
                        return None;
                    }
                    Some(CellComparison {
                        touches_zero_set: touches(&region, &s_pts, v.point_tol()),
                        region,
                        measure: measure[q],
                        integral: integral[q],
                        residual: relative(measure[q], integral[q]),
                    })
                })
                .collect()
        }
    };
    let max_residual = comparisons.iter().map(|c| c.residual).fold(0.0, f64::max);
    Ok(AlexandrovReport {
        zero_set,
        zero_set_null,
        atomic_mass,
        zero_set_mass,
        mesh: opts.mesh,
        comparisons,
        max_residual,
        tol: opts.tol,
        pass: zero_set_null && max_residual <= opts.tol,
    })
}

fn relative(mu: f64, integral: f64) -> f64 {
    let m = mu.abs().max(integral.abs());
    if m == 0.0 {
        0.0
    } else {
        (mu - integral).abs() / m
    }
}

fn to_p2(x: &[f64]) -> P2 {
    if x.len() == 1 {
        [x[0], 0.0]
    } else {
        [x[0], x[1]]
    }
}

fn touches(region: &[Vec<f64>], s: &[P2], tol: f64) -> bool {
    let r: Vec<P2> = region.iter().map(|x| to_p2(x)).collect();
    geom::convex_sets_intersect(&r, s, tol)
}

/// Axis-aligned comparison squares (intervals) anchored at the lower corner
/// of the domain's bounding box.
struct MeshGrid {
    lo: Vec<f64>,
    h: f64,
    counts: Vec<usize>,
}

impl MeshGrid {
    fn new(dom: &Domain, h: f64) -> Self {
        let verts = dom.vertices();
        let d = dom.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for x in &verts {
            for k in 0..d {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
        let counts = (0..d).map(|k| (((hi[k] - lo[k]) / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize).collect();
        MeshGrid { lo, h, counts }
    }

    fn count(&self) -> usize {
        self.counts.iter().product()
    }

    fn coords(&self, q: usize) -> Vec<usize> {
        if self.counts.len() == 1 {
            vec![q]
        } else {
            vec![q % self.counts[0], q / self.counts[0]]
        }
    }

    fn flat(&self, c: &[usize]) -> usize {
        if c.len() == 1 {
            c[0]
        } else {
            c[0] + self.counts[0] * c[1]
        }
    }

    /// Half-open assignment of a point to a square.
    fn index_of(&self, x: &[f64]) -> usize {
        let c: Vec<usize> = (0..self.counts.len())
            .map(|k| (((x[k] - self.lo[k]) / self.h).floor().max(0.0) as usize).min(self.counts[k] - 1))
            .collect();
        self.flat(&c)
    }

    fn overlapping(&self, region: &[Vec<f64>]) -> Vec<usize> {
        let d = self.counts.len();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0usize; d];
        for x in region {
            for k in 0..d {
                let i = (((x[k] - self.lo[k]) / self.h).floor().max(0.0) as usize).min(self.counts[k] - 1);
                lo[k] = lo[k].min(i);
                hi[k] = hi[k].max(i);
            }
        }
        if d == 1 {
            (lo[0]..=hi[0]).collect()
        } else {
            let mut out = Vec::new();
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    out.push(self.flat(&[i, j]));
                }
            }
            out
        }
    }

    /// Intersection of a convex region with square `q`.
    fn clip(&self, q: usize, region: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let c = self.coords(q);
        let lo: Vec<f64> = (0..c.len()).map(|k| self.lo[k] + c[k] as f64 * self.h).collect();
        let hi: Vec<f64> = lo.iter().map(|x| x + self.h).collect();
        if c.len() == 1 {
            let a = region.iter().map(|x| x[0]).fold(f64::INFINITY, f64::min).max(lo[0]);
            let b = region.iter().map(|x| x[0]).fold(f64::NEG_INFINITY, f64::max).min(hi[0]);
            return if b > a { vec![vec![a], vec![b]] } else { Vec::new() };
        }
        let mut poly: Vec<P2> = region.iter().map(|x| [x[0], x[1]]).collect();
        for (n, off) in [([1.0, 0.0], hi[0]), ([-1.0, 0.0], -lo[0]), ([0.0, 1.0], hi[1]), ([0.0, -1.0], -lo[1])] {
            poly = geom::clip_halfplane(&poly, n, off, 0.0);
            if poly.len() < 3 {
                return Vec::new();
            }
        }
        if !(geom::polygon_area(&poly) > 0.0) {
            return Vec::new();
        }
        poly.iter().map(|x| x.to_vec()).collect()
    }
}

/// Adaptive integration of `g · ℓ^{p-1}` over a convex cell where `ℓ` is
/// the affine piece; points with `ℓ ≤ 0` contribute nothing.
struct Quadrature<'a> {
    g: &'a Density,
    p: f64,
    rel_tol: f64,
    max_depth: usize,
    zero_set: &'a [P2],
    s_tol: f64,
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

impl Quadrature<'_> {
    fn f(&self, piece: &Piece, x: &[f64]) -> f64 {
        let l = piece.eval(x);
        if l <= 0.0 {
            return 0.0;
        }
        self.g.eval(x).unwrap_or(f64::NAN) * l.powf(self.p - 1.0)
    }

    fn near_s(&self, pts: &[P2]) -> bool {
        !self.zero_set.is_empty() && geom::convex_sets_intersect(pts, self.zero_set, self.s_tol)
    }

    fn integrate(&self, region: &[Vec<f64>], piece: &Piece) -> f64 {
        if region.len() == 2 && region[0].len() == 1 {
            let (a, b) = (region[0][0], region[1][0]);
            let est = self.gauss(piece, a, b);
            let tol = self.rel_tol * est.abs();
            return self.adapt_1d(piece, a, b, est, tol, 0);
        }
        let poly: Vec<P2> = region.iter().map(|x| [x[0], x[1]]).collect();
        let tris: Vec<[P2; 3]> = (1..poly.len().saturating_sub(1)).map(|i| [poly[0], poly[i], poly[i + 1]]).collect();
        let area: f64 = geom::polygon_area(&poly);
        let ests: Vec<f64> = tris.iter().map(|t| self.radon(piece, t)).collect();
        let total: f64 = ests.iter().sum();
        tris.iter()
            .zip(&ests)
            .map(|(t, &e)| {
                let share = tri_area(t) / area;
                self.adapt_2d(piece, *t, e, self.rel_tol * total.abs() * share, 0)
            })
            .sum()
    }

    fn gauss(&self, piece: &Piece, a: f64, b: f64) -> f64 {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        r * GL5.iter().map(|&(x, w)| w * self.f(piece, &[c + r * x])).sum::<f64>()
    }

    fn adapt_1d(&self, piece: &Piece, a: f64, b: f64, est: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (self.gauss(piece, a, m), self.gauss(piece, m, b));
        if (l + r - est).abs() <= tol {
            return l + r;
        }
        if depth >= self.max_depth {
            return if self.near_s(&[[a, 0.0], [b, 0.0]]) { 0.0 } else { l + r };
        }
        self.adapt_1d(piece, a, m, l, tol / 2.0, depth + 1) + self.adapt_1d(piece, m, b, r, tol / 2.0, depth + 1)
    }

    /// Seven-point degree-5 rule on a triangle.
    fn radon(&self, piece: &Piece, t: &[P2; 3]) -> f64 {
        let s15 = 15f64.sqrt();
        let (a1, b1) = ((6.0 - s15) / 21.0, (9.0 + 2.0 * s15) / 21.0);
        let (a2, b2) = ((6.0 + s15) / 21.0, (9.0 - 2.0 * s15) / 21.0);
        let (w1, w2) = ((155.0 - s15) / 1200.0, (155.0 + s15) / 1200.0);
        let at = |l: [f64; 3]| {
            let x = [
                l[0] * t[0][0] + l[1] * t[1][0] + l[2] * t[2][0],
                l[0] * t[0][1] + l[1] * t[1][1] + l[2] * t[2][1],
            ];
            self.f(piece, &x)
        };
        let third = 1.0 / 3.0;
        let mut s = 9.0 / 40.0 * at([third, third, third]);
        for (a, b, w) in [(a1, b1, w1), (a2, b2, w2)] {
            s += w * (at([a, a, b]) + at([a, b, a]) + at([b, a, a]));
        }
        s * tri_area(t)
    }

    fn adapt_2d(&self, piece: &Piece, t: [P2; 3], est: f64, tol: f64, depth: usize) -> f64 {
        let mid = |a: P2, b: P2| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let (m01, m12, m20) = (mid(t[0], t[1]), mid(t[1], t[2]), mid(t[2], t[0]));
        let kids = [[t[0], m01, m20], [m01, t[1], m12], [m20, m12, t[2]], [m01, m12, m20]];
        let ests: Vec<f64> = kids.iter().map(|k| self.radon(piece, k)).collect();
        let sum: f64 = ests.iter().sum();
        if (sum - est).abs() <= tol {
            return sum;
        }
        if depth >= self.max_depth {
            return if self.near_s(&t) { 0.0 } else { sum };
        }
        kids.iter()
            .zip(ests)
            .map(|(k, e)| self.adapt_2d(piece, *k, e, tol / 4.0, depth + 1))
            .sum()
    }
}

fn tri_area(t: &[P2; 3]) -> f64 {
    0.5 * geom::cross2(t[0], t[1], t[2]).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monge_ampere::tests::abs_sum;

    #[test]
    fn affine_with_zero_density_passes() {
        let v = PLConvexFunction::new(
            Domain::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap(),
            vec![Piece { a: vec![0.5, 0.5], b: 1.0 }],
        )
        .unwrap();
        let r = check_alexandrov(&v, &Density::Constant { value: 0.0 }, 0.5, &AlexandrovOptions::default()).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn abs_sum_is_atomic() {
        let v = abs_sum();
        let opts = AlexandrovOptions::default();
        let zero = check_alexandrov(&v, &Density::Constant { value: 0.0 }, 0.5, &opts).unwrap();
        assert!(zero.zero_set_null);
        assert!(zero.pass);
        assert_eq!(zero.zero_set_mass, 4.0);
        let one = check_alexandrov(&v, &Density::Constant { value: 1.0 }, 0.5, &opts).unwrap();
        assert!(one.zero_set_null);
        assert!(!one.pass);
        assert_eq!(one.max_residual, 1.0);
        // ∫ over a quadrant of (x+y)^{-1/2} on [0,1]² is (8/3)(√2 - 1).
        let expect = 8.0 / 3.0 * (2f64.sqrt() - 1.0);
        for c in &one.comparisons {
            assert!((c.integral - expect).abs() < 1e-2 * expect, "{}", c.integral);
        }
    }

    #[test]
    fn negative_function_is_rejected() {
        let v = PLConvexFunction::new(
            Domain::interval(-1.0, 1.0).unwrap(),
            vec![Piece { a: vec![1.0], b: -0.5 }, Piece { a: vec![-1.0], b: -0.5 }],
        )
        .unwrap();
        let g = Density::Constant { value: 1.0 };
        assert!(check_alexandrov(&v, &g, 0.0, &AlexandrovOptions::default()).is_err());
        let w = PLConvexFunction::new(Domain::interval(-1.0, 1.0).unwrap(), vec![Piece { a: vec![1.0], b: 2.0 }])
            .unwrap();
        assert!(matches!(
            check_alexandrov(&w, &g, 1.0, &AlexandrovOptions::default()),
            Err(Error::UnsupportedExponent(_))
        ));
    }

    #[test]
    fn density_json_names() {
        let g: Density = serde_json::from_str(r#"{"name":"example42_rhs","n":3,"p":0.5}"#).unwrap();
        assert!(matches!(g, Density::FacetOriginRhs(_)));
        let g: Density = serde_json::from_str(r#"{"name":"constant","value":2.0}"#).unwrap();
        assert_eq!(g.eval(&[0.0, 0.0]).unwrap(), 2.0);
        assert!(serde_json::from_str::<Density>(r#"{"name":"example32_rhs","n":3,"p":-1,"beta":0.1}"#).is_err());
    }
}
