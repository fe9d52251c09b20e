//! Independent oracles shared by the integration targets.
#![allow(dead_code)]

use lpmink::convex::{surface_area_measure, Polytope};
use lpmink::geom::{dot, norm};
use lpmink::monge_ampere::{restrict_support, tangent_frame, Domain, PLConvexFunction, Piece, Region};
use lpmink::Result;
use rand::Rng;

/// Random convex PL function on the unit square with at most `max_pieces`
/// pieces and a nontrivial Monge-Ampère measure.
pub fn random_pl(rng: &mut impl Rng, max_pieces: usize) -> PLConvexFunction {
    let dom = Domain::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
    loop {
        let k = rng.random_range(3..=max_pieces);
        let pieces: Vec<Piece> = (0..k)
            .map(|_| Piece {
                a: vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                b: rng.random_range(-1.0..1.0),
            })
            .collect();
        let v = PLConvexFunction::new(dom.clone(), pieces).unwrap();
        if v.total_mass() > 0.1 {
            return v;
        }
    }
}

/// Gift-wrapping hull of a small point set, counterclockwise.
fn hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut out = vec![pts[0]];
    let mut cur = pts[0];
    loop {
        let mut next = if pts[0] == cur { pts[1] } else { pts[0] };
        for &q in &pts {
            if q == cur {
                continue;
            }
            let t = turn(cur, next, q);
            let farther = (q[0] - cur[0]).hypot(q[1] - cur[1]) > (next[0] - cur[0]).hypot(next[1] - cur[1]);
            if t < -1e-15 || (t.abs() <= 1e-15 && farther) {
                next = q;
            }
        }
        if next == out[0] || out.len() > pts.len() {
            break;
        }
        out.push(next);
        cur = next;
    }
    out
}

fn area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
}

fn inside(poly: &[[f64; 2]], x: [f64; 2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
    })
}

/// Every point where the subgradient can have positive area: triple
/// crossings of pieces, crossings of two pieces with the boundary, corners.
fn candidates(v: &PLConvexFunction) -> Vec<[f64; 2]> {
    let pcs = v.pieces();
    let corners: Vec<[f64; 2]> = v.domain().vertices().iter().map(|c| [c[0], c[1]]).collect();
    let tol = 1e-9;
    let in_dom = |x: [f64; 2]| x[0] >= -tol && x[0] <= 1.0 + tol && x[1] >= -tol && x[1] <= 1.0 + tol;
    let mut out = corners.clone();
    let solve2 = |r0: [f64; 3], r1: [f64; 3]| {
        let det = r0[0] * r1[1] - r0[1] * r1[0];
        (det.abs() > 1e-14).then(|| [(r0[2] * r1[1] - r0[1] * r1[2]) / det, (r0[0] * r1[2] - r0[2] * r1[0]) / det])
    };
    let diff = |i: usize, j: usize| [pcs[i].a[0] - pcs[j].a[0], pcs[i].a[1] - pcs[j].a[1], pcs[j].b - pcs[i].b];
    for i in 0..pcs.len() {
        for j in i + 1..pcs.len() {
            for k in j + 1..pcs.len() {
                if let Some(x) = solve2(diff(i, j), diff(i, k)) {
                    if in_dom(x) {
                        out.push(x);
                    }
                }
            }
            for e in 0..corners.len() {
                let (a, b) = (corners[e], corners[(e + 1) % corners.len()]);
                let nrm = [b[1] - a[1], a[0] - b[0]];
                if let Some(x) = solve2(diff(i, j), [nrm[0], nrm[1], nrm[0] * a[0] + nrm[1] * a[1]]) {
                    if in_dom(x) {
                        out.push(x);
                    }
                }
            }
        }
    }
    let mut uniq: Vec<[f64; 2]> = Vec::new();
    for x in out {
        if !uniq.iter().any(|u| (u[0] - x[0]).hypot(u[1] - x[1]) < 1e-9) {
            uniq.push(x);
        }
    }
    uniq
}

fn active_hull(v: &PLConvexFunction, x: [f64; 2]) -> Vec<[f64; 2]> {
    let vals: Vec<f64> = v.pieces().iter().map(|p| p.a[0] * x[0] + p.a[1] * x[1] + p.b).collect();
    let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let grads: Vec<[f64; 2]> = v
        .pieces()
        .iter()
        .zip(&vals)
        .filter(|(_, &y)| y >= top - 1e-9)
        .map(|(p, _)| [p.a[0], p.a[1]])
        .collect();
    hull(&grads)
}

pub struct McOutcome {
    /// Largest per-point discrepancy relative to the total mass.
    pub worst_point: f64,
    /// Discrepancy of the totals, relative.
    pub total: f64,
    /// Mass of the library atoms not found among the candidates.
    pub missed: f64,
}

/// Compares the library's point masses with hit counts of uniform draws in
/// the bounding box of the gradients.
pub fn monte_carlo(v: &PLConvexFunction, draws: usize, rng: &mut impl Rng) -> McOutcome {
    let cand = candidates(v);
    let cells: Vec<([f64; 2], Vec<[f64; 2]>)> =
        cand.iter().map(|&x| (x, active_hull(v, x))).filter(|(_, h)| area(h) > 0.0).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in v.pieces() {
        for k in 0..2 {
            lo[k] = lo[k].min(p.a[k]);
            hi[k] = hi[k].max(p.a[k]);
        }
    }
    let box_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    let mut hits = vec![0usize; cells.len()];
    for _ in 0..draws {
        let xi = [rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1])];
        if let Some(k) = cells.iter().position(|(_, h)| inside(h, xi)) {
            hits[k] += 1;
        }
    }
    let total_lib = v.total_mass();
    let mut worst: f64 = 0.0;
    let mut found = 0.0;
    let mut est_total = 0.0;
    for ((x, _), &h) in cells.iter().zip(&hits) {
        let est = h as f64 / draws as f64 * box_area;
        let lib = v.ma_measure(&Region::point(x.to_vec())).unwrap();
        found += lib;
        est_total += est;
        worst = worst.max((est - lib).abs() / total_lib);
    }
    McOutcome { worst_point: worst, total: (est_total - total_lib).abs() / total_lib, missed: (total_lib - found).abs() }
}

/// One spherical cap checked against the restricted support function.
pub struct CapCase {
    pub measured: f64,
    pub expected: f64,
}

/// `e` and `(axis, ρ)` for a cap `{u : ∠(u, axis) ≤ ρ}` inside the open
/// hemisphere around `e`, kept away from every facet normal.
pub fn transfer_caps(poly: &Polytope, e: &[f64], caps: usize, rng: &mut impl Rng) -> Result<Vec<CapCase>> {
    let frame = tangent_frame(e)?;
    let sm = surface_area_measure(poly);
    let mut out = Vec::new();
    while out.len() < caps {
        let c = random_unit(rng, 3);
        let tilt = dot(&c, e).clamp(-1.0, 1.0).acos();
        if tilt > 1.2 {
            continue;
        }
        let rho = rng.random_range(0.05..(std::f64::consts::FRAC_PI_2 - tilt - 0.02));
        let near_edge = sm.atoms().iter().any(|a| (dot(&a.u, &c).clamp(-1.0, 1.0).acos() - rho).abs() < 1e-6);
        if near_edge {
            continue;
        }
        let expected: f64 = sm
            .atoms()
            .iter()
            .filter(|a| dot(&a.u, &c).clamp(-1.0, 1.0).acos() <= rho)
            .map(|a| a.w * dot(&a.u, e))
            .sum();
        let half = (tilt + rho).tan() + 1.0;
        let dom = Domain::rectangle([-half, -half], [half, half])?;
        let v = restrict_support(poly, e, dom)?;
        let axis = vec![dot(&c, &frame[0]), dot(&c, &frame[1]), dot(&c, e)];
        let measured = v.ma_measure(&Region::Cap { axis, min_cos: rho.cos() })?;
        out.push(CapCase { measured, expected });
    }
    Ok(out)
}

pub fn random_unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = norm(&v);
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

/// Central second differences of `f` at `x` with step `h`.
pub fn fd_hessian(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let at = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut y = x.to_vec();
        y[di] += si * h;
        y[dj] += sj * h;
        f(&y)
    };
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == j {
                let mut yp = x.to_vec();
                let mut ym = x.to_vec();
                yp[i] += h;
                ym[i] -= h;
                (f(&yp) - 2.0 * f(x) + f(&ym)) / (h * h)
            } else {
                (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0)) / (4.0 * h * h)
            };
        }
    }
    out
}

/// `max |A - B| / max |B|`.
pub fn rel_matrix_error(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let scale = b.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    let diff = a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    diff / scale
}
