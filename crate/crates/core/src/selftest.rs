//! Seeded invariant suite shared by the CLI and the test targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convex::{axis_box, face, normal_cone, support, surface_area_measure, Polytope};
use crate::exec::Exec;
use crate::geom::{self, dot, P2};
use crate::monge_ampere::{Domain, PLConvexFunction, Piece, Region};
use crate::solver::{solve, LpProblem, SolveOptions};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub seed: u64,
    pub pass: bool,
    /// Largest observed violation, in the units of `tol`.
    pub worst: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seeds: Vec<u64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

type CheckFn = fn(&mut ChaCha8Rng) -> Result<(f64, f64)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("minkowski_relation", minkowski_relation),
    ("subgradient_identity", subgradient_identity),
    ("homogeneity", homogeneity),
    ("face_additivity", face_additivity),
    ("monotonicity", monotonicity),
    ("measure_additivity", measure_additivity),
    ("scaling_covariance", scaling_covariance),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check once per seed. Each (seed, check) pair has its own
/// generator, so the outcome does not depend on `exec`.
pub fn run(seeds: &[u64], exec: Exec) -> SelftestReport {
    let jobs: Vec<(u64, usize)> = seeds.iter().flat_map(|&s| (0..CHECKS.len()).map(move |k| (s, k))).collect();
    let checks = exec.map(&jobs, |&(seed, k)| {
        let (name, f) = CHECKS[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ k as u64);
        let (worst, tol) = f(&mut rng).unwrap_or((f64::INFINITY, 0.0));
        Check { name: name.to_string(), seed, pass: worst <= tol, worst, tol }
    });
    let pass = checks.iter().all(|c| c.pass);
    SelftestReport { seeds: seeds.to_vec(), checks, pass }
}

/// Hull of random points in `[-1,1]^n`, redrawn until the origin is interior.
pub fn random_polytope(rng: &mut impl Rng, n: usize) -> Result<Polytope> {
    loop {
        let k = rng.random_range(n + 3..=n + 15);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        if let Ok(p) = Polytope::from_vertices(n, &pts) {
            if p.origin_interior() {
                return Ok(p);
            }
        }
    }
}

fn random_unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = geom::norm(&v);
        if r > 0.1 && r <= 1.0 {
            return geom::scale(&v, 1.0 / r);
        }
    }
}

fn both_dims(rng: &mut ChaCha8Rng, f: impl Fn(&mut ChaCha8Rng, &Polytope) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        for _ in 0..4 {
            let p = random_polytope(rng, n)?;
            worst = worst.max(f(rng, &p)?);
        }
    }
    Ok(worst)
}

fn minkowski_relation(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let worst = both_dims(rng, |_, p| {
        let m = surface_area_measure(p);
        Ok(m.first_moment().iter().map(|x| x.abs()).fold(0.0, f64::max) / m.total())
    })?;
    Ok((worst, 1e-10))
}

fn subgradient_identity(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let worst = both_dims(rng, |_, p| {
        let mut w: f64 = 0.0;
        for f in p.facets() {
            let h = support(p, &f.normal)?;
            for z in face(p, &f.normal)?.vertices {
                w = w.max((h - dot(&z, &f.normal)).abs() / p.diameter());
            }
        }
        Ok(w)
    })?;
    Ok((worst, 1e-9))
}

fn homogeneity(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let worst = both_dims(rng, |rng, p| {
        let mut w: f64 = 0.0;
        for _ in 0..20 {
            let u = random_unit(rng, p.dim());
            let lambda = 2f64.powi(rng.random_range(-8..8));
            let a = support(p, &geom::scale(&u, lambda))?;
            let b = lambda * support(p, &u)?;
            w = w.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
        }
        Ok(w)
    })?;
    Ok((worst, 4.0 * f64::EPSILON))
}

fn face_additivity(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let worst = both_dims(rng, |rng, p| {
        let mut w: f64 = 0.0;
        for z in p.vertices() {
            let gens = normal_cone(p, z)?.generators().to_vec();
            let u1 = &gens[rng.random_range(0..gens.len())];
            let u2 = &gens[rng.random_range(0..gens.len())];
            let (a1, a2) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
            let mix = geom::add(&geom::scale(u1, a1), &geom::scale(u2, a2));
            let lhs = support(p, &mix)?;
            let rhs = a1 * support(p, u1)? + a2 * support(p, u2)?;
            w = w.max((lhs - rhs).abs());
        }
        Ok(w)
    })?;
    Ok((worst, 1e-9))
}

fn monotonicity(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let worst = both_dims(rng, |rng, p| {
        let n = p.dim();
        let mut pts = p.vertices().to_vec();
        for _ in 0..5 {
            pts.push((0..n).map(|_| rng.random_range(-1.5..1.5)).collect());
        }
        let q = Polytope::from_vertices(n, &pts)?;
        let mut w: f64 = 0.0;
        for _ in 0..50 {
            let u = random_unit(rng, n);
            w = w.max(support(p, &u)? - support(&q, &u)?);
        }
        Ok(w)
    })?;
    Ok((worst, 1e-12))
}

/// A random PL function on the unit square, split by a random line.
fn measure_additivity(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let square: Vec<P2> = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let dom = Domain::polygon(&square)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let k = rng.random_range(2..=12);
        let pieces: Vec<Piece> = (0..k)
            .map(|_| Piece { a: vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)], b: rng.random_range(-1.0..1.0) })
            .collect();
        let v = PLConvexFunction::new(dom.clone(), pieces)?;
        let t = rng.random_range(0.0..std::f64::consts::PI);
        let nrm = [t.cos(), t.sin()];
        let c = nrm[0] * rng.random_range(0.2..0.8) + nrm[1] * rng.random_range(0.2..0.8);
        let left = geom::clip_halfplane(&square, nrm, c, 0.0);
        let right = geom::clip_halfplane(&square, [-nrm[0], -nrm[1]], -c, 0.0);
        let whole = v.ma_measure(&Region::Polygon { vertices: square.clone() })?;
        let parts = v.ma_measure(&Region::Polygon { vertices: left })?
            + v.ma_measure(&Region::Polygon { vertices: right })?;
        worst = worst.max((whole - parts).abs() / whole.max(f64::MIN_POSITIVE));
    }
    Ok((worst, 1e-10))
}

/// Boxes and rectangles: multiplying the targets by `λ` multiplies the
/// solution by `λ^{1/(n-p)}`. Converged outputs also satisfy the Minkowski
/// relation.
fn scaling_covariance(rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let opts = SolveOptions::default();
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let p = loop {
            let p: f64 = rng.random_range(-2.0..0.8);
            if p.abs() > 0.1 {
                break p;
            }
        };
        let hi: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
        let lo: Vec<f64> = hi.iter().map(|x| -x).collect();
        let bx = axis_box(&lo, &hi)?;
        let m = crate::convex::lp_area_measure(&bx, p)?;
        let normals = m.atoms().iter().map(|a| a.u.clone()).collect();
        let targets = m.atoms().iter().map(|a| a.w).collect();
        let base = LpProblem::new(n, p, normals, targets)?;
        let lambda = rng.random_range(0.2..5.0);
        let r0 = solve(&base, &opts)?;
        let r1 = solve(&base.scaled_targets(lambda)?, &opts)?;
        if !(r0.converged && r1.converged) {
            return Ok((f64::INFINITY, 1e-6));
        }
        let s = lambda.powf(1.0 / (n as f64 - p));
        for (a, b) in r0.h.iter().zip(&r1.h) {
            worst = worst.max((b - s * a).abs() / (s * a));
        }
        for r in [&r0, &r1] {
            let sm = surface_area_measure(&r.polytope);
            let mk = sm.first_moment().iter().map(|x| x.abs()).fold(0.0, f64::max) / sm.total();
            // Reported on the same scale as the covariance error.
            worst = worst.max(mk * 1e4);
        }
    }
    Ok((worst, 1e-6))
}
