//! Exact solutions for boxes and regular polygons.

use serde::Serialize;

use super::LpProblem;
use crate::convex::{angle_between, Polytope};
use crate::geom::dot;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleOutcome {
    Solved { h: Vec<f64>, polytope: Polytope },
    Unsupported { reason: String },
}

impl OracleOutcome {
    pub fn h(&self) -> Option<&[f64]> {
        match self {
            OracleOutcome::Solved { h, .. } => Some(h),
            OracleOutcome::Unsupported { .. } => None,
        }
    }
}

fn unsupported(reason: &str) -> OracleOutcome {
    OracleOutcome::Unsupported { reason: reason.to_string() }
}

/// Closed-form solution when the problem is a box (antipodal orthogonal
/// pairs with equal targets in each pair) or a regular polygon with equal
/// targets.
pub fn oracle_small(problem: &LpProblem) -> OracleOutcome {
    if let Some(pairs) = box_pairs(problem) {
        return solve_box(problem, &pairs);
    }
    if let Some(k) = regular_polygon(problem) {
        return solve_polygon(problem, k);
    }
    unsupported("neither a box nor a regular polygon with equal targets")
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Antipodal pairs `(i, j)` if the normals are those of a box.
fn box_pairs(problem: &LpProblem) -> Option<Vec<(usize, usize)>> {
    let n = problem.dim();
    let u = problem.normals();
    let f = problem.targets();
    if u.len() != 2 * n {
        return None;
    }
    let mut pairs = Vec::new();
    let mut used = vec![false; u.len()];
    for i in 0..u.len() {
        if used[i] {
            continue;
        }
        let neg: Vec<f64> = u[i].iter().map(|x| -x).collect();
        let j = (0..u.len()).find(|&j| !used[j] && j != i && angle_between(&u[j], &neg) <= 1e-12)?;
        if !close(f[i], f[j]) {
            return None;
        }
        used[i] = true;
        used[j] = true;
        pairs.push((i, j));
    }
    for a in 0..pairs.len() {
        for b in a + 1..pairs.len() {
            if dot(&u[pairs[a].0], &u[pairs[b].0]).abs() > 1e-12 {
                return None;
            }
        }
    }
    Some(pairs)
}

/// Half-widths `w` solve `w_k^{1-p} 2^{n-1} ∏_{j≠k} w_j = f_k`, a linear
/// system `(11ᵀ - pI) log w = c` in the logarithms.
fn solve_box(problem: &LpProblem, pairs: &[(usize, usize)]) -> OracleOutcome {
    let n = problem.dim() as f64;
    let p = problem.p();
    if p == 0.0 {
        return unsupported("at p = 0 the box targets fix only the product of the half-widths");
    }
    let c: Vec<f64> = pairs
        .iter()
        .map(|&(i, _)| (problem.targets()[i] / 2f64.powf(n - 1.0)).ln())
        .collect();
    let s = c.iter().sum::<f64>() / (n - p);
    let w: Vec<f64> = c.iter().map(|ck| ((s - ck) / p).exp()).collect();
    let mut h = vec![0.0; problem.normals().len()];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        h[i] = w[k];
        h[j] = w[k];
    }
    finish(problem, h)
}

/// Number of sides if the normals are equally spaced and the targets equal.
fn regular_polygon(problem: &LpProblem) -> Option<usize> {
    if problem.dim() != 2 {
        return None;
    }
    let f = problem.targets();
    if f.iter().any(|x| !close(*x, f[0])) {
        return None;
    }
    let k = f.len();
    let mut ang: Vec<f64> = problem.normals().iter().map(|u| u[1].atan2(u[0])).collect();
    ang.sort_by(f64::total_cmp);
    let step = 2.0 * std::f64::consts::PI / k as f64;
    let ok = (0..k).all(|i| {
        let next = if i + 1 < k { ang[i + 1] } else { ang[0] + 2.0 * std::f64::consts::PI };
        (next - ang[i] - step).abs() <= 1e-12
    });
    ok.then_some(k)
}

/// All support numbers equal `h` with `h^{1-p} · 2h tan(π/k) = f`, found by
/// bisection on `log h`.
fn solve_polygon(problem: &LpProblem, k: usize) -> OracleOutcome {
    let p = problem.p();
    let f = problem.targets()[0];
    let t = (std::f64::consts::PI / k as f64).tan();
    let g = |x: f64| (1.0 - p) * x + (2.0 * t).ln() + x - f.ln();
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) > 0.0 {
        lo *= 2.0;
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let h = (0.5 * (lo + hi)).exp();
    finish(problem, vec![h; k])
}

fn finish(problem: &LpProblem, h: Vec<f64>) -> OracleOutcome {
    match Polytope::from_halfspaces(problem.normals(), &h) {
        Ok(polytope) => OracleOutcome::Solved { h, polytope },
        Err(e) => unsupported(&format!("closed-form support numbers do not define a polytope: {e}")),
    }
}
