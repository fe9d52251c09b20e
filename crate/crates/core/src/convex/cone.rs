use serde::{Deserialize, Serialize};

use crate::geom::{self, dot, norm};

use super::polytope::ANGLE_TOL;

/// A pointed polyhedral cone with apex at the origin, given by its extremal
/// rays as unit vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    ambient: usize,
    generators: Vec<Vec<f64>>,
    dim: usize,
}

impl Cone {
    /// Normalizes the rays, removes duplicates and drops rays that are
    /// nonnegative combinations of the others.
    pub fn new(ambient: usize, rays: Vec<Vec<f64>>) -> Self {
        let mut gens: Vec<Vec<f64>> = Vec::new();
        for r in rays {
            let Some(u) = geom::normalized(&r) else { continue };
            if !gens.iter().any(|g| super::angle_between(g, &u) <= ANGLE_TOL) {
                gens.push(u);
            }
        }
        let mut k = 0;
        while k < gens.len() {
            let others: Vec<Vec<f64>> =
                gens.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g.clone()).collect();
            if !others.is_empty() && in_cone(&others, &gens[k]) {
                gens.remove(k);
            } else {
                k += 1;
            }
        }
        let dim = geom::span_dim(&gens, 1e-9);
        Cone { ambient, generators: gens, dim }
    }

    /// The trivial cone `{o}`.
    pub fn origin(ambient: usize) -> Self {
        Cone { ambient, generators: Vec::new(), dim: 0 }
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Membership with angular tolerance.
    pub fn contains(&self, u: &[f64]) -> bool {
        if norm(u) == 0.0 {
            return true;
        }
        !self.generators.is_empty() && in_cone(&self.generators, u)
    }

    /// `self ⊂ other`, tested on generators.
    pub fn is_subcone_of(&self, other: &Cone) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }
}

/// Whether `u` is a nonnegative combination of `gens`, by Carathéodory:
/// try every linearly independent subset of at most `n` generators.
fn in_cone(gens: &[Vec<f64>], u: &[f64]) -> bool {
    let n = u.len();
    let un = norm(u);
    let tol = ANGLE_TOL * un;
    let m = gens.len();
    let mut subset: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        gens: &[Vec<f64>],
        u: &[f64],
        tol: f64,
        start: usize,
        subset: &mut Vec<usize>,
        max: usize,
    ) -> bool {
        if !subset.is_empty() && nonneg_fit(gens, subset, u, tol) {
            return true;
        }
        if subset.len() == max {
            return false;
        }
        for i in start..gens.len() {
            subset.push(i);
            if rec(gens, u, tol, i + 1, subset, max) {
                return true;
            }
            subset.pop();
        }
        false
    }
    rec(gens, u, tol, 0, &mut subset, n.min(m))
}

/// Least-squares fit of `u` by the generators in `subset`; accepts when the
/// coefficients are nonnegative and the residual is below `tol`.
fn nonneg_fit(gens: &[Vec<f64>], subset: &[usize], u: &[f64], tol: f64) -> bool {
    let k = subset.len();
    let g = nalgebra::DMatrix::from_fn(k, k, |i, j| dot(&gens[subset[i]], &gens[subset[j]]));
    let b = nalgebra::DVector::from_fn(k, |i, _| dot(&gens[subset[i]], u));
    let Some(lambda) = g.lu().solve(&b) else { return false };
    if lambda.iter().any(|&l| l < -tol) {
        return false;
    }
    let mut r = u.to_vec();
    for (c, &i) in lambda.iter().zip(subset) {
        for (rv, gv) in r.iter_mut().zip(&gens[i]) {
            *rv -= c * gv;
        }
    }
    norm(&r) <= tol
}
