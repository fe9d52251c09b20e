//! Numerical solution of the discrete L_p Minkowski problem
//! `h_i^{1-p} A_i(h) = f_i`, where `A_i(h)` is the area of the facet with
//! normal `u_i` of `{x : ⟨u_i, x⟩ ≤ h_i ∀i}`.

mod oracle;

pub use oracle::{oracle_small, OracleOutcome};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::convex::{self, angle_between, positively_spanning, Polytope, ANGLE_TOL};
use crate::error::{check_exponent, domain, Error, Result};
use crate::geom::{self, dot};

/// Normals, positive targets and the exponent of a discrete problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemWire", into = "ProblemWire")]
pub struct LpProblem {
    dim: usize,
    p: f64,
    normals: Vec<Vec<f64>>,
    targets: Vec<f64>,
    tau: (f64, f64),
}

#[derive(Serialize, Deserialize)]
struct AtomWire {
    u: Vec<f64>,
    f: f64,
}

#[derive(Serialize, Deserialize)]
struct ProblemWire {
    dim: usize,
    p: f64,
    atoms: Vec<AtomWire>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<(f64, f64)>,
}

impl TryFrom<ProblemWire> for LpProblem {
    type Error = Error;
    fn try_from(w: ProblemWire) -> Result<Self> {
        let (normals, targets) = w.atoms.into_iter().map(|a| (a.u, a.f)).unzip();
        let p = LpProblem::new(w.dim, w.p, normals, targets)?;
        match w.tau {
            Some(t) => p.with_bounds(t.0, t.1),
            None => Ok(p),
        }
    }
}

impl From<LpProblem> for ProblemWire {
    fn from(p: LpProblem) -> Self {
        ProblemWire {
            dim: p.dim,
            p: p.p,
            atoms: p.normals.into_iter().zip(p.targets).map(|(u, f)| AtomWire { u, f }).collect(),
            tau: Some(p.tau),
        }
    }
}

impl LpProblem {
    /// Normals are normalized; the bounds default to `(min f / 2, 2 max f)`.
    pub fn new(dim: usize, p: f64, normals: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        check_exponent(p)?;
        if dim != 2 && dim != 3 {
            return Err(Error::Problem(format!("dimension {dim} not supported (only 2 and 3)")));
        }
        if normals.len() != targets.len() {
            return Err(Error::Problem("one target per normal is required".into()));
        }
        let mut unit = Vec::with_capacity(normals.len());
        for u in &normals {
            if u.len() != dim {
                return Err(Error::Problem(format!("normals must have {dim} components")));
            }
            let v = geom::normalized(u).ok_or_else(|| Error::Problem("normals must be finite and nonzero".into()))?;
            unit.push(v);
        }
        for i in 0..unit.len() {
            for j in i + 1..unit.len() {
                if angle_between(&unit[i], &unit[j]) <= ANGLE_TOL {
                    return Err(Error::Problem(format!("normals {i} and {j} coincide")));
                }
            }
        }
        if targets.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::Problem("targets must be positive and finite".into()));
        }
        if !positively_spanning(&unit) {
            return Err(Error::Problem("normals do not positively span the space".into()));
        }
        let lo = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = targets.iter().copied().fold(0.0, f64::max);
        Ok(LpProblem { dim, p, normals: unit, targets, tau: (0.5 * lo, 2.0 * hi) })
    }

    /// Sets `τ₁ < min f ≤ max f < τ₂`.
    pub fn with_bounds(mut self, tau1: f64, tau2: f64) -> Result<Self> {
        let lo = self.targets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.targets.iter().copied().fold(0.0, f64::max);
        if !(tau1 > 0.0 && tau1 < lo && hi < tau2) {
            return Err(Error::Problem(format!("bounds ({tau1}, {tau2}) must bracket the targets [{lo}, {hi}]")));
        }
        self.tau = (tau1, tau2);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.tau
    }

    /// The same problem with targets multiplied by `lambda`.
    pub fn scaled_targets(&self, lambda: f64) -> Result<Self> {
        LpProblem::new(self.dim, self.p, self.normals.clone(), self.targets.iter().map(|f| f * lambda).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Newton's method on `log(h^{1-p} A(h)) = log f` in the variables
    /// `log h`, with backtracking on the maximal residual.
    Newton,
    /// `h_i ← h_i (f_i / (h_i^{1-p} A_i))^{γ/(n-p)}`.
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Step factor `γ ∈ (0, 1]`.
    pub damping: f64,
    pub scheme: Scheme,
    /// `min h < boundary_tol · diameter` flags a solution approaching `o ∈ ∂K`.
    pub boundary_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: 500, damping: 1.0, scheme: Scheme::Newton, boundary_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub polytope: Polytope,
    /// Support numbers, in the order of the problem's normals.
    pub h: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub boundary: bool,
    /// Maximal residual before each step.
    pub history: Vec<f64>,
}

#[derive(Clone)]
struct State {
    poly: Polytope,
    log_h: Vec<f64>,
    area: Vec<f64>,
    facet_of: Vec<usize>,
    rho: Vec<f64>,
    max_rho: f64,
    /// `Σ log(1 + ρ_i)²`.
    merit: f64,
}

fn match_facets(poly: &Polytope, normals: &[Vec<f64>]) -> Vec<Option<usize>> {
    normals
        .iter()
        .map(|u| {
            let (best, ang) = poly
                .facets()
                .iter()
                .enumerate()
                .map(|(j, f)| (j, angle_between(&f.normal, u)))
                .fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            (ang <= 1e-6).then_some(best)
        })
        .collect()
}

/// Polytope with support numbers `exp(log_h)`; normals whose facet vanished
/// are pulled inside the hull until every facet exists.
fn evaluate(problem: &LpProblem, mut log_h: Vec<f64>) -> Result<State> {
    let m = problem.normals.len();
    for _ in 0..=m {
        let h: Vec<f64> = log_h.iter().map(|x| x.exp()).collect();
        let poly = Polytope::from_halfspaces(&problem.normals, &h)?;
        let matched = match_facets(&poly, &problem.normals);
        let dead: Vec<usize> = (0..m).filter(|&i| matched[i].is_none()).collect();
        if dead.is_empty() {
            let facet_of: Vec<usize> = matched.into_iter().map(|j| j.unwrap()).collect();
            let area: Vec<f64> = facet_of.iter().map(|&j| poly.facet_area(j)).collect();
            let rho: Vec<f64> = (0..m)
                .map(|i| h[i].powf(1.0 - problem.p) * area[i] / problem.targets[i] - 1.0)
                .collect();
            let max_rho = rho.iter().fold(0.0f64, |a, r| a.max(r.abs()));
            let merit = rho.iter().map(|r| (1.0 + r).ln().powi(2)).sum();
            return Ok(State { poly, log_h, area, facet_of, rho, max_rho, merit });
        }
        for i in dead {
            let s = convex::support(&poly, &problem.normals[i])?;
            log_h[i] = (s * (1.0 - 1e-6)).ln();
        }
    }
    Err(Error::Degenerate("facets keep vanishing".into()))
}

/// Newton direction in `log h`.
fn newton_direction(problem: &LpProblem, st: &State) -> Option<Vec<f64>> {
    let m = problem.normals.len();
    let q = 1.0 - problem.p;
    let mut back = vec![usize::MAX; st.poly.facets().len()];
    for (i, &j) in st.facet_of.iter().enumerate() {
        back[j] = i;
    }
    let h: Vec<f64> = st.log_h.iter().map(|x| x.exp()).collect();
    // dA_i/dh_j = ℓ_ij / sin θ_ij, dA_i/dh_i = -Σ_j ℓ_ij cot θ_ij.
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for (fi, fj, len) in st.poly.ridges() {
        let (i, j) = (back[fi], back[fj]);
        if i == usize::MAX || j == usize::MAX {
            continue;
        }
        let c = dot(&problem.normals[i], &problem.normals[j]).clamp(-1.0, 1.0);
        let s = (1.0 - c * c).sqrt();
        if s <= 1e-14 {
            continue;
        }
        for (a, b) in [(i, j), (j, i)] {
            jac[(a, b)] += h[b] / st.area[a] * len / s;
            jac[(a, a)] -= h[a] / st.area[a] * len * c / s;
        }
    }
    for i in 0..m {
        jac[(i, i)] += q;
    }
    let rhs = DVector::from_iterator(m, (0..m).map(|i| -(st.rho[i] + 1.0).ln()));
    let step = jac.lu().solve(&rhs)?;
    step.iter().all(|x| x.is_finite()).then(|| step.iter().copied().collect())
}

fn fixed_point_direction(problem: &LpProblem, st: &State) -> Vec<f64> {
    let n = problem.dim as f64;
    st.rho.iter().map(|r| -(r + 1.0).ln() / (n - problem.p)).collect()
}

/// Solves the discrete problem from `h ≡ 1`.
///
/// With [`Scheme::Newton`], a direct run that stalls is restarted as a
/// continuation in the targets: from the measure of the initial body to `f`
/// along `f₀^{1-t} f^t`, with Newton's method at each stage.
pub fn solve(problem: &LpProblem, opts: &SolveOptions) -> Result<SolveResult> {
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::Parameter("damping must lie in (0, 1]".into()));
    }
    let m = problem.normals.len();
    let start = evaluate(problem, vec![0.0; m])?;
    let mut run = Run { history: Vec::new(), iterations: 0, max_iter: opts.max_iter };
    let st = match opts.scheme {
        Scheme::FixedPoint => {
            let mut st = start;
            while st.max_rho > opts.tol && run.iterations < opts.max_iter {
                run.record(problem, problem, &st);
                st = match fixed_point_step(problem, &st, opts.damping) {
                    Some(s) => s,
                    None => break,
                };
            }
            st
        }
        Scheme::Newton => {
            let (st, stalled) = newton(problem, problem, start.clone(), opts.tol, opts.damping, usize::MAX, &mut run);
            if st.max_rho > opts.tol && stalled {
                continuation(problem, start, opts, &mut run)?.unwrap_or(st)
            } else {
                st
            }
        }
    };
    run.history.push(st.max_rho);
    let h: Vec<f64> = st.log_h.iter().map(|x| x.exp()).collect();
    let min_h = h.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SolveResult {
        boundary: min_h < opts.boundary_tol * st.poly.diameter(),
        converged: st.max_rho <= opts.tol,
        max_residual: st.max_rho,
        residuals: st.rho,
        polytope: st.poly,
        h,
        iterations: run.iterations,
        history: run.history,
    })
}

/// Iteration budget and residual history shared by the phases of a solve.
struct Run {
    history: Vec<f64>,
    iterations: usize,
    max_iter: usize,
}

impl Run {
    /// Records the residual against the final targets and counts a step.
    fn record(&mut self, target: &LpProblem, stage: &LpProblem, st: &State) {
        let max = st
            .rho
            .iter()
            .zip(stage.targets.iter().zip(&target.targets))
            .map(|(r, (fs, f))| ((1.0 + r) * fs / f - 1.0).abs())
            .fold(0.0, f64::max);
        self.history.push(max);
        self.iterations += 1;
    }
}

/// Damped Newton iterations on `stage`. Returns the last state and whether
/// the run stalled before reaching `tol`.
fn newton(
    target: &LpProblem,
    stage: &LpProblem,
    mut st: State,
    tol: f64,
    gamma: f64,
    max_steps: usize,
    run: &mut Run,
) -> (State, bool) {
    let mut slow = 0;
    let mut steps = 0;
    while st.max_rho > tol && run.iterations < run.max_iter && steps < max_steps {
        run.record(target, stage, &st);
        steps += 1;
        let next = newton_direction(stage, &st).and_then(|dir| line_search(stage, &st, &dir, gamma));
        let Some(next) = next else {
            return (st, true);
        };
        slow = if next.merit > (1.0 - 1e-6) * st.merit { slow + 1 } else { 0 };
        st = next;
        if slow >= 5 {
            return (st, true);
        }
    }
    (st, false)
}

fn continuation(problem: &LpProblem, start: State, opts: &SolveOptions, run: &mut Run) -> Result<Option<State>> {
    let f0: Vec<f64> = start.rho.iter().zip(&problem.targets).map(|(r, f)| (1.0 + r) * f).collect();
    let stage_at = |t: f64| LpProblem {
        targets: f0.iter().zip(&problem.targets).map(|(a, b)| a.powf(1.0 - t) * b.powf(t)).collect(),
        ..problem.clone()
    };
    let (mut t, mut dt): (f64, f64) = (0.0, 0.1);
    let mut log_h = start.log_h;
    while t < 1.0 && run.iterations < run.max_iter {
        let t1 = (t + dt).min(1.0);
        let stage = stage_at(t1);
        let tol = if t1 == 1.0 { opts.tol } else { 1e-6 };
        let trial = match evaluate(&stage, log_h.clone()) {
            Ok(s) => newton(problem, &stage, s, tol, opts.damping, 30, run).0,
            Err(_) => {
                dt *= 0.25;
                continue;
            }
        };
        if trial.max_rho <= tol {
            t = t1;
            log_h = trial.log_h;
            dt = (2.0 * dt).min(0.5);
        } else {
            dt *= 0.25;
            if dt < 1e-8 {
                return Ok(None);
            }
        }
    }
    if t < 1.0 {
        return Ok(None);
    }
    evaluate(problem, log_h).map(Some)
}

/// Fixed-point step, halved while the iterate is degenerate.
fn fixed_point_step(problem: &LpProblem, st: &State, gamma: f64) -> Option<State> {
    let dir = fixed_point_direction(problem, st);
    let mut t = gamma;
    for _ in 0..20 {
        let x: Vec<f64> = st.log_h.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
        if let Ok(next) = evaluate(problem, x) {
            return Some(next);
        }
        t *= 0.5;
    }
    None
}

/// Backtracking from step `γ` until `Σ log(1 + ρ_i)²` decreases
/// sufficiently; the Newton direction is a descent direction for it.
fn line_search(problem: &LpProblem, st: &State, dir: &[f64], gamma: f64) -> Option<State> {
    let big = dir.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let mut t = if big > 1.0 { gamma / big } else { gamma };
    for _ in 0..40 {
        let x: Vec<f64> = st.log_h.iter().zip(dir).map(|(x, d)| x + t * d).collect();
        if let Ok(next) = evaluate(problem, x) {
            if next.merit <= (1.0 - 1e-4 * t) * st.merit {
                return Some(next);
            }
        }
        t *= 0.5;
    }
    None
}

/// `ρ_i = h_i^{1-p} A_i / f_i - 1` for a polytope whose facet normals are the
/// problem's normals.
pub fn residual(poly: &Polytope, problem: &LpProblem) -> Result<Vec<f64>> {
    if poly.dim() != problem.dim || poly.facets().len() != problem.normals.len() {
        return domain("the polytope's facets do not match the problem's normals");
    }
    let matched = match_facets(poly, &problem.normals);
    let tol = poly.incidence_tol();
    matched
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let j = j.ok_or_else(|| Error::Domain(format!("no facet with normal {:?}", problem.normals[i])))?;
            let f = &poly.facets()[j];
            let h = if f.h <= tol { 0.0 } else { f.h };
            Ok(h.powf(1.0 - problem.p) * poly.facet_area(j) / problem.targets[i] - 1.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::axis_box;

    pub(crate) fn box_normals(n: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut u = vec![0.0; n];
                u[k] = s;
                out.push(u);
            }
        }
        out
    }

    #[test]
    fn cube_residuals() {
        let cube = axis_box(&[-1.0; 3], &[1.0; 3]).unwrap();
        let pr = LpProblem::new(3, 0.0, box_normals(3), vec![4.0; 6]).unwrap();
        assert!(residual(&cube, &pr).unwrap().iter().all(|r| r.abs() < 1e-14));
        let pr2 = pr.scaled_targets(2.0).unwrap();
        assert!(residual(&cube, &pr2).unwrap().iter().all(|r| (r + 0.5).abs() < 1e-14));
        let sq = LpProblem::new(2, 0.0, box_normals(2), vec![4.0; 4]).unwrap();
        assert!(residual(&cube, &sq).is_err());
    }

    #[test]
    fn perturbation_sign() {
        // Pushing one facet out makes its own residual positive for p ≤ 0.
        let pr = LpProblem::new(3, -1.0, box_normals(3), vec![4.0; 6]).unwrap();
        let bx = axis_box(&[-1.0, -1.0, -1.0], &[1.1, 1.0, 1.0]).unwrap();
        let r = residual(&bx, &pr).unwrap();
        assert!(r[0] > 0.0);
        let bx = axis_box(&[-1.0, -1.0, -1.0], &[0.9, 1.0, 1.0]).unwrap();
        assert!(residual(&bx, &pr).unwrap()[0] < 0.0);
    }

    #[test]
    fn cube_is_fixed() {
        let pr = LpProblem::new(3, 0.0, box_normals(3), vec![4.0; 6]).unwrap();
        let r = solve(&pr, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.h.iter().all(|h| (h - 1.0).abs() < 1e-12));
    }

    #[test]
    fn problem_validation() {
        assert!(LpProblem::new(3, 0.0, box_normals(3), vec![4.0; 5]).is_err());
        let half: Vec<Vec<f64>> = box_normals(3).into_iter().filter(|u| u.iter().sum::<f64>() > 0.0).collect();
        assert!(matches!(LpProblem::new(3, 0.0, half, vec![1.0; 3]), Err(Error::Problem(_))));
        assert!(LpProblem::new(2, 1.0, box_normals(2), vec![1.0; 4]).is_err());
        assert!(LpProblem::new(2, 0.0, box_normals(2), vec![1.0, 1.0, 0.0, 1.0]).is_err());
        let pr = LpProblem::new(2, 0.0, box_normals(2), vec![1.0, 2.0, 1.0, 1.0]).unwrap();
        assert!(pr.clone().with_bounds(1.0, 3.0).is_err());
        assert!(pr.with_bounds(0.9, 2.1).is_ok());
    }

    #[test]
    fn problem_json() {
        let s = r#"{"dim":2,"p":-1,"atoms":[{"u":[1,0],"f":1},{"u":[0,1],"f":1},{"u":[-1,0],"f":1},{"u":[0,-1],"f":1}]}"#;
        let pr: LpProblem = serde_json::from_str(s).unwrap();
        assert_eq!(pr.bounds(), (0.5, 2.0));
        let back: LpProblem = serde_json::from_str(&serde_json::to_string(&pr).unwrap()).unwrap();
        assert_eq!(back, pr);
    }
}
