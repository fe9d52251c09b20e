//! A nonnegative convex solution of `v^{1-p} det ∇²v = g` on
//! `[-1,1] × B^{n-1}` that vanishes on the line `{x₂ = 0}`.
//!
//! With `r = ‖x₂‖`, `f(r) = r^α` and `g(x₁) = 1 + βx₁²`,
//! `v(x₁, x₂) = r + f(r) g(x₁)` where `α = (p+n-1)/2`.

use serde::{Deserialize, Serialize};

use super::HalfIntegerForm;
use crate::error::{check_exponent, Error, Result};
use crate::exec::Exec;
use crate::geom::norm;

/// Parameters `(n, p, β)` with `p > 3 - n` (so `α > 1`) and `β > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VanishingLineWire", into = "VanishingLineWire")]
pub struct VanishingLine {
    n: usize,
    p: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct VanishingLineWire {
    n: usize,
    p: f64,
    beta: f64,
}

impl TryFrom<VanishingLineWire> for VanishingLine {
    type Error = Error;
    fn try_from(w: VanishingLineWire) -> Result<Self> {
        VanishingLine::new(w.n, w.p, w.beta)
    }
}

impl From<VanishingLine> for VanishingLineWire {
    fn from(v: VanishingLine) -> Self {
        VanishingLineWire { n: v.n, p: v.p, beta: v.beta }
    }
}

/// Closed-form quantities at one point `(x₁, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingLineEval {
    pub value: f64,
    /// Hessian restricted to the plane spanned by `e₁` and the radial
    /// direction of `x₂`, in the order `(x₁, r)`.
    pub block: [[f64; 2]; 2],
    /// Eigenvalue in each direction of `x₂` orthogonal to the radial one.
    pub tangential: f64,
    pub tangential_multiplicity: usize,
    pub block_det: f64,
    /// The factored form `2αβ r^{2(α-1)} (α - 1 - (1+α)βx₁²)`.
    pub block_det_factored: f64,
    pub det: f64,
    pub residual: f64,
    pub min_eigenvalue: f64,
}

/// Sampling grid over `[-1,1] × [r_min, 1]`; radii are log-spaced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_x1: usize,
    pub n_r: usize,
    pub r_min: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n_x1: 200, n_r: 200, r_min: 1e-4 }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = linspace(-1.0, 1.0, self.n_x1);
        let rs: Vec<f64> = linspace(self.r_min.ln(), 0.0, self.n_r).into_iter().map(f64::exp).collect();
        let mut out = Vec::with_capacity(xs.len() * rs.len());
        for &x in &xs {
            for &r in &rs {
                out.push((x, r));
            }
        }
        out
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub x1: f64,
    pub r: f64,
    pub value: f64,
    pub det: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub params: VanishingLine,
    pub inf_residual: f64,
    pub sup_residual: f64,
    pub ratio: f64,
    /// Every Hessian eigenvalue on the grid is positive.
    pub convex: bool,
    pub min_eigenvalue: f64,
    /// The order in `r` of the residual, `2α - n + 1 - p`, as a linear form in `(n, p)`.
    pub residual_order: HalfIntegerForm,
    pub residual_order_is_zero: bool,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl VanishingLine {
    pub fn new(n: usize, p: f64, beta: f64) -> Result<Self> {
        check_exponent(p)?;
        if n < 2 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 2")));
        }
        if !(p > 3.0 - n as f64) {
            return Err(Error::Parameter(format!("need p > 3 - n = {}, got p = {p}", 3.0 - n as f64)));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!("β must be positive, got {beta}")));
        }
        Ok(VanishingLine { n, p, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        (self.p + self.n as f64 - 1.0) / 2.0
    }

    /// `α` as the form `(p + n - 1)/2`.
    pub fn alpha_form() -> HalfIntegerForm {
        HalfIntegerForm { p: 1, n: 1, constant: -1 }
    }

    /// `2α - n + 1 - p`, the power of `r` governing the residual near the line.
    pub fn residual_order_form() -> HalfIntegerForm {
        Self::alpha_form()
            .scaled(2)
            .plus(HalfIntegerForm::n().scaled(-1))
            .plus(HalfIntegerForm::constant(1))
            .plus(HalfIntegerForm::p().scaled(-1))
    }

    /// Largest `β` keeping the block determinant positive on `x₁ ∈ [-1,1]`.
    pub fn beta_threshold(&self) -> f64 {
        let a = self.alpha();
        (a - 1.0) / (1.0 + a)
    }

    pub fn value(&self, x1: f64, r: f64) -> f64 {
        r + r.powf(self.alpha()) * (1.0 + self.beta * x1 * x1)
    }

    pub fn eval(&self, x1: f64, r: f64) -> Result<VanishingLineEval> {
        if !x1.is_finite() || !r.is_finite() || r < 0.0 {
            return Err(Error::Domain(format!("invalid point (x₁, r) = ({x1}, {r})")));
        }
        if r == 0.0 {
            return Err(Error::Singular("the Hessian is singular on the line r = 0".into()));
        }
        let (a, b) = (self.alpha(), self.beta);
        let f = r.powf(a);
        let f1 = a * r.powf(a - 1.0);
        let f2 = a * (a - 1.0) * r.powf(a - 2.0);
        let g = 1.0 + b * x1 * x1;
        let g1 = 2.0 * b * x1;
        let g2 = 2.0 * b;
        let block = [[f * g2, f1 * g1], [f1 * g1, f2 * g]];
        let tangential = (1.0 + f1 * g) / r;
        let m = self.n - 2;
        let block_det = block[0][0] * block[1][1] - block[0][1] * block[1][0];
        let block_det_factored = 2.0 * a * b * r.powf(2.0 * (a - 1.0)) * (a - 1.0 - (1.0 + a) * b * x1 * x1);
        let det = block_det * tangential.powi(m as i32);
        let value = r + f * g;
        let residual = value.powf(1.0 - self.p) * det;
        let (e1, e2) = sym2_eigen(block);
        let mut min_eigenvalue = e1.min(e2);
        if m > 0 {
            min_eigenvalue = min_eigenvalue.min(tangential);
        }
        Ok(VanishingLineEval {
            value,
            block,
            tangential,
            tangential_multiplicity: m,
            block_det,
            block_det_factored,
            det,
            residual,
            min_eigenvalue,
        })
    }

    /// Limit of the residual as `r → 0⁺` at fixed `x₁`.
    pub fn residual_on_line(&self, x1: f64) -> f64 {
        let (a, b) = (self.alpha(), self.beta);
        2.0 * a * b * (a - 1.0 - (1.0 + a) * b * x1 * x1)
    }

    /// Value at an ambient point `x ∈ ℝⁿ`.
    pub fn value_at(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.value(x[0], norm(&x[1..])))
    }

    /// Full `n × n` Hessian at an ambient point off the line.
    pub fn hessian_at(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_point(x)?;
        let r = norm(&x[1..]);
        let e = self.eval(x[0], r)?;
        let w: Vec<f64> = x[1..].iter().map(|t| t / r).collect();
        let n = self.n;
        let mut h = vec![vec![0.0; n]; n];
        h[0][0] = e.block[0][0];
        for j in 1..n {
            h[0][j] = e.block[0][1] * w[j - 1];
            h[j][0] = h[0][j];
            for k in 1..n {
                let wjk = w[j - 1] * w[k - 1];
                let id = if j == k { 1.0 } else { 0.0 };
                h[j][k] = e.block[1][1] * wjk + e.tangential * (id - wjk);
            }
        }
        Ok(h)
    }

    /// Right-hand side `v^{1-p} det ∇²v` at an ambient point, extended to the
    /// line by its limit.
    pub fn rhs_at(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let r = norm(&x[1..]);
        if r == 0.0 {
            return Ok(self.residual_on_line(x[0]));
        }
        Ok(self.eval(x[0], r)?.residual)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Domain(format!("point must have {} components", self.n)));
        }
        Ok(())
    }

    /// Sweeps the grid and reports residual bounds and convexity.
    pub fn verify(&self, grid: &Grid, exec: Exec) -> Result<VerifyReport> {
        if grid.n_x1 == 0 || grid.n_r == 0 || !(grid.r_min > 0.0 && grid.r_min <= 1.0) {
            return Err(Error::Parameter("grid needs points and 0 < r_min ≤ 1".into()));
        }
        let pts = grid.points();
        let evals = exec.map(&pts, |&(x1, r)| self.eval(x1, r).map(|e| (x1, r, e)));
        let mut rows = Vec::with_capacity(evals.len());
        let mut inf = f64::INFINITY;
        let mut sup = f64::NEG_INFINITY;
        let mut min_eig = f64::INFINITY;
        for item in evals {
            let (x1, r, e) = item?;
            inf = inf.min(e.residual);
            sup = sup.max(e.residual);
            min_eig = min_eig.min(e.min_eigenvalue);
            rows.push(SweepRow { x1, r, value: e.value, det: e.det, residual: e.residual });
        }
        let order = Self::residual_order_form();
        Ok(VerifyReport {
            params: *self,
            inf_residual: inf,
            sup_residual: sup,
            ratio: sup / inf,
            convex: min_eig > 0.0,
            min_eigenvalue: min_eig,
            residual_order: order,
            residual_order_is_zero: order.is_zero(),
            rows,
        })
    }
}

/// Eigenvalues of a symmetric 2×2 matrix.
fn sym2_eigen(m: [[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let d = ((m[0][0] - m[1][1]) * 0.5).hypot(m[0][1]);
    (0.5 * tr - d, 0.5 * tr + d)
}
