//! A convex body whose origin lies in the relative interior of a facet while
//! its L_p area measure has a positive continuous density.
//!
//! Below height 1 the body is `{x_n ≥ g(‖x'‖)}` with `g(r) = (r-1)_+^q` and
//! `q = (p+n-1)/(p+n-2)`. Restricting the support function to the tangent
//! plane at the south pole gives the radial profile
//! `v(z) = z + C z^m`, `C = (q-1)/q^m`, `m = n-1+p`, valid for `0 ≤ z ≤ q`.

use serde::{Deserialize, Serialize};

use crate::convex::Polytope;
use crate::error::{check_exponent, Error, Result};
use crate::exec::Exec;
use crate::geom::norm;

/// Parameters `(n, p)` with `2 - n < p < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FacetOriginWire", into = "FacetOriginWire")]
pub struct FacetOrigin {
    n: usize,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct FacetOriginWire {
    n: usize,
    p: f64,
}

impl TryFrom<FacetOriginWire> for FacetOrigin {
    type Error = Error;
    fn try_from(w: FacetOriginWire) -> Result<Self> {
        FacetOrigin::new(w.n, w.p)
    }
}

impl From<FacetOrigin> for FacetOriginWire {
    fn from(v: FacetOrigin) -> Self {
        FacetOriginWire { n: v.n, p: v.p }
    }
}

/// Profile quantities at radius `z > 0` of the tangent plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FacetOriginEval {
    pub value: f64,
    /// Second derivative along the radial direction.
    pub radial: f64,
    /// Eigenvalue in each of the `n - 2` directions orthogonal to the radius.
    pub tangential: f64,
    pub tangential_multiplicity: usize,
    pub det: f64,
    pub residual: f64,
}

/// One CSV row of a profile sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub z: f64,
    pub value: f64,
    pub det: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub params: FacetOrigin,
    pub value_at_origin: f64,
    pub limit_constant: f64,
    pub inf_residual: f64,
    pub sup_residual: f64,
    #[serde(skip)]
    pub rows: Vec<ProfileRow>,
}

/// Resolution of the polytopal body: `angular` points per ring, `rings`
/// rings on the curved part below height 1 and `cap_rings` rings on the
/// closing cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyMesh {
    pub angular: usize,
    pub rings: usize,
    pub cap_rings: usize,
}

impl Default for BodyMesh {
    fn default() -> Self {
        BodyMesh { angular: 64, rings: 12, cap_rings: 4 }
    }
}

impl FacetOrigin {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_exponent(p)?;
        if n < 2 {
            return Err(Error::Parameter(format!("dimension n = {n} must be at least 2")));
        }
        if !(p > 2.0 - n as f64) {
            return Err(Error::Parameter(format!("need p > 2 - n = {}, got p = {p}", 2.0 - n as f64)));
        }
        let f = FacetOrigin { n, p };
        debug_assert!(f.q() > 1.0);
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        let n = self.n as f64;
        (self.p + n - 1.0) / (self.p + n - 2.0)
    }

    /// `m = n - 1 + p`, the power in the profile.
    pub fn exponent(&self) -> f64 {
        self.n as f64 - 1.0 + self.p
    }

    /// `C = (q-1)/q^m`.
    pub fn coefficient(&self) -> f64 {
        let q = self.q();
        (q - 1.0) / q.powf(self.exponent())
    }

    /// Height profile of the lower boundary, `g(r) = (r-1)_+^q`.
    pub fn lower_boundary(&self, r: f64) -> f64 {
        if r <= 1.0 {
            0.0
        } else {
            (r - 1.0).powf(self.q())
        }
    }

    /// Radius on the lower boundary where the slope equals `z`.
    pub fn contact_radius(&self, z: f64) -> f64 {
        let q = self.q();
        1.0 + (z / q).powf(1.0 / (q - 1.0))
    }

    pub fn value(&self, z: f64) -> f64 {
        z + self.coefficient() * z.powf(self.exponent())
    }

    pub fn eval(&self, z: f64) -> Result<FacetOriginEval> {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::Domain(format!("radius must be nonnegative, got {z}")));
        }
        if z == 0.0 {
            return Err(Error::Singular("the profile is not differentiable at the origin".into()));
        }
        let (c, m) = (self.coefficient(), self.exponent());
        let value = self.value(z);
        let radial = c * m * (m - 1.0) * z.powf(m - 2.0);
        let tangential = 1.0 / z + c * m * z.powf(m - 2.0);
        let k = self.n - 2;
        let det = radial * tangential.powi(k as i32);
        Ok(FacetOriginEval {
            value,
            radial,
            tangential,
            tangential_multiplicity: k,
            det,
            residual: value.powf(1.0 - self.p) * det,
        })
    }

    /// Limit of the residual as `z → 0⁺`, by Richardson extrapolation of the
    /// samples at `z = 10⁻³, …, 10⁻⁶` with the leading correction `z^{m-1}`.
    pub fn limit_constant(&self) -> f64 {
        let s = self.exponent() - 1.0;
        let ratio = 10f64.powf(s);
        let samples: Vec<f64> = (3..=6)
            .map(|k| self.eval(10f64.powi(-k)).map_or(f64::NAN, |e| e.residual))
            .collect();
        let mut level = samples;
        while level.len() > 1 {
            level = level.windows(2).map(|w| (ratio * w[1] - w[0]) / (ratio - 1.0)).collect();
        }
        level[0]
    }

    /// Profile sweep over `n_z` log-spaced radii in `[z_min, 1]`.
    pub fn verify(&self, n_z: usize, z_min: f64, exec: Exec) -> Result<ProfileReport> {
        if n_z < 2 || !(z_min > 0.0 && z_min < 1.0) {
            return Err(Error::Parameter("need at least two radii and 0 < z_min < 1".into()));
        }
        let zs: Vec<f64> =
            (0..n_z).map(|i| (z_min.ln() * (1.0 - i as f64 / (n_z - 1) as f64)).exp()).collect();
        let rows = exec
            .map(&zs, |&z| self.eval(z).map(|e| ProfileRow { z, value: e.value, det: e.det, residual: e.residual }))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let inf_residual = rows.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
        let sup_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
        Ok(ProfileReport {
            params: *self,
            value_at_origin: self.value(0.0),
            limit_constant: self.limit_constant(),
            inf_residual,
            sup_residual,
            rows,
        })
    }

    /// Value at `y ∈ ℝ^{n-1}`.
    pub fn value_at(&self, y: &[f64]) -> Result<f64> {
        self.check_point(y)?;
        Ok(self.value(norm(y)))
    }

    pub fn gradient_at(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_point(y)?;
        let z = norm(y);
        if z == 0.0 {
            return Err(Error::Singular("the profile is not differentiable at the origin".into()));
        }
        let d = 1.0 + self.coefficient() * self.exponent() * z.powf(self.exponent() - 1.0);
        Ok(y.iter().map(|t| d * t / z).collect())
    }

    pub fn hessian_at(&self, y: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_point(y)?;
        let z = norm(y);
        let e = self.eval(z)?;
        let d = y.len();
        let mut h = vec![vec![0.0; d]; d];
        for j in 0..d {
            for k in 0..d {
                let w = y[j] * y[k] / (z * z);
                let id = if j == k { 1.0 } else { 0.0 };
                h[j][k] = e.radial * w + e.tangential * (id - w);
            }
        }
        Ok(h)
    }

    /// `v^{1-p} det ∇²v` at `y ∈ ℝ^{n-1}`, extended to the origin by its limit.
    pub fn rhs_at(&self, y: &[f64]) -> Result<f64> {
        self.check_point(y)?;
        let z = norm(y);
        if z == 0.0 {
            return Ok(self.limit_constant());
        }
        Ok(self.eval(z)?.residual)
    }

    fn check_point(&self, y: &[f64]) -> Result<()> {
        if y.len() + 1 != self.n {
            return Err(Error::Domain(format!("point must have {} components", self.n - 1)));
        }
        Ok(())
    }

    /// Polytopal inscription of the body in dimension 3: the unit bottom
    /// polygon at height 0, rings sampled from the lower boundary up to height
    /// 1 and a polygonal cap through `(0, 0, 2)`.
    pub fn body(&self, mesh: BodyMesh) -> Result<Polytope> {
        if self.n != 3 {
            return Err(Error::Parameter(format!("the body is built for n = 3 only, got n = {}", self.n)));
        }
        if mesh.angular < 3 {
            return Err(Error::Meshing(format!(
                "{} angular samples cannot enclose the origin in the bottom facet",
                mesh.angular
            )));
        }
        if mesh.rings < 1 {
            return Err(Error::Meshing("at least one ring is needed on the curved part".into()));
        }
        let k = mesh.angular;
        let angles: Vec<(f64, f64)> = (0..k)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                (t.cos(), t.sin())
            })
            .collect();
        let mut profile: Vec<(f64, f64)> = vec![(1.0, 0.0)];
        for i in 1..=mesh.rings {
            let r = 1.0 + i as f64 / mesh.rings as f64;
            profile.push((r, self.lower_boundary(r)));
        }
        for j in 1..=mesh.cap_rings {
            let phi = std::f64::consts::FRAC_PI_2 * j as f64 / (mesh.cap_rings + 1) as f64;
            profile.push((2.0 * phi.cos(), 1.0 + phi.sin()));
        }
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(profile.len() * k + 1);
        for &(r, z) in &profile {
            for &(c, s) in &angles {
                pts.push(vec![r * c, r * s, z]);
            }
        }
        pts.push(vec![0.0, 0.0, 2.0]);
        Polytope::from_vertices(3, &pts)
    }

    /// Area of the bottom facet of [`FacetOrigin::body`]: a regular polygon
    /// inscribed in the unit circle.
    pub fn bottom_facet_area(mesh: BodyMesh) -> f64 {
        let k = mesh.angular as f64;
        0.5 * k * (2.0 * std::f64::consts::PI / k).sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        let f = FacetOrigin::new(3, 0.5).unwrap();
        assert!((f.q() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.value(0.0), 0.0);
        let expect = 1.0 + (2.0 / 3.0) / (5.0f64 / 3.0).powf(2.5);
        assert!((f.value(1.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn parameter_range_is_open() {
        assert!(FacetOrigin::new(3, -1.0).is_err());
        assert!(FacetOrigin::new(3, -0.999).is_ok());
        assert!(FacetOrigin::new(3, 1.0).is_err());
        assert!(FacetOrigin::new(2, 0.0).is_err());
        assert!(FacetOrigin::new(2, 0.3).is_ok());
        let f = FacetOrigin::new(3, 0.5).unwrap();
        assert!(matches!(f.eval(0.0), Err(Error::Singular(_))));
    }

    #[test]
    fn profile_is_support_of_lower_boundary() {
        // v(z) = max over the lower boundary of ⟨(r, g(r)), (z, -1)⟩,
        // attained at the contact radius.
        let f = FacetOrigin::new(3, 0.2).unwrap();
        for z in [0.05, 0.3, 1.0] {
            let r = f.contact_radius(z);
            let direct = r * z - f.lower_boundary(r);
            assert!((direct - f.value(z)).abs() < 1e-12);
            let brute = (0..=200_000)
                .map(|i| 1.0 + i as f64 / 200_000.0)
                .map(|r| r * z - f.lower_boundary(r))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((brute - f.value(z)).abs() < 1e-8);
        }
    }

    #[test]
    fn body_bottom_facet() {
        let f = FacetOrigin::new(3, 0.5).unwrap();
        let mesh = BodyMesh { angular: 16, rings: 4, cap_rings: 2 };
        let k = f.body(mesh).unwrap();
        let i = k.facet_with_normal(&[0.0, 0.0, -1.0]).unwrap();
        assert!(k.facets()[i].h.abs() < 1e-15);
        assert!((k.facet_area(i) - FacetOrigin::bottom_facet_area(mesh)).abs() < 1e-12);
        assert!(f.body(BodyMesh { angular: 2, ..mesh }).is_err());
        assert!(FacetOrigin::new(4, 0.5).unwrap().body(mesh).is_err());
    }
}
