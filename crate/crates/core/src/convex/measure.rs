use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geom::{self, norm};

use super::polytope::{ANGLE_TOL, UNIT_TOL};

/// A point mass `w` at the unit vector `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub u: Vec<f64>,
    pub w: f64,
}

/// A finite atomic measure on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureWire")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct MeasureWire {
    atoms: Vec<Atom>,
}

impl TryFrom<MeasureWire> for DiscreteMeasure {
    type Error = crate::Error;
    fn try_from(w: MeasureWire) -> Result<Self> {
        DiscreteMeasure::new(w.atoms)
    }
}

impl DiscreteMeasure {
    /// Validates unit normals, nonnegative weights and pairwise distinct normals.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.w >= 0.0) || !a.w.is_finite() {
                return domain(format!("atom {i}: weight must be finite and nonnegative"));
            }
            if (norm(&a.u) - 1.0).abs() > UNIT_TOL {
                return domain(format!("atom {i}: normal is not a unit vector"));
            }
            for (j, b) in atoms[..i].iter().enumerate() {
                if b.u.len() != a.u.len() {
                    return domain("atoms live in different dimensions");
                }
                if super::angle_between(&a.u, &b.u) <= ANGLE_TOL {
                    return domain(format!("atoms {j} and {i} share a normal"));
                }
            }
        }
        Ok(DiscreteMeasure { atoms })
    }

    pub(crate) fn new_unchecked(atoms: Vec<Atom>) -> Self {
        DiscreteMeasure { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// `Σ w_i u_i`.
    pub fn first_moment(&self) -> Vec<f64> {
        let d = self.atoms.first().map_or(0, |a| a.u.len());
        self.atoms.iter().fold(vec![0.0; d], |acc, a| geom::add(&acc, &geom::scale(&a.u, a.w)))
    }

    /// Total weight of the atoms whose normal satisfies `pred`.
    pub fn mass_where(&self, pred: impl Fn(&[f64]) -> bool) -> f64 {
        self.atoms.iter().filter(|a| pred(&a.u)).map(|a| a.w).sum()
    }
}
