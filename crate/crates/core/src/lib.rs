//! Discrete L_p Minkowski problems for `p < 1`.
//!
//! The crate covers four layers:
//!
//! - [`convex`]: polytopes in dimensions 2 and 3 with support functions,
//!   faces, normal cones and (L_p) surface area measures;
//! - [`monge_ampere`]: piecewise-linear convex functions, their Monge-Ampère
//!   measures in the Alexandrov sense and the transfer of a spherical equation
//!   to a tangent hyperplane;
//! - [`closed_forms`]: two explicit solutions of the singular equation
//!   `v^{1-p} det ∇²v = g` (one vanishing on a line, one on a body whose
//!   origin lies inside a facet) and the dimension bounds they are sharp for;
//! - [`solver`] and [`diagnostics`]: a numerical solver for the discrete
//!   problem and the regularity checks applied to its output.
//!
//! Heavy sweeps run through [`Exec`], which uses rayon when the `parallel`
//! feature is enabled.

pub mod closed_forms;
pub mod convex;
pub mod error;
pub mod exec;
pub mod geom;
pub mod diagnostics;
pub mod monge_ampere;
pub mod selftest;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Exec;
