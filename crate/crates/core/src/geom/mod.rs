//! Coordinate-chart Riemannian manifolds: metrics, Christoffel symbols, geodesics, curve
//! lengths and sampling lattices.

pub mod catalog;
mod curve;
mod manifold;
pub mod ode;

pub use curve::{Curve, TangentVec};
pub use manifold::{axis_ticks, Axis, Christoffel, Coords, ManifoldModel, EIGENVALUE_FLOOR, FD_STEP};
