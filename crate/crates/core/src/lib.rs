//! Numerical (p,q)-metrics on unit horizontal bundles of Riemannian submersions.
//!
//! The crate is organised bottom-up:
//!
//! - [`geom`]: coordinate-chart manifolds, Christoffel symbols, geodesics and curves.
//! - [`submersion`]: vertical/horizontal splittings, horizontal lifts, bracket
//!   diagnostics and warped metrics.
//! - [`bundle`]: connection maps, the (p,q)-metric, parallel transport in the horizontal
//!   bundle, the `H' ⊕ H'' ⊕ V` splitting of the unit horizontal bundle, and checks that
//!   the bundle differential behaves as a Riemannian submersion.
//! - [`metric_space`]: finite metric spaces, ε-nets and Gromov-Hausdorff machinery.
//! - [`lab`]: the scenario catalog, collapse experiments and verification reports.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/` directory.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod error;
pub mod geom;
pub mod lab;
pub mod linalg;
pub mod metric_space;
pub mod submersion;

pub use error::{Error, Result};
