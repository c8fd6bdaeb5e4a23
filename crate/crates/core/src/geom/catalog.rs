//! Model manifolds used by the scenario catalog.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use super::{Axis, ManifoldModel};

/// Polar margin δ: sampled polar angles stay in `[δ, π − δ]`.
pub const POLAR_MARGIN: f64 = 1e-2;

const TAU: f64 = 2.0 * PI;

/// `Γ^k_{ij}` of `dθ² + sin²θ dφ²` (any constant multiple of it).
fn polar_christoffel(theta: f64, k: usize, i: usize, j: usize) -> f64 {
    match (k, i.min(j), i.max(j)) {
        (0, 1, 1) => -theta.sin() * theta.cos(),
        (1, 0, 1) => theta.cos() / theta.sin(),
        _ => 0.0,
    }
}

/// Flat square torus `R² / (2πZ)²`.
pub fn flat_torus() -> ManifoldModel {
    ManifoldModel::new("flat-torus", vec![Axis::periodic(0.0, TAU), Axis::periodic(0.0, TAU)], |_| {
        DMatrix::identity(2, 2)
    })
    .with_christoffel(|_, _, _, _| 0.0)
    .with_embedding(|x| {
        let (r_major, r_minor) = (2.0, 1.0);
        let rho = r_major + r_minor * x[1].cos();
        DVector::from_vec(vec![rho * x[0].cos(), rho * x[0].sin(), r_minor * x[1].sin()])
    })
}

/// Circle of the given radius parametrised by angle in `[0, 2π)`.
pub fn circle(radius: f64) -> ManifoldModel {
    let r2 = radius * radius;
    ManifoldModel::new("circle", vec![Axis::periodic(0.0, TAU)], move |_| DMatrix::from_element(1, 1, r2))
        .with_christoffel(|_, _, _, _| 0.0)
        .with_embedding(move |x| DVector::from_vec(vec![radius * x[0].cos(), radius * x[0].sin()]))
}

/// Round 2-sphere of the given radius in polar coordinates `(θ, φ)`.
pub fn sphere(radius: f64) -> ManifoldModel {
    let r2 = radius * radius;
    ManifoldModel::new(
        "sphere",
        vec![Axis::interval(0.0, PI).with_margin(POLAR_MARGIN), Axis::periodic(0.0, TAU)],
        move |x| {
            let s = x[0].sin();
            DMatrix::from_diagonal(&DVector::from_vec(vec![r2, r2 * s * s]))
        },
    )
    .with_christoffel(|x, k, i, j| polar_christoffel(x[0], k, i, j))
    .with_embedding(move |x| {
        DVector::from_vec(vec![
            radius * x[0].sin() * x[1].cos(),
            radius * x[0].sin() * x[1].sin(),
            radius * x[0].cos(),
        ])
    })
}

/// Unit round 2-sphere.
pub fn round_sphere() -> ManifoldModel {
    sphere(1.0).renamed("round-sphere")
}

/// `S² × S¹` with the product of the unit round metric and the unit circle.
pub fn sphere_times_circle() -> ManifoldModel {
    ManifoldModel::new(
        "sphere-x-circle",
        vec![
            Axis::interval(0.0, PI).with_margin(POLAR_MARGIN),
            Axis::periodic(0.0, TAU),
            Axis::periodic(0.0, TAU),
        ],
        |x| {
            let s = x[0].sin();
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, s * s, 1.0]))
        },
    )
    .with_christoffel(|x, k, i, j| if k < 2 && i < 2 && j < 2 { polar_christoffel(x[0], k, i, j) } else { 0.0 })
}

/// Unit 3-sphere in Hopf coordinates `(η, ξ₁, ξ₂)`:
/// `(z₁, z₂) = (cos η e^{iξ₁}, sin η e^{iξ₂})`, metric `dη² + cos²η dξ₁² + sin²η dξ₂²`.
pub fn hopf_three_sphere() -> ManifoldModel {
    ManifoldModel::new(
        "three-sphere-hopf",
        vec![
            Axis::interval(0.0, FRAC_PI_2).with_margin(0.5 * POLAR_MARGIN),
            Axis::periodic(0.0, TAU),
            Axis::periodic(0.0, TAU),
        ],
        |x| {
            let (c, s) = (x[0].cos(), x[0].sin());
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, c * c, s * s]))
        },
    )
    .with_christoffel(|x, k, i, j| {
        let (c, s) = (x[0].cos(), x[0].sin());
        match (k, i.min(j), i.max(j)) {
            (0, 1, 1) => s * c,
            (0, 2, 2) => -s * c,
            (1, 0, 1) => -s / c,
            (2, 0, 2) => c / s,
            _ => 0.0,
        }
    })
    .with_embedding(|x| {
        let (c, s) = (x[0].cos(), x[0].sin());
        DVector::from_vec(vec![c * x[1].cos(), c * x[1].sin(), s * x[2].cos(), s * x[2].sin()])
    })
}
