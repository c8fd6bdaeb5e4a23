//! Unit horizontal bundles as sampled metric spaces.

use nalgebra::DVector;
use rayon::prelude::*;

use super::{BundlePoint, HorizontalBundle, PQParams};
use crate::error::{Error, Result};
use crate::geom::Coords;
use crate::linalg;
use crate::metric_space::{coord_label, grid_stencil_radius, segment_length, stencil_pairs, FiniteMetricSpace, WeightedGraph};

/// Lattice resolution of the base manifold and of each fiber sphere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSampling {
    pub resolution: Vec<usize>,
    pub sphere_resolution: usize,
}

/// Samples of a unit horizontal bundle with graph distances.
///
/// Node `k` sits over lattice point `k / fiber_count` of the base manifold.
#[derive(Clone, Debug)]
pub struct SampledBundle {
    pub points: Vec<BundlePoint>,
    pub grid: Vec<Coords>,
    pub fiber_count: usize,
    pub components: usize,
    pub space: FiniteMetricSpace,
}

/// Evenly spaced unit vectors in the span of an orthonormal frame of rank 1 or 2.
///
/// Rank 1 gives `{e, −e}`; rank 2 gives `res` points on the circle starting at `e₁`.
pub fn fiber_sphere(frame: &[DVector<f64>], res: usize) -> Result<Vec<DVector<f64>>> {
    match frame {
        [e] => Ok(vec![e.clone(), -e]),
        [e1, e2] => {
            if res < 3 {
                return Err(Error::InvalidParameter(format!("fiber circle resolution {res} < 3")));
            }
            Ok((0..res)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / res as f64;
                    e1 * t.cos() + e2 * t.sin()
                })
                .collect())
        }
        _ => Err(Error::Unsupported(format!("fiber spheres of dimension {}", frame.len().saturating_sub(1)))),
    }
}

/// Builds the sampled `(Ẽ¹, h̃_{p,q})`.
///
/// Edges join lattice neighbours (including neighbouring fiber samples on a circle). An
/// edge from `(x̃₁, ξ₁)` to `(x̃₂, ξ₂)` has length `√(ℓ² + φ²)`, with `ℓ` the `g̃`-length of
/// the coordinate segment and `φ = 2^{−p/2} |ξ₂ − τ ξ₁|` where `τ` transports along
/// that segment. The `q` term is dropped: on unit vectors `⟨Δξ, ξ⟩` is second order.
pub fn unit_bundle_space(e: &HorizontalBundle, pq: PQParams, sampling: &BundleSampling) -> Result<SampledBundle> {
    let b = e.rank();
    if b >= 3 {
        return Err(Error::Unsupported(format!("unit bundles of rank {b}")));
    }
    let m = e.manifold();
    let grid = m.sample_grid(&sampling.resolution)?;
    let fibers: Vec<Vec<DVector<f64>>> = grid
        .par_iter()
        .map(|x| {
            let frame: Vec<DVector<f64>> = e.submersion().horizontal_space(x)?.into_iter().map(|t| t.comp).collect();
            fiber_sphere(&frame, sampling.sphere_resolution)
        })
        .collect::<Result<_>>()?;
    let fiber_count = fibers[0].len();

    let mut resolution = sampling.resolution.clone();
    resolution.push(fiber_count);
    let mut periodic: Vec<bool> = m.axes().iter().map(|a| a.periodic).collect();
    periodic.push(true);
    let mut radius = vec![grid_stencil_radius(m.dim()); m.dim()];
    radius.push(if b == 1 { 0 } else { 1 });
    let pairs = stencil_pairs(&resolution, &periodic, &radius);

    let scale = 2f64.powf(-0.5 * pq.p());
    let weights: Vec<f64> = pairs
        .par_iter()
        .map(|&(n1, n2)| {
            let (g1, g2) = (n1 / fiber_count, n2 / fiber_count);
            let (xi1, xi2) = (&fibers[g1][n1 % fiber_count], &fibers[g2][n2 % fiber_count]);
            let delta = m.displacement(&grid[g1], &grid[g2]);
            let (base, moved) = if g1 == g2 {
                (0.0, xi1.clone())
            } else {
                (segment_length(m, &grid[g1], &delta)?, e.transport_step(&grid[g1], xi1, &delta)?)
            };
            let g = m.metric_at(&grid[g2])?;
            let fiber = scale * linalg::norm(&g, &(xi2 - moved));
            Ok(base.hypot(fiber))
        })
        .collect::<Result<_>>()?;

    let n = grid.len() * fiber_count;
    let mut graph = WeightedGraph::new(n);
    for (&(a, c), w) in pairs.iter().zip(weights) {
        graph.add_edge(a, c, w)?;
    }
    let expected = if b == 1 { 2 } else { 1 };
    let (components, _) = graph.components();
    if components != expected {
        return Err(Error::DisconnectedGraph { found: components, expected });
    }
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (x, fib) in grid.iter().zip(&fibers) {
        for (k, xi) in fib.iter().enumerate() {
            points.push(BundlePoint { base: x.clone(), fiber: xi.clone() });
            labels.push(format!("{}|{k}", coord_label(x)));
        }
    }
    let space = graph.metric_space(labels)?;
    Ok(SampledBundle { points, grid, fiber_count, components, space })
}

impl SampledBundle {
    /// Node nearest to `(x, u)`: nearest lattice point first, then the closest fiber
    /// sample in the metric of `e`'s manifold.
    pub fn nearest_index(&self, e: &HorizontalBundle, x: &Coords, u: &DVector<f64>) -> Result<usize> {
        let m = e.manifold();
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.grid.iter().enumerate() {
            let d = m.displacement(p, x).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        let gi = best.0;
        let g = m.metric_at(&self.grid[gi])?;
        let mut best = (0, f64::INFINITY);
        for k in 0..self.fiber_count {
            let node = gi * self.fiber_count + k;
            let d = linalg::norm(&g, &(&self.points[node].fiber - u));
            if d < best.1 {
                best = (node, d);
            }
        }
        Ok(best.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::catalog;
    use std::f64::consts::PI;

    #[test]
    fn unit_circle_bundle_is_two_circles() {
        let e = HorizontalBundle::tangent(catalog::circle(1.0));
        let s = unit_bundle_space(&e, PQParams::cheeger_gromoll(), &BundleSampling { resolution: vec![32], sphere_resolution: 8 })
            .unwrap();
        assert_eq!(s.components, 2);
        assert_eq!(s.space.len(), 64);
        // farthest point on the same circle sits half way round
        let same: f64 = (0..64).step_by(2).map(|j| s.space.d(0, j)).fold(0.0, f64::max);
        assert!((2.0 * same - 2.0 * PI).abs() < 0.05 * 2.0 * PI);
        assert_eq!(s.space.d(0, 1), f64::INFINITY);
    }

    #[test]
    fn fiber_circle_circumference() {
        // unit tangent circle over one point of the flat torus
        let e = HorizontalBundle::tangent(catalog::flat_torus());
        for p in [0.0, 1.0, 2.0] {
            let pq = PQParams::new(p, 1.0).unwrap();
            let s = unit_bundle_space(&e, pq, &BundleSampling { resolution: vec![4, 4], sphere_resolution: 16 }).unwrap();
            let half = s.space.d(0, 8);
            let expected = PI * 2f64.powf(-0.5 * p);
            assert!((half - expected).abs() < 0.05 * expected, "p={p}: {half} vs {expected}");
        }
    }

    #[test]
    fn dropped_q_term_vanishes_under_refinement() {
        // the q-weighted part of a fiber step is second order, so the half circumference
        // converges at the polygon rate whatever q is
        let e = HorizontalBundle::tangent(catalog::flat_torus());
        let expected = PI * 2f64.powf(-0.5);
        let mut errors = Vec::new();
        for res in [8, 16, 32] {
            let pq = PQParams::new(1.0, 3.0).unwrap();
            let s = unit_bundle_space(&e, pq, &BundleSampling { resolution: vec![4, 4], sphere_resolution: res }).unwrap();
            errors.push((s.space.d(0, res / 2) - expected).abs());
        }
        assert!(errors[0] < 0.05 * expected);
        for w in errors.windows(2) {
            assert!(w[1] < 0.3 * w[0], "{errors:?}");
        }
    }

    #[test]
    fn fiber_sphere_rejects_high_rank() {
        let e = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(matches!(fiber_sphere(&[e.clone(), e.clone(), e], 4), Err(Error::Unsupported(_))));
    }
}
