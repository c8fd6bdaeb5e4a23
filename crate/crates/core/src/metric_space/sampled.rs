use rayon::prelude::*;

use super::{stencil_pairs, FiniteMetricSpace, WeightedGraph};
use crate::error::{Error, Result};
use crate::geom::{Coords, ManifoldModel};
use crate::linalg;

/// Stencil radius along lattice axes: 2 for curves and surfaces, 1 in higher dimension.
pub fn grid_stencil_radius(dim: usize) -> usize {
    if dim <= 2 {
        2
    } else {
        1
    }
}

/// A manifold sampled on its coordinate lattice, with graph geodesic distances.
#[derive(Clone, Debug)]
pub struct SampledManifold {
    pub resolution: Vec<usize>,
    pub points: Vec<Coords>,
    pub space: FiniteMetricSpace,
}

pub(crate) fn coord_label(x: &Coords) -> String {
    x.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(";")
}

/// `g`-length of the straight coordinate segment from `a` by `delta`, midpoint rule.
pub(crate) fn segment_length(m: &ManifoldModel, a: &Coords, delta: &Coords) -> Result<f64> {
    let g = m.metric_at(&(a + delta * 0.5))?;
    Ok(linalg::norm(&g, delta))
}

/// Samples `m` on its lattice and measures shortest paths in the stencil graph whose edges
/// are weighted by the metric length of the connecting coordinate segment.
pub fn sample_manifold(m: &ManifoldModel, resolution: &[usize]) -> Result<SampledManifold> {
    let points = m.sample_grid(resolution)?;
    let periodic: Vec<bool> = m.axes().iter().map(|a| a.periodic).collect();
    let radius = vec![grid_stencil_radius(m.dim()); m.dim()];
    let pairs = stencil_pairs(resolution, &periodic, &radius);
    let weights: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| segment_length(m, &points[a], &m.displacement(&points[a], &points[b])))
        .collect::<Result<_>>()?;
    let mut graph = WeightedGraph::new(points.len());
    for (&(a, b), w) in pairs.iter().zip(weights) {
        graph.add_edge(a, b, w)?;
    }
    let (count, _) = graph.components();
    if count != 1 {
        return Err(Error::DisconnectedGraph { found: count, expected: 1 });
    }
    let space = graph.metric_space(points.iter().map(coord_label).collect())?;
    Ok(SampledManifold { resolution: resolution.to_vec(), points, space })
}

impl SampledManifold {
    /// Index of the sample nearest to `y` in unwrapped coordinate distance.
    pub fn nearest_index(&self, m: &ManifoldModel, y: &Coords) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points.iter().enumerate() {
            let d = m.displacement(p, y).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Largest distance from a sample to its nearest other sample.
    pub fn mesh(&self) -> f64 {
        let n = self.space.len();
        if n == 1 {
            return 0.0;
        }
        (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| self.space.d(i, j)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::catalog;
    use nalgebra::DVector;
    use std::f64::consts::PI;

    #[test]
    fn sampled_circle_distances_are_arcs() {
        let c = catalog::circle(1.0);
        let s = sample_manifold(&c, &[32]).unwrap();
        assert!((s.space.diameter() - PI).abs() < 1e-12);
        assert!((s.mesh() - 2.0 * PI / 32.0).abs() < 1e-12);
        assert_eq!(s.nearest_index(&c, &DVector::from_vec(vec![2.0 * PI - 0.01])), 0);
    }

    #[test]
    fn sampled_sphere_diameter_near_pi() {
        let s = sample_manifold(&catalog::round_sphere(), &[24, 24]).unwrap();
        let coarse = sample_manifold(&catalog::round_sphere(), &[12, 12]).unwrap();
        let d = s.space.diameter();
        assert!((d - PI).abs() < 0.1 * PI, "diameter {d}");
        assert!((coarse.space.diameter() - d).abs() < 0.1 * d);
        assert!(s.space.triangle_violation() < 1e-9);
    }
}
