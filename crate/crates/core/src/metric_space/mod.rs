//! Finite metric spaces, ε-nets and Gromov-Hausdorff machinery.

mod gh;
mod graph;
mod net;
mod sampled;

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub use gh::{distortion, gh_bounds, gh_exact, gh_upper, Correspondence, GhBounds, GH_EXACT_LIMIT};
pub use graph::{stencil_pairs, WeightedGraph};
pub use net::{covering_radius, eps_net, merge_fiber_nets, project_net, NetReport};
pub use sampled::{grid_stencil_radius, sample_manifold, SampledManifold};
pub(crate) use sampled::{coord_label, segment_length};

/// Allowed asymmetry of a distance matrix.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// `|a − b|` for distances that may be `+∞` (points in different components).
/// Two infinite distances agree; a finite and an infinite one differ by `+∞`.
pub fn distance_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

/// A finite metric space given by labels and a dense distance matrix.
///
/// Distances may be `+∞` between points in different components.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, a zero diagonal and nonnegativity. `dist` is row-major.
    pub fn new(labels: Vec<String>, dist: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidMetricSpace("a metric space needs at least one point".into()));
        }
        if dist.len() != n * n {
            return Err(Error::InvalidMetricSpace(format!("{} entries for {n} points", dist.len())));
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::InvalidMetricSpace(format!("d({i},{i}) = {}", dist[i * n + i])));
            }
            for j in 0..n {
                let d = dist[i * n + j];
                if d.is_nan() || d < 0.0 {
                    return Err(Error::InvalidMetricSpace(format!("d({i},{j}) = {d}")));
                }
                if distance_gap(d, dist[j * n + i]) > SYMMETRY_TOL {
                    return Err(Error::InvalidMetricSpace(format!("d({i},{j}) ≠ d({j},{i})")));
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let dist = (0..n * n).map(|k| f(k / n, k % n)).collect();
        FiniteMetricSpace::new(labels, dist)
    }

    /// Points labelled `0..n` with the given distance matrix.
    pub fn from_matrix(dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if dist.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetricSpace("distance matrix is not square".into()));
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        FiniteMetricSpace::new(labels, dist.into_iter().flatten().collect())
    }

    pub fn singleton() -> Self {
        FiniteMetricSpace { labels: vec!["0".into()], dist: vec![0.0] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest finite distance.
    pub fn finite_diameter(&self) -> f64 {
        self.dist.iter().cloned().filter(|d| d.is_finite()).fold(0.0, f64::max)
    }

    /// Largest `d(i,k) − d(i,j) − d(j,k)` (0 when the triangle inequality holds).
    pub fn triangle_violation(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dij = self.d(i, j);
                if !dij.is_finite() {
                    continue;
                }
                for k in 0..n {
                    let (dik, djk) = (self.d(i, k), self.d(j, k));
                    if djk.is_finite() {
                        worst = worst.max(dik - dij - djk);
                    }
                }
            }
        }
        worst
    }

    /// The induced metric on `indices`.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        FiniteMetricSpace::from_fn(labels, |a, b| self.d(indices[a], indices[b]))
    }

    /// Reads the CSV form: a header of labels followed by `n` rows of distances.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let labels: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut dist = Vec::with_capacity(labels.len() * labels.len());
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != labels.len() {
                return Err(Error::InvalidMetricSpace(format!("row {r} has {} entries", rec.len())));
            }
            for field in rec.iter() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidMetricSpace(format!("row {r}: cannot parse {field:?}")))?;
                dist.push(v);
            }
        }
        FiniteMetricSpace::new(labels, dist)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.labels)?;
        for i in 0..self.len() {
            wtr.write_record(self.row(i).iter().map(|d| d.to_string()))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        FiniteMetricSpace::read_csv(std::fs::File::open(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FiniteMetricSpace::from_matrix(vec![]).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.5, 0.0]]).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.1]]).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        let x = FiniteMetricSpace::from_matrix(vec![vec![0.0, f64::INFINITY], vec![f64::INFINITY, 0.0]]).unwrap();
        assert_eq!(x.diameter(), f64::INFINITY);
        assert_eq!(x.finite_diameter(), 0.0);
    }

    #[test]
    fn triangle_violation_detected() {
        let bad = FiniteMetricSpace::from_matrix(vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!((bad.triangle_violation() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let x = FiniteMetricSpace::from_fn(vec!["a".into(), "b".into(), "c".into()], |i, j| {
            (i as f64 - j as f64).abs() * 0.1
        })
        .unwrap();
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("a,b,c\n"));
        assert_eq!(FiniteMetricSpace::read_csv(buf.as_slice()).unwrap(), x);
        assert!(FiniteMetricSpace::read_csv("a,b\n0,1\n".as_bytes()).is_err());
    }
}
