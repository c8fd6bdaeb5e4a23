use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::FiniteMetricSpace;
use crate::error::{Error, Result};

/// Undirected graph with nonnegative edge weights.
#[derive(Clone, Debug, Default)]
pub struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
}

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // reversed for a min-heap; ties go to the lower node index
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { adj: vec![Vec::new(); n] }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn add_edge(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidParameter(format!("edge ({i},{j}) has weight {w}")));
        }
        if i == j {
            return Ok(());
        }
        self.adj[i].push((j, w));
        self.adj[j].push((i, w));
        Ok(())
    }

    /// Dijkstra from `src`; unreachable nodes get `+∞`.
    pub fn shortest_paths_from(&self, src: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Entry { dist: 0.0, node: src });
        while let Some(Entry { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for &(nb, w) in &self.adj[node] {
                let nd = d + w;
                if nd < dist[nb] {
                    dist[nb] = nd;
                    heap.push(Entry { dist: nd, node: nb });
                }
            }
        }
        dist
    }

    /// Connected component id of every node, numbered in order of first appearance.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    /// All-pairs shortest-path distances (one Dijkstra per source, run in parallel).
    ///
    /// The result is symmetrised with `min` to remove roundoff asymmetry.
    pub fn metric_space(&self, labels: Vec<String>) -> Result<FiniteMetricSpace> {
        let n = self.len();
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: labels.len() });
        }
        let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|s| self.shortest_paths_from(s)).collect();
        FiniteMetricSpace::from_fn(labels, |i, j| rows[i][j].min(rows[j][i]))
    }
}

/// Unordered neighbour pairs `(a, b)`, `a < b`, of a lattice with the given per-axis
/// resolution, periodicity and stencil radius. Flat indices follow row-major order with
/// the first axis varying slowest.
pub fn stencil_pairs(resolution: &[usize], periodic: &[bool], radius: &[usize]) -> Vec<(usize, usize)> {
    let d = resolution.len();
    let total: usize = resolution.iter().product();
    let offsets: Vec<Vec<isize>> = {
        let mut all = vec![Vec::new()];
        for &r in radius {
            let r = r as isize;
            all = all
                .into_iter()
                .flat_map(|o: Vec<isize>| {
                    (-r..=r).map(move |k| {
                        let mut o = o.clone();
                        o.push(k);
                        o
                    })
                })
                .collect();
        }
        all
    };
    let mut pairs = Vec::new();
    let mut idx = vec![0usize; d];
    for flat in 0..total {
        let mut rem = flat;
        for a in (0..d).rev() {
            idx[a] = rem % resolution[a];
            rem /= resolution[a];
        }
        'offsets: for off in &offsets {
            let mut nb = 0usize;
            for a in 0..d {
                let res = resolution[a] as isize;
                let mut c = idx[a] as isize + off[a];
                if periodic[a] {
                    c = c.rem_euclid(res);
                } else if c < 0 || c >= res {
                    continue 'offsets;
                }
                nb = nb * resolution[a] + c as usize;
            }
            if nb > flat {
                pairs.push((flat, nb));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}
