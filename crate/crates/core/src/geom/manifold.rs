use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Coordinates of a point in a chart.
pub type Coords = DVector<f64>;

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type EmbeddingFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
/// Closed-form `Γ^k_{ij}(x)` called as `f(x, k, i, j)`.
pub type ChristoffelFn = Arc<dyn Fn(&[f64], usize, usize, usize) -> f64 + Send + Sync>;
/// A symmetric metric perturbation `Δ(x)`.
pub type PerturbationFn = Arc<dyn Fn(&Coords) -> Result<DMatrix<f64>> + Send + Sync>;

#[derive(Clone)]
enum ChristoffelSource {
    FiniteDifference,
    Closed(ChristoffelFn),
    /// `g = parent + Δ`: the parent's symbols plus differences of `Δ` alone.
    Perturbed { parent: Box<ManifoldModel>, delta: PerturbationFn },
}

/// Central-difference step for metric derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Metrics whose smallest eigenvalue is at or below this are rejected.
pub const EIGENVALUE_FLOOR: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

/// One coordinate axis of a chart box.
///
/// Periodic axes identify `lo` with `hi`. Non-periodic axes reject coordinates outside
/// `[lo, hi]`; `sample_margin` shrinks the sampled range on those axes away from chart
/// singularities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
    pub sample_margin: f64,
}

impl Axis {
    pub fn periodic(lo: f64, hi: f64) -> Self {
        Axis { lo, hi, periodic: true, sample_margin: 0.0 }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Axis { lo, hi, periodic: false, sample_margin: 0.0 }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.sample_margin = margin;
        self
    }

    pub fn period(&self) -> f64 {
        self.hi - self.lo
    }

    /// Sampled range `[lo + margin, hi - margin]` (non-periodic) or `[lo, hi)` (periodic).
    pub fn sample_range(&self) -> (f64, f64) {
        if self.periodic {
            (self.lo, self.hi)
        } else {
            (self.lo + self.sample_margin, self.hi - self.sample_margin)
        }
    }
}

/// A manifold described by a single coordinate box with optional periodic identifications
/// and a metric tensor field.
#[derive(Clone)]
pub struct ManifoldModel {
    name: String,
    axes: Vec<Axis>,
    metric_fn: MetricFn,
    embedding_fn: Option<EmbeddingFn>,
    christoffel: ChristoffelSource,
}

impl fmt::Debug for ManifoldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldModel")
            .field("name", &self.name)
            .field("axes", &self.axes)
            .finish_non_exhaustive()
    }
}

impl ManifoldModel {
    pub fn new<F>(name: impl Into<String>, axes: Vec<Axis>, metric_fn: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        ManifoldModel {
            name: name.into(),
            axes,
            metric_fn: Arc::new(metric_fn),
            embedding_fn: None,
            christoffel: ChristoffelSource::FiniteDifference,
        }
    }

    pub fn with_embedding<F>(mut self, embedding: F) -> Self
    where
        F: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        self.embedding_fn = Some(Arc::new(embedding));
        self
    }

    /// Supplies closed-form Christoffel symbols in place of finite differences of the metric.
    /// They must be symmetric in `i, j`.
    pub fn with_christoffel<F>(mut self, gamma: F) -> Self
    where
        F: Fn(&[f64], usize, usize, usize) -> f64 + Send + Sync + 'static,
    {
        self.christoffel = ChristoffelSource::Closed(Arc::new(gamma));
        self
    }

    /// The manifold with metric `g + Δ` on the same chart. `Δ` must be symmetric and keep the
    /// metric positive definite; a failing `Δ` shows up as a degenerate metric.
    ///
    /// Christoffel symbols reuse the parent's and difference only `Δ`, so a vanishing
    /// perturbation reproduces the parent exactly.
    pub fn perturbed<F>(&self, name: impl Into<String>, delta: F) -> ManifoldModel
    where
        F: Fn(&Coords) -> Result<DMatrix<f64>> + Send + Sync + 'static,
    {
        let delta: PerturbationFn = Arc::new(delta);
        let (parent, d) = (self.clone(), delta.clone());
        let n = self.dim();
        let metric = move |x: &[f64]| {
            let x = DVector::from_column_slice(x);
            match (parent.metric_raw(&x), d(&x)) {
                (Ok(g), Ok(delta)) => g + delta,
                _ => DMatrix::from_element(n, n, f64::NAN),
            }
        };
        let mut m = ManifoldModel::new(name, self.axes.clone(), metric);
        m.embedding_fn = self.embedding_fn.clone();
        m.christoffel = ChristoffelSource::Perturbed { parent: Box::new(self.clone()), delta };
        m
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Euclidean embedding of a point, when the model carries one.
    pub fn embed(&self, x: &Coords) -> Option<DVector<f64>> {
        self.embedding_fn.as_ref().map(|e| e(x.as_slice()))
    }

    fn check_dim(&self, x: &Coords) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Maps periodic coordinates into `[lo, hi)`; rejects out-of-range non-periodic ones.
    pub fn wrap(&self, x: &Coords) -> Result<Coords> {
        self.check_dim(x)?;
        let mut out = x.clone();
        for (i, ax) in self.axes.iter().enumerate() {
            let v = x[i];
            if !v.is_finite() {
                return Err(Error::OutOfDomain { axis: i, value: v, lo: ax.lo, hi: ax.hi });
            }
            if ax.periodic {
                let mut w = (v - ax.lo).rem_euclid(ax.period()) + ax.lo;
                if w >= ax.hi {
                    w = ax.lo;
                }
                out[i] = w;
            } else if v < ax.lo || v > ax.hi {
                return Err(Error::OutOfDomain { axis: i, value: v, lo: ax.lo, hi: ax.hi });
            }
        }
        Ok(out)
    }

    /// Displacement `to - from` using the nearest periodic image on periodic axes.
    pub fn displacement(&self, from: &Coords, to: &Coords) -> Coords {
        let mut d = to - from;
        for (i, ax) in self.axes.iter().enumerate() {
            if ax.periodic {
                let p = ax.period();
                d[i] -= p * (d[i] / p).round();
            }
        }
        d
    }

    /// Metric matrix without positivity checks; coordinates are wrapped first.
    pub(crate) fn metric_raw(&self, x: &Coords) -> Result<DMatrix<f64>> {
        let w = self.wrap(x)?;
        Ok((self.metric_fn)(w.as_slice()))
    }

    /// The metric tensor at `x`, validated to be symmetric positive definite.
    pub fn metric_at(&self, x: &Coords) -> Result<DMatrix<f64>> {
        let w = self.wrap(x)?;
        let g = (self.metric_fn)(w.as_slice());
        if g.nrows() != self.dim() || g.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: g.nrows() });
        }
        let scale = g.amax().max(1.0);
        let dev = linalg::asymmetry(&g);
        if dev > SYMMETRY_TOL * scale {
            return Err(Error::AsymmetricMetric { at: w.as_slice().to_vec(), deviation: dev });
        }
        let lam = linalg::min_eigenvalue(&g);
        if !(lam > EIGENVALUE_FLOOR) {
            return Err(Error::DegenerateMetric { at: w.as_slice().to_vec(), min_eigenvalue: lam });
        }
        Ok(g)
    }

    pub fn inner(&self, x: &Coords, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        Ok(linalg::inner(&self.metric_at(x)?, u, v))
    }

    pub fn norm(&self, x: &Coords, u: &DVector<f64>) -> Result<f64> {
        Ok(linalg::norm(&self.metric_at(x)?, u))
    }

    /// Checks that `x ± h e_i` stays inside every non-periodic axis.
    pub(crate) fn check_interior(&self, x: &Coords, h: f64) -> Result<()> {
        self.check_dim(x)?;
        for (i, ax) in self.axes.iter().enumerate() {
            if !ax.periodic && (x[i] - h < ax.lo || x[i] + h > ax.hi) {
                return Err(Error::OutOfDomain { axis: i, value: x[i], lo: ax.lo + h, hi: ax.hi - h });
            }
        }
        Ok(())
    }

    /// Partial derivatives `∂_l g` by central differences, indexed by `l`.
    pub(crate) fn metric_derivatives(&self, x: &Coords) -> Result<Vec<DMatrix<f64>>> {
        fd_partials(self, x, |y| self.metric_raw(y))
    }

    /// Levi-Civita Christoffel symbols `Γ^k_{ij}` at `x`.
    pub fn christoffel(&self, x: &Coords) -> Result<Christoffel> {
        let g = self.metric_at(x)?;
        let d = self.dim();
        match &self.christoffel {
            ChristoffelSource::FiniteDifference => self.christoffel_from_metric(x, &g),
            ChristoffelSource::Closed(gamma) => {
                let mut data = vec![0.0; d * d * d];
                for k in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            data[(k * d + i) * d + j] = gamma(x.as_slice(), k, i, j);
                        }
                    }
                }
                Ok(Christoffel { dim: d, data })
            }
            ChristoffelSource::Perturbed { parent, delta } => {
                let g0 = parent.metric_at(x)?;
                let gamma0 = parent.christoffel(x)?;
                let dd = fd_partials(self, x, |y| delta(y))?;
                let mut lowered = lower(&dd, d);
                for l in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            lowered[(l * d + i) * d + j] += (0..d).map(|k| g0[(l, k)] * gamma0.get(k, i, j)).sum::<f64>();
                        }
                    }
                }
                Ok(Christoffel { dim: d, data: raise(x, &g, &lowered)? })
            }
        }
    }

    /// Christoffel symbols from central differences of the metric, ignoring any closed form.
    pub fn christoffel_fd(&self, x: &Coords) -> Result<Christoffel> {
        let g = self.metric_at(x)?;
        self.christoffel_from_metric(x, &g)
    }

    fn christoffel_from_metric(&self, x: &Coords, g: &DMatrix<f64>) -> Result<Christoffel> {
        let dg = self.metric_derivatives(x)?;
        Ok(Christoffel { dim: self.dim(), data: raise(x, g, &lower(&dg, self.dim()))? })
    }

    /// Deterministic lattice over the sampled box; the first axis varies slowest.
    ///
    /// Periodic axes exclude the duplicate endpoint.
    pub fn sample_grid(&self, resolution: &[usize]) -> Result<Vec<Coords>> {
        if resolution.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: resolution.len() });
        }
        if let Some(r) = resolution.iter().find(|r| **r < 2) {
            return Err(Error::InvalidParameter(format!("grid resolution {r} < 2")));
        }
        let ticks: Vec<Vec<f64>> = self
            .axes
            .iter()
            .zip(resolution)
            .map(|(ax, &r)| axis_ticks(ax, r))
            .collect();
        let total: usize = resolution.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.dim()];
        for _ in 0..total {
            out.push(DVector::from_fn(self.dim(), |i, _| ticks[i][idx[i]]));
            for a in (0..self.dim()).rev() {
                idx[a] += 1;
                if idx[a] < resolution[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(out)
    }
}

/// Tick positions of one axis at resolution `r`.
pub fn axis_ticks(ax: &Axis, r: usize) -> Vec<f64> {
    let (lo, hi) = ax.sample_range();
    if ax.periodic {
        (0..r).map(|i| lo + (hi - lo) * i as f64 / r as f64).collect()
    } else {
        (0..r).map(|i| lo + (hi - lo) * i as f64 / (r - 1) as f64).collect()
    }
}

/// Central-difference partials `∂_l F` of a matrix field, indexed by `l`.
fn fd_partials(
    m: &ManifoldModel,
    x: &Coords,
    f: impl Fn(&Coords) -> Result<DMatrix<f64>>,
) -> Result<Vec<DMatrix<f64>>> {
    m.check_interior(x, FD_STEP)?;
    (0..m.dim())
        .map(|l| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[l] += FD_STEP;
            xm[l] -= FD_STEP;
            Ok((f(&xp)? - f(&xm)?) / (2.0 * FD_STEP))
        })
        .collect()
}

/// `½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)` stored at `(l, i, j)`.
fn lower(dg: &[DMatrix<f64>], d: usize) -> Vec<f64> {
    let mut lowered = vec![0.0; d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in i..d {
                let v = 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                lowered[(l * d + i) * d + j] = v;
                lowered[(l * d + j) * d + i] = v;
            }
        }
    }
    lowered
}

/// Raises the first index with `g⁻¹`, symmetrising in `i, j`.
fn raise(x: &Coords, g: &DMatrix<f64>, lowered: &[f64]) -> Result<Vec<f64>> {
    let d = g.nrows();
    let ginv = g.clone().try_inverse().ok_or_else(|| Error::DegenerateMetric {
        at: x.as_slice().to_vec(),
        min_eigenvalue: 0.0,
    })?;
    let mut data = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let acc: f64 = (0..d).map(|l| ginv[(k, l)] * lowered[(l * d + i) * d + j]).sum();
                data[(k * d + i) * d + j] = acc;
                data[(k * d + j) * d + i] = acc;
            }
        }
    }
    Ok(data)
}

/// Christoffel symbols of the second kind, `Γ^k_{ij}` stored at `(k, i, j)`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    /// `Γ^k_{ij} u^i v^j`.
    pub fn contract(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |k, _| {
            let mut acc = 0.0;
            for i in 0..d {
                if u[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    acc += self.data[(k * d + i) * d + j] * u[i] * v[j];
                }
            }
            acc
        })
    }

    /// The matrix `C^k_j = Γ^k_{ij} u^i`, so that `C v = Γ(u, v)`.
    pub fn along(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| (0..d).map(|i| self.data[(k * d + i) * d + j] * u[i]).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
