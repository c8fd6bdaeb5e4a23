use nalgebra::DVector;

use super::manifold::{Coords, ManifoldModel};
use super::ode::rk4_step;
use crate::error::{Error, Result};
use crate::linalg;

/// A tangent vector given by its coordinate-frame components at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVec {
    pub base: Coords,
    pub comp: DVector<f64>,
}

impl TangentVec {
    pub fn new(base: Coords, comp: DVector<f64>) -> Result<Self> {
        if base.len() != comp.len() {
            return Err(Error::DimensionMismatch { expected: base.len(), got: comp.len() });
        }
        Ok(TangentVec { base, comp })
    }
}

/// Sampled curve: wrapped coordinates at strictly increasing parameter values.
///
/// A single sample is allowed and denotes a constant curve.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    samples: Vec<Coords>,
    params: Vec<f64>,
}

impl Curve {
    pub fn new(samples: Vec<Coords>, params: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("curve needs at least one sample".into()));
        }
        if samples.len() != params.len() {
            return Err(Error::InvalidParameter(format!(
                "{} samples but {} parameter values",
                samples.len(),
                params.len()
            )));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("curve parameters must increase strictly".into()));
        }
        Ok(Curve { samples, params })
    }

    /// Samples `f` at `n + 1` uniformly spaced parameters on `[t0, t1]`.
    pub fn from_fn(m: &ManifoldModel, t0: f64, t1: f64, n: usize, f: impl Fn(f64) -> Coords) -> Result<Self> {
        let params: Vec<f64> = (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect();
        let samples = params.iter().map(|&t| m.wrap(&f(t))).collect::<Result<Vec<_>>>()?;
        Curve::new(samples, params)
    }

    pub fn samples(&self) -> &[Coords] {
        &self.samples
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> &Coords {
        &self.samples[0]
    }

    pub fn end(&self) -> &Coords {
        self.samples.last().expect("non-empty")
    }

    /// Largest coordinate step between consecutive samples after unwrapping.
    pub fn max_step(&self, m: &ManifoldModel) -> f64 {
        self.samples
            .windows(2)
            .map(|w| m.displacement(&w[0], &w[1]).amax())
            .fold(0.0, f64::max)
    }
}

impl ManifoldModel {
    /// Integrates the geodesic equation `ẍ^k + Γ^k_{ij} ẋ^i ẋ^j = 0` with fixed-step RK4.
    ///
    /// Returns `steps + 1` samples, or the single starting point when `t_end == 0`.
    pub fn integrate_geodesic(&self, start: &TangentVec, t_end: f64, steps: usize) -> Result<Curve> {
        let d = self.dim();
        if start.base.len() != d || start.comp.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: start.base.len() });
        }
        let x0 = self.wrap(&start.base)?;
        if t_end == 0.0 {
            return Curve::new(vec![x0], vec![0.0]);
        }
        if steps < 2 {
            return Err(Error::InvalidParameter("geodesic integration needs at least 2 steps".into()));
        }
        let dt = t_end / steps as f64;
        let mut state = DVector::zeros(2 * d);
        state.rows_mut(0, d).copy_from(&x0);
        state.rows_mut(d, d).copy_from(&start.comp);

        let mut samples = Vec::with_capacity(steps + 1);
        let mut params = Vec::with_capacity(steps + 1);
        samples.push(x0);
        params.push(0.0);
        for i in 0..steps {
            let t = i as f64 * dt;
            let next = rk4_step(t, &state, dt, |_, y| {
                let x = y.rows(0, d).into_owned();
                let v = y.rows(d, d).into_owned();
                let gamma = self.christoffel(&x).map_err(|_| Error::LeftDomain { param: t })?;
                let acc = -gamma.contract(&v, &v);
                let mut dy = DVector::zeros(2 * d);
                dy.rows_mut(0, d).copy_from(&v);
                dy.rows_mut(d, d).copy_from(&acc);
                Ok(dy)
            })?;
            let x = self
                .wrap(&next.rows(0, d).into_owned())
                .map_err(|_| Error::LeftDomain { param: t + dt })?;
            state = next;
            state.rows_mut(0, d).copy_from(&x);
            samples.push(x);
            params.push(t + dt);
        }
        Curve::new(samples, params)
    }

    /// Riemannian length by the midpoint rule on each segment.
    pub fn curve_length(&self, c: &Curve) -> Result<f64> {
        let mut total = 0.0;
        for w in c.samples().windows(2) {
            let delta = self.displacement(&w[0], &w[1]);
            let mid = &w[0] + &delta * 0.5;
            let g = self.metric_at(&mid)?;
            total += linalg::norm(&g, &delta);
        }
        Ok(total)
    }

    /// Speed `‖ẋ‖_g` along a geodesic state trajectory, recomputed from samples by central
    /// differences. Used by diagnostics.
    pub fn sampled_speeds(&self, c: &Curve) -> Result<Vec<f64>> {
        let s = c.samples();
        let p = c.params();
        (1..s.len().saturating_sub(1))
            .map(|i| {
                let v = self.displacement(&s[i - 1], &s[i + 1]) / (p[i + 1] - p[i - 1]);
                self.norm(&s[i], &v)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::catalog;
    use std::f64::consts::PI;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    #[test]
    fn flat_geodesic_is_a_line() {
        let t = catalog::flat_torus();
        let start = TangentVec::new(v(&[0.0, 0.0]), v(&[1.0, 0.0])).unwrap();
        let c = t.integrate_geodesic(&start, 0.5, 10).unwrap();
        assert_eq!(c.len(), 11);
        assert!((c.end()[0] - 0.5).abs() < 1e-12 && c.end()[1].abs() < 1e-12);
    }

    #[test]
    fn zero_length_geodesic_is_constant() {
        let s = catalog::round_sphere();
        let start = TangentVec::new(v(&[1.0, 2.0]), v(&[0.3, 0.1])).unwrap();
        let c = s.integrate_geodesic(&start, 0.0, 100).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.start(), &start.base);
        assert_eq!(s.curve_length(&c).unwrap(), 0.0);
    }

    #[test]
    fn meridian_from_equator_toward_pole() {
        let s = catalog::round_sphere();
        let start = TangentVec::new(v(&[PI / 2.0, 0.0]), v(&[-1.0, 0.0])).unwrap();
        // closed form: θ(t) = π/2 − t; stop one margin short of the pole
        let t_end = PI / 2.0 - 2.0 * catalog::POLAR_MARGIN;
        let c = s.integrate_geodesic(&start, t_end, 1000).unwrap();
        assert!((s.curve_length(&c).unwrap() - t_end).abs() < 1e-4);
        assert!((c.end()[0] - 2.0 * catalog::POLAR_MARGIN).abs() < 1e-8);

        let err = s.integrate_geodesic(&start, PI / 2.0, 1000).unwrap_err();
        assert!(matches!(err, Error::LeftDomain { .. }));
    }

    #[test]
    fn equator_circumference() {
        let s = catalog::round_sphere();
        let c = Curve::from_fn(&s, 0.0, 2.0 * PI, 999, |t| v(&[PI / 2.0, t])).unwrap();
        assert!((s.curve_length(&c).unwrap() - 2.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn unit_segment_length_and_degenerate_segment() {
        let t = catalog::flat_torus();
        let c = Curve::new(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0])], vec![0.0, 1.0]).unwrap();
        assert!((t.curve_length(&c).unwrap() - 1.0).abs() < 1e-15);
        let c = Curve::new(vec![v(&[0.3, 0.3]), v(&[0.3, 0.3])], vec![0.0, 1.0]).unwrap();
        assert_eq!(t.curve_length(&c).unwrap(), 0.0);
    }

    #[test]
    fn curve_rejects_bad_parameters() {
        assert!(Curve::new(vec![v(&[0.0]), v(&[1.0])], vec![0.0, 0.0]).is_err());
        assert!(Curve::new(vec![], vec![]).is_err());
        assert!(Curve::new(vec![v(&[0.0])], vec![0.0, 1.0]).is_err());
    }
}
