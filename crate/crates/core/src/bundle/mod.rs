//! The horizontal bundle `Ẽ = H^P → M̃` of a submersion, with connection `D̃ = H∇̃`,
//! and the (p,q)-metrics on its total space.
//!
//! Tangent vectors to the bundle are represented in the coordinate chart
//! `(x̃, ξ) ∈ M̃ × R^m`: a [`BundleTangent`] carries the base velocity `π_* A` and the raw
//! derivative of the fiber components. The connection map turns the latter into a fiber
//! vector:
//!
//! ```text
//! K(A) = Π_H (dξ + Γ̃(dx̃, ξ))
//! ```

mod claims;
mod space;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::ode::rk4_step;
use crate::geom::{Coords, Curve, ManifoldModel, FD_STEP};
use crate::linalg;
use crate::submersion::SubmersionModel;

pub use claims::{ClaimReport, Claim2Report, Prop1Report, Subbundles, Verdict, WarpedReport};
pub use space::{fiber_sphere, unit_bundle_space, BundleSampling, SampledBundle};

/// Largest vertical part (in `g̃`-norm) tolerated for a horizontal-bundle point.
pub const HORIZONTAL_TOL: f64 = 1e-9;
/// Largest `| |ξ| − 1 |` tolerated for a unit-bundle point.
pub const UNIT_TOL: f64 = 1e-9;
/// Step used to finite-difference one-step transports into tangent vectors.
pub const TRANSPORT_FD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PQParams {
    p: f64,
    q: f64,
}

impl PQParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() || q < 0.0 {
            return Err(Error::InvalidParameter(format!("(p, q) = ({p}, {q}) needs finite p and q ≥ 0")));
        }
        Ok(PQParams { p, q })
    }

    pub fn sasaki() -> Self {
        PQParams { p: 0.0, q: 0.0 }
    }

    pub fn cheeger_gromoll() -> Self {
        PQParams { p: 1.0, q: 1.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// A point `ξ ∈ Ẽ_x̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundlePoint {
    pub base: Coords,
    pub fiber: DVector<f64>,
}

/// A tangent vector to the bundle's total space at `at`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleTangent {
    pub at: BundlePoint,
    pub dbase: DVector<f64>,
    pub dfiber: DVector<f64>,
}

impl BundleTangent {
    /// Stacks `(dbase, dfiber)` into one chart vector.
    pub fn stacked(&self) -> DVector<f64> {
        let m = self.dbase.len();
        DVector::from_fn(2 * m, |i, _| if i < m { self.dbase[i] } else { self.dfiber[i - m] })
    }
}

/// The horizontal bundle of a submersion. For the identity submersion this is `TM` with
/// its Levi-Civita connection.
#[derive(Clone, Debug)]
pub struct HorizontalBundle {
    sub: SubmersionModel,
}

impl HorizontalBundle {
    pub fn new(sub: SubmersionModel) -> Self {
        HorizontalBundle { sub }
    }

    /// The tangent bundle of `m`.
    pub fn tangent(m: ManifoldModel) -> Self {
        HorizontalBundle { sub: SubmersionModel::identity(m) }
    }

    pub fn submersion(&self) -> &SubmersionModel {
        &self.sub
    }

    pub fn manifold(&self) -> &ManifoldModel {
        self.sub.total()
    }

    /// Fiber rank `b`.
    pub fn rank(&self) -> usize {
        self.sub.base_dim()
    }

    fn check_shape(&self, x: &Coords, v: &DVector<f64>) -> Result<()> {
        let m = self.manifold().dim();
        if x.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: x.len() });
        }
        if v.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: v.len() });
        }
        Ok(())
    }

    /// A validated point of `Ẽ`.
    pub fn point(&self, x: &Coords, xi: DVector<f64>) -> Result<BundlePoint> {
        self.check_shape(x, &xi)?;
        let x = self.manifold().wrap(x)?;
        let spl = self.sub.splitting(&x)?;
        let vert = linalg::norm(&spl.metric, &(&spl.vertical * &xi));
        if vert > HORIZONTAL_TOL * linalg::norm(&spl.metric, &xi).max(1.0) {
            return Err(Error::InvalidParameter(format!("fiber vector has vertical part {vert:e}")));
        }
        Ok(BundlePoint { base: x, fiber: xi })
    }

    /// A validated point of the unit bundle `Ẽ¹`.
    pub fn unit_point(&self, x: &Coords, xi: DVector<f64>) -> Result<BundlePoint> {
        let pt = self.point(x, xi)?;
        let n = self.manifold().norm(&pt.base, &pt.fiber)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidParameter(format!("fiber vector has norm {n}, expected 1")));
        }
        Ok(pt)
    }

    /// Fiber inner product `h = g̃|_Ẽ`.
    pub fn fiber_inner(&self, x: &Coords, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        self.manifold().inner(x, u, v)
    }

    pub fn connection_map(&self, a: &BundleTangent) -> Result<DVector<f64>> {
        self.check_shape(&a.at.base, &a.dbase)?;
        self.check_shape(&a.at.base, &a.dfiber)?;
        if a.dbase.iter().all(|c| *c == 0.0) {
            return Ok(a.dfiber.clone());
        }
        let gamma = self.manifold().christoffel(&a.at.base)?;
        let raw = &a.dfiber + gamma.contract(&a.dbase, &a.at.fiber);
        if self.sub.is_identity() {
            return Ok(raw);
        }
        Ok(self.sub.splitting(&a.at.base)?.horizontal * raw)
    }

    /// `h_{p,q}(A, B)` at the common point `ζ`.
    pub fn pq_metric(&self, pq: PQParams, a: &BundleTangent, b: &BundleTangent) -> Result<f64> {
        if a.at != b.at {
            return Err(Error::MismatchedBasePoint);
        }
        let zeta = &a.at;
        let g = self.manifold().metric_at(&zeta.base)?;
        let ka = self.connection_map(a)?;
        let kb = self.connection_map(b)?;
        Ok(pq_formula(&g, pq, &zeta.fiber, &a.dbase, &b.dbase, &ka, &kb))
    }

    /// Directional derivative of the horizontal projector, `DΠ_H[v]`.
    pub fn projector_derivative(&self, x: &Coords, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        let m = self.manifold().dim();
        if self.sub.is_identity() || self.sub.fiber_dim() == 0 {
            return Ok(DMatrix::zeros(m, m));
        }
        let plus = self.sub.splitting(&(x + v * FD_STEP))?.horizontal;
        let minus = self.sub.splitting(&(x - v * FD_STEP))?.horizontal;
        Ok((plus - minus) / (2.0 * FD_STEP))
    }

    /// Rate of change of the fiber components of a `D̃`-parallel field moving with
    /// base velocity `xdot`: `ξ' = −Π_H Γ̃(ẋ, ξ) + DΠ_H[ẋ] ξ`.
    pub fn transport_rhs(&self, x: &Coords, xi: &DVector<f64>, xdot: &DVector<f64>) -> Result<DVector<f64>> {
        let gamma = self.manifold().christoffel(x)?;
        let corr = gamma.contract(xdot, xi);
        if self.sub.is_identity() {
            return Ok(-corr);
        }
        let spl = self.sub.splitting(x)?;
        Ok(-(&spl.horizontal * corr) + self.projector_derivative(x, xdot)? * xi)
    }

    /// The bundle-horizontal lift (`K = 0`) of `w ∈ T_x̃ M̃` at `ζ`.
    pub fn horizontal_lift(&self, zeta: &BundlePoint, w: &DVector<f64>) -> Result<BundleTangent> {
        self.check_shape(&zeta.base, w)?;
        let dfiber = self.transport_rhs(&zeta.base, &zeta.fiber, w)?;
        Ok(BundleTangent { at: zeta.clone(), dbase: w.clone(), dfiber })
    }

    /// The vertical lift `(0, v)` of a fiber vector at `ζ`.
    pub fn vertical_lift(&self, zeta: &BundlePoint, v: &DVector<f64>) -> BundleTangent {
        BundleTangent { at: zeta.clone(), dbase: DVector::zeros(v.len()), dfiber: v.clone() }
    }

    /// One RK4 transport step of `ξ` along the straight coordinate segment `x + s·dx`,
    /// `s ∈ [0, 1]`, followed by horizontal re-projection at the endpoint.
    pub fn transport_step(&self, x: &Coords, xi: &DVector<f64>, dx: &DVector<f64>) -> Result<DVector<f64>> {
        let next = rk4_step(0.0, xi, 1.0, |s, y| self.transport_rhs(&(x + dx * s), y, dx))?;
        if self.sub.is_identity() {
            return Ok(next);
        }
        Ok(self.sub.splitting(&(x + dx))?.horizontal * next)
    }

    /// `D̃`-parallel transport of `ξ₀` along a sampled curve in `M̃`, one RK4 step per
    /// segment. Returns the fiber components at every sample.
    pub fn parallel_transport(&self, c: &Curve, xi0: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
        self.check_shape(c.start(), xi0)?;
        let mut out = Vec::with_capacity(c.len());
        out.push(xi0.clone());
        let mut xi = xi0.clone();
        let (pts, params) = (c.samples(), c.params());
        for k in 0..pts.len().saturating_sub(1) {
            let dx = self.manifold().displacement(&pts[k], &pts[k + 1]);
            xi = self
                .transport_step(&pts[k], &xi, &dx)
                .map_err(|_| Error::LeftDomain { param: params[k] })?;
            out.push(xi.clone());
        }
        Ok(out)
    }

    /// Velocity at `s = 0` of `s ↦ (x̃ + s·w, τ_s ξ)`, with `τ_s` one-step transport along the
    /// straight segment, by central differences of step [`TRANSPORT_FD_STEP`].
    pub fn transport_velocity(&self, zeta: &BundlePoint, w: &DVector<f64>) -> Result<BundleTangent> {
        let h = TRANSPORT_FD_STEP;
        let plus = self.transport_step(&zeta.base, &zeta.fiber, &(w * h))?;
        let minus = self.transport_step(&zeta.base, &zeta.fiber, &(w * -h))?;
        Ok(BundleTangent { at: zeta.clone(), dbase: w.clone(), dfiber: (plus - minus) / (2.0 * h) })
    }
}

/// `g(dx_A, dx_B) + (1+|ζ|²)^{−p} (g(KA, KB) + q g(KA, ζ) g(KB, ζ))` with one metric
/// matrix `g` serving base and fiber.
pub(crate) fn pq_formula(
    g: &DMatrix<f64>,
    pq: PQParams,
    zeta: &DVector<f64>,
    da: &DVector<f64>,
    db: &DVector<f64>,
    ka: &DVector<f64>,
    kb: &DVector<f64>,
) -> f64 {
    let r2 = linalg::inner(g, zeta, zeta);
    let prefactor = (1.0 + r2).powf(-pq.p);
    let fiber = linalg::inner(g, ka, kb) + pq.q * linalg::inner(g, ka, zeta) * linalg::inner(g, kb, zeta);
    linalg::inner(g, da, db) + prefactor * fiber
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::catalog;
    use std::f64::consts::PI;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    fn sphere_bundle() -> HorizontalBundle {
        HorizontalBundle::tangent(catalog::round_sphere())
    }

    #[test]
    fn pq_params_reject_negative_q() {
        assert!(PQParams::new(1.0, -0.1).is_err());
        assert!(PQParams::new(-2.0, 0.0).is_ok());
    }

    #[test]
    fn flat_connection_map_is_raw_derivative() {
        let e = HorizontalBundle::tangent(catalog::flat_torus());
        let at = BundlePoint { base: v(&[1.0, 2.0]), fiber: v(&[0.3, -0.4]) };
        let a = BundleTangent { at, dbase: v(&[0.5, 0.1]), dfiber: v(&[2.0, 3.0]) };
        assert!((e.connection_map(&a).unwrap() - v(&[2.0, 3.0])).amax() < 1e-10);
    }

    #[test]
    fn vertical_tangent_maps_to_itself_exactly() {
        let e = sphere_bundle();
        let at = BundlePoint { base: v(&[1.0, 2.0]), fiber: v(&[0.3, -0.4]) };
        let a = e.vertical_lift(&at, &v(&[0.7, 0.9]));
        assert_eq!(e.connection_map(&a).unwrap(), v(&[0.7, 0.9]));
    }

    #[test]
    fn pq_metric_direct_values() {
        let e = sphere_bundle();
        let x = v(&[PI / 2.0, 0.0]);
        let zeta = e.unit_point(&x, v(&[1.0, 0.0])).unwrap();
        let a = e.vertical_lift(&zeta, &zeta.fiber);
        let cg = e.pq_metric(PQParams::cheeger_gromoll(), &a, &a).unwrap();
        assert!((cg - 1.0).abs() < 1e-15);

        let hor = e.horizontal_lift(&zeta, &v(&[0.2, 0.7])).unwrap();
        let ver = e.vertical_lift(&zeta, &v(&[0.0, 1.0]));
        assert!(e.connection_map(&hor).unwrap().amax() < 1e-12);
        assert!(e.pq_metric(PQParams::new(2.0, 1.0).unwrap(), &hor, &ver).unwrap().abs() < 1e-12);

        let other = BundlePoint { base: x, fiber: v(&[0.0, 1.0]) };
        let b = e.vertical_lift(&other, &v(&[1.0, 0.0]));
        assert!(matches!(e.pq_metric(PQParams::sasaki(), &a, &b), Err(Error::MismatchedBasePoint)));
    }

    #[test]
    fn parallel_field_has_zero_connection_map() {
        let e = sphere_bundle();
        let c = Curve::from_fn(e.manifold(), 0.0, 1.0, 2000, |t| v(&[0.8 + 0.3 * t, 1.0 + t])).unwrap();
        let xs = e.parallel_transport(&c, &v(&[0.6, 0.2])).unwrap();
        let k = 1000;
        let (p, dt) = (c.params(), c.params()[k + 1] - c.params()[k]);
        let dfiber = (&xs[k + 1] - &xs[k - 1]) / (p[k + 1] - p[k - 1]);
        let dbase = e.manifold().displacement(&c.samples()[k - 1], &c.samples()[k + 1]) / (2.0 * dt);
        let a = BundleTangent { at: BundlePoint { base: c.samples()[k].clone(), fiber: xs[k].clone() }, dbase, dfiber };
        assert!(e.connection_map(&a).unwrap().amax() < 1e-6);
    }

    #[test]
    fn flat_transport_is_constant() {
        let e = HorizontalBundle::tangent(catalog::flat_torus());
        let c = Curve::from_fn(e.manifold(), 0.0, 1.0, 10, |t| v(&[t, 3.0 * t])).unwrap();
        for xi in e.parallel_transport(&c, &v(&[0.3, 0.4])).unwrap() {
            assert!((xi - v(&[0.3, 0.4])).amax() < 1e-12);
        }
    }

    fn holonomy_angle(theta0: f64, steps: usize) -> f64 {
        let e = sphere_bundle();
        let c = Curve::from_fn(e.manifold(), 0.0, 2.0 * PI, steps, |t| v(&[theta0, t])).unwrap();
        let xs = e.parallel_transport(&c, &v(&[1.0, 0.0])).unwrap();
        let end = xs.last().unwrap();
        let n0 = 1.0;
        let n1 = e.manifold().norm(c.end(), end).unwrap();
        assert!((n1 / n0 - 1.0).abs() < 1e-6, "norm drift {}", n1 - n0);
        // signed angle in the orthonormal frame (∂θ, ∂φ / sin θ₀)
        (end[1] * theta0.sin()).atan2(end[0])
    }

    #[test]
    fn latitude_holonomy() {
        for theta0 in [PI / 3.0, PI / 4.0, 1.2] {
            let angle = holonomy_angle(theta0, 2000);
            let finer = holonomy_angle(theta0, 20000);
            let expected = 2.0 * PI * (1.0 - theta0.cos());
            let wrapped = |a: f64| (a + PI).rem_euclid(2.0 * PI) - PI;
            assert!(wrapped(angle - expected).abs() < 1e-3, "θ₀={theta0}: {angle} vs {expected}");
            assert!(wrapped(angle - finer).abs() < 1e-3);
        }
    }

    #[test]
    fn bundle_horizontal_lift_matches_transport_velocity() {
        let sub = SubmersionModel::new(catalog::hopf_three_sphere(), catalog::sphere(0.5), |x| {
            v(&[2.0 * x[0], x[2] - x[1]])
        })
        .unwrap();
        let e = HorizontalBundle::new(sub.clone());
        let x = v(&[0.6, 1.0, 2.0]);
        let hor = sub.horizontal_space(&x).unwrap();
        let zeta = e.unit_point(&x, hor[0].comp.clone()).unwrap();
        for w in [hor[1].comp.clone(), sub.vertical_space(&x).unwrap()[0].comp.clone()] {
            let lift = e.horizontal_lift(&zeta, &w).unwrap();
            let fd = e.transport_velocity(&zeta, &w).unwrap();
            assert!((lift.dfiber.clone() - fd.dfiber).amax() < 1e-6);
            assert!(e.connection_map(&lift).unwrap().amax() < 1e-8);
        }
    }

    #[test]
    fn hopf_transport_stays_horizontal_and_unit() {
        let sub = SubmersionModel::new(catalog::hopf_three_sphere(), catalog::sphere(0.5), |x| {
            v(&[2.0 * x[0], x[2] - x[1]])
        })
        .unwrap();
        let e = HorizontalBundle::new(sub.clone());
        let c = Curve::from_fn(e.manifold(), 0.0, 1.0, 400, |t| v(&[0.5 + 0.3 * t, t, 2.0 * t])).unwrap();
        let x0 = c.start().clone();
        let xi0 = sub.horizontal_space(&x0).unwrap()[0].comp.clone();
        let xs = e.parallel_transport(&c, &xi0).unwrap();
        for (x, xi) in c.samples().iter().zip(&xs) {
            e.point(x, xi.clone()).unwrap();
            assert!((e.manifold().norm(x, xi).unwrap() - 1.0).abs() < 1e-6);
        }
    }
}
