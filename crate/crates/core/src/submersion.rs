//! Riemannian submersions `P: M̃ → M` between coordinate-chart manifolds.
//!
//! At every point of the total space the tangent space splits `g̃`-orthogonally into the
//! vertical space `ker P_*` and its horizontal complement. Both projectors are computed
//! from the Jacobian `J` of the projection:
//!
//! ```text
//! Π_H = G⁻¹ Jᵀ (J G⁻¹ Jᵀ)⁻¹ J,   Π_V = I − Π_H
//! ```
//!
//! so they are unique and smooth, and need no choice of frame.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::ode::rk4_step;
use crate::geom::{Coords, Curve, ManifoldModel, TangentVec, FD_STEP};
use crate::linalg;

pub type ProjectionFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type WarpFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Step for finite-difference Lie brackets and covariant derivatives of lifted fields.
pub const BRACKET_STEP: f64 = 1e-4;
/// Jacobians whose smallest singular value is at or below this are rank deficient.
pub const RANK_FLOOR: f64 = 1e-8;
const BASE_POINT_TOL: f64 = 1e-9;
const FRAME_SKIP: f64 = 1e-8;
/// Base grid resolution used to validate warping functions.
const WARP_CHECK_RESOLUTION: usize = 16;

/// Pointwise splitting data at a total-space point.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub metric: DMatrix<f64>,
    pub jacobian: DMatrix<f64>,
    /// `g̃`-orthogonal projector onto the horizontal space.
    pub horizontal: DMatrix<f64>,
    /// `g̃`-orthogonal projector onto the vertical space.
    pub vertical: DMatrix<f64>,
    /// Maps base components `w` to the horizontal lift (`m × b`).
    pub lift: DMatrix<f64>,
}

#[derive(Clone)]
pub struct SubmersionModel {
    total: ManifoldModel,
    base: ManifoldModel,
    proj_fn: ProjectionFn,
    jacobian_fn: Option<JacobianFn>,
    identity: bool,
}

impl fmt::Debug for SubmersionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubmersionModel")
            .field("total", &self.total)
            .field("base", &self.base)
            .field("identity", &self.identity)
            .finish_non_exhaustive()
    }
}

/// Residuals of the two identities relating basic fields to the base connection.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Lemma1Residuals {
    /// `max |P_*(D̃_X̃ Ỹ) − ∇_X Y|_g`.
    pub r_i: f64,
    /// `max |g̃(D̃_Ũ X̃, Ỹ) + ½ g̃(Ũ, [X̃, Ỹ])|`.
    pub r_ii: f64,
}

/// Maximum deviations of the submersion invariants over a point set.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SubmersionDiagnostics {
    /// `max |Gram([H, V]) − I|`.
    pub splitting: f64,
    /// `max |J · lift(w) − w|` over base coordinate directions.
    pub lift_projection: f64,
    /// `max | |J X̃|_g − |X̃|_g̃ | / |X̃|_g̃` over horizontal frame vectors.
    pub riemannian: f64,
    /// Smallest Jacobian singular value seen.
    pub min_singular_value: f64,
}

impl SubmersionModel {
    pub fn new<P>(total: ManifoldModel, base: ManifoldModel, proj: P) -> Result<Self>
    where
        P: Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    {
        if base.dim() > total.dim() || base.dim() == 0 {
            return Err(Error::InvalidParameter(format!(
                "cannot submerse a {}-manifold onto a {}-manifold",
                total.dim(),
                base.dim()
            )));
        }
        Ok(SubmersionModel { total, base, proj_fn: Arc::new(proj), jacobian_fn: None, identity: false })
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.jacobian_fn = Some(Arc::new(jacobian));
        self
    }

    /// The identity map `M → M`; its horizontal bundle is `TM` with the Levi-Civita connection.
    pub fn identity(m: ManifoldModel) -> Self {
        SubmersionModel {
            total: m.clone(),
            base: m,
            proj_fn: Arc::new(DVector::from_column_slice),
            jacobian_fn: None,
            identity: true,
        }
    }

    pub fn total(&self) -> &ManifoldModel {
        &self.total
    }

    pub fn base(&self) -> &ManifoldModel {
        &self.base
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// `b = dim M`.
    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// `a = dim M̃ − dim M`.
    pub fn fiber_dim(&self) -> usize {
        self.total.dim() - self.base.dim()
    }

    pub fn project(&self, x: &Coords) -> Result<Coords> {
        let w = self.total.wrap(x)?;
        let y = (self.proj_fn)(w.as_slice());
        self.base.wrap(&y)
    }

    /// Jacobian of the projection (`b × m`), analytic when supplied.
    pub fn jacobian(&self, x: &Coords) -> Result<DMatrix<f64>> {
        let m = self.total.dim();
        if self.identity {
            return Ok(DMatrix::identity(m, m));
        }
        let w = self.total.wrap(x)?;
        if let Some(j) = &self.jacobian_fn {
            return Ok(j(w.as_slice()));
        }
        self.total.check_interior(&w, FD_STEP)?;
        let mut jac = DMatrix::zeros(self.base.dim(), m);
        for c in 0..m {
            let mut xp = w.clone();
            let mut xm = w.clone();
            xp[c] += FD_STEP;
            xm[c] -= FD_STEP;
            let d = self.base.displacement(&self.project(&xm)?, &self.project(&xp)?) / (2.0 * FD_STEP);
            jac.set_column(c, &d);
        }
        Ok(jac)
    }

    /// Projectors and lift operator at `x`.
    pub fn splitting(&self, x: &Coords) -> Result<Splitting> {
        let g = self.total.metric_at(x)?;
        self.splitting_with_metric(x, g)
    }

    fn splitting_with_metric(&self, x: &Coords, g: DMatrix<f64>) -> Result<Splitting> {
        let m = self.total.dim();
        if self.identity {
            return Ok(Splitting {
                metric: g,
                jacobian: DMatrix::identity(m, m),
                horizontal: DMatrix::identity(m, m),
                vertical: DMatrix::zeros(m, m),
                lift: DMatrix::identity(m, m),
            });
        }
        let jac = self.jacobian(x)?;
        let sigma_min = linalg::min_eigenvalue(&(&jac * jac.transpose())).max(0.0).sqrt();
        if !(sigma_min > RANK_FLOOR) {
            return Err(Error::RankDeficient { at: x.as_slice().to_vec(), sigma_min });
        }
        let ginv = g.clone().try_inverse().ok_or_else(|| Error::DegenerateMetric {
            at: x.as_slice().to_vec(),
            min_eigenvalue: 0.0,
        })?;
        let gj = &ginv * jac.transpose();
        let s = &jac * &gj;
        let sinv = s.try_inverse().ok_or_else(|| Error::RankDeficient {
            at: x.as_slice().to_vec(),
            sigma_min,
        })?;
        let lift = gj * sinv;
        let horizontal = &lift * &jac;
        let vertical = DMatrix::identity(m, m) - &horizontal;
        Ok(Splitting { metric: g, jacobian: jac, horizontal, vertical, lift })
    }

    fn frame(&self, x: &Coords, projector: &DMatrix<f64>, g: &DMatrix<f64>, want: usize) -> Vec<DVector<f64>> {
        let m = self.total.dim();
        let candidates = (0..m).filter_map(|j| {
            let mut e = DVector::zeros(m);
            e[j] = 1.0;
            let full = linalg::norm(g, &e);
            let p = projector * e;
            (linalg::norm(g, &p) > FRAME_SKIP * full).then_some(p)
        });
        let _ = x;
        linalg::gram_schmidt(g, candidates, want, FRAME_SKIP)
    }

    /// `g̃`-orthonormal frame of `ker P_*`, in coordinate order.
    pub fn vertical_space(&self, x: &Coords) -> Result<Vec<TangentVec>> {
        let x = self.total.wrap(x)?;
        let spl = self.splitting(&x)?;
        let a = self.fiber_dim();
        let frame = self.frame(&x, &spl.vertical, &spl.metric, a);
        if frame.len() != a {
            return Err(Error::RankDeficient { at: x.as_slice().to_vec(), sigma_min: 0.0 });
        }
        Ok(frame.into_iter().map(|comp| TangentVec { base: x.clone(), comp }).collect())
    }

    /// `g̃`-orthonormal frame of the horizontal space, in coordinate order.
    pub fn horizontal_space(&self, x: &Coords) -> Result<Vec<TangentVec>> {
        let x = self.total.wrap(x)?;
        let spl = self.splitting(&x)?;
        let b = self.base_dim();
        let frame = self.frame(&x, &spl.horizontal, &spl.metric, b);
        if frame.len() != b {
            return Err(Error::RankDeficient { at: x.as_slice().to_vec(), sigma_min: 0.0 });
        }
        Ok(frame.into_iter().map(|comp| TangentVec { base: x.clone(), comp }).collect())
    }

    /// The unique horizontal vector at `x` projecting to `w`.
    pub fn horizontal_lift_vector(&self, x: &Coords, w: &TangentVec) -> Result<TangentVec> {
        let x = self.total.wrap(x)?;
        let px = self.project(&x)?;
        if w.base.len() != px.len() || self.base.displacement(&px, &w.base).amax() > BASE_POINT_TOL {
            return Err(Error::BasePointMismatch {
                expected: px.as_slice().to_vec(),
                got: w.base.as_slice().to_vec(),
            });
        }
        let spl = self.splitting(&x)?;
        Ok(TangentVec { base: x, comp: &spl.lift * &w.comp })
    }

    /// Value at `x` of the basic field lifting the constant-coefficient base field `w`.
    pub fn basic_field(&self, x: &Coords, w: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.splitting(x)?.lift * w)
    }

    /// Horizontal lift of a sampled base curve starting at `x0`.
    ///
    /// The base curve is followed segment by segment (piecewise linear in base
    /// coordinates); each segment's lifted velocity is integrated with one RK4 step.
    pub fn horizontal_lift_curve(&self, x0: &Coords, gamma: &Curve) -> Result<Curve> {
        let x0 = self.total.wrap(x0)?;
        let px = self.project(&x0)?;
        if self.base.displacement(&px, gamma.start()).amax() > BASE_POINT_TOL {
            return Err(Error::BasePointMismatch {
                expected: px.as_slice().to_vec(),
                got: gamma.start().as_slice().to_vec(),
            });
        }
        let mut samples = Vec::with_capacity(gamma.len());
        samples.push(x0.clone());
        let mut x = x0;
        let (pts, params) = (gamma.samples(), gamma.params());
        for k in 0..pts.len().saturating_sub(1) {
            let dt = params[k + 1] - params[k];
            let w = self.base.displacement(&pts[k], &pts[k + 1]) / dt;
            let next = rk4_step(params[k], &x, dt, |_, y| {
                self.basic_field(y, &w).map_err(|_| Error::LeftDomain { param: params[k] })
            })?;
            x = self.total.wrap(&next).map_err(|_| Error::LeftDomain { param: params[k + 1] })?;
            samples.push(x.clone());
        }
        Curve::new(samples, params.to_vec())
    }

    /// Directional derivative of the basic field of `w` along `dir` at `x`.
    fn basic_derivative(&self, x: &Coords, w: &DVector<f64>, dir: &DVector<f64>) -> Result<DVector<f64>> {
        let h = BRACKET_STEP;
        let plus = self.basic_field(&(x + dir * h), w)?;
        let minus = self.basic_field(&(x - dir * h), w)?;
        Ok((plus - minus) / (2.0 * h))
    }

    /// Coordinate Lie bracket `[X̃, Ỹ]` of the basic fields of `wx`, `wy` at `x`.
    pub fn basic_bracket(&self, x: &Coords, wx: &DVector<f64>, wy: &DVector<f64>) -> Result<DVector<f64>> {
        let xf = self.basic_field(x, wx)?;
        let yf = self.basic_field(x, wy)?;
        Ok(self.basic_derivative(x, wy, &xf)? - self.basic_derivative(x, wx, &yf)?)
    }

    /// Residuals of `P_* D̃_X̃ Ỹ = ∇_X Y` and `g̃(D̃_Ũ X̃, Ỹ) = −½ g̃(Ũ, [X̃, Ỹ])` for basic
    /// lifts of base coordinate fields and the vertical frame fields.
    pub fn lemma1_residuals(&self, points: &[Coords]) -> Result<Lemma1Residuals> {
        let b = self.base_dim();
        let unit = |i: usize| DVector::from_fn(b, |k, _| if k == i { 1.0 } else { 0.0 });
        let mut res = Lemma1Residuals::default();
        for x in points {
            let x = self.total.wrap(x)?;
            let spl = self.splitting(&x)?;
            let gamma_total = self.total.christoffel(&x)?;
            let px = self.project(&x)?;
            let gamma_base = self.base.christoffel(&px)?;
            let g_base = self.base.metric_at(&px)?;
            let verticals = self.vertical_space(&x)?;
            for i in 0..b {
                let (ei, xi) = (unit(i), &spl.lift * unit(i));
                for j in 0..b {
                    let (ej, yj) = (unit(j), &spl.lift * unit(j));
                    // (i)
                    let nabla = self.basic_derivative(&x, &ej, &xi)? + gamma_total.contract(&xi, &yj);
                    let d_tilde = &spl.horizontal * nabla;
                    let pushed = &spl.jacobian * d_tilde;
                    let expected = gamma_base.contract(&ei, &ej);
                    res.r_i = res.r_i.max(linalg::norm(&g_base, &(pushed - expected)));
                    // (ii)
                    if verticals.is_empty() {
                        continue;
                    }
                    let bracket = self.basic_bracket(&x, &ei, &ej)?;
                    for u in &verticals {
                        let nabla_u = self.basic_derivative(&x, &ei, &u.comp)? + gamma_total.contract(&u.comp, &xi);
                        let lhs = linalg::inner(&spl.metric, &(&spl.horizontal * nabla_u), &yj);
                        let rhs = -0.5 * linalg::inner(&spl.metric, &u.comp, &bracket);
                        res.r_ii = res.r_ii.max((lhs - rhs).abs());
                    }
                }
            }
        }
        Ok(res)
    }

    /// Largest `|V [X̃, Ỹ]|_g̃` over pairs of an orthonormal horizontal frame at `x`,
    /// extended as basic fields. Vanishes iff the horizontal distribution is integrable
    /// near `x`.
    pub fn integrability_defect(&self, x: &Coords) -> Result<f64> {
        let x = self.total.wrap(x)?;
        if self.fiber_dim() == 0 {
            return Ok(0.0);
        }
        let spl = self.splitting(&x)?;
        let base_dirs: Vec<DVector<f64>> = self
            .horizontal_space(&x)?
            .into_iter()
            .map(|e| &spl.jacobian * e.comp)
            .collect();
        let mut defect: f64 = 0.0;
        for i in 0..base_dirs.len() {
            for j in (i + 1)..base_dirs.len() {
                let bracket = self.basic_bracket(&x, &base_dirs[i], &base_dirs[j])?;
                defect = defect.max(linalg::norm(&spl.metric, &(&spl.vertical * bracket)));
            }
        }
        Ok(defect)
    }

    /// The warped total metric: unchanged on `H × H`, scaled by `(f∘P)²` on `V × TM̃`.
    ///
    /// Assembled as `G_f = G + (f̃² − 1) G Π_V`, i.e. in the split frame and conjugated back
    /// to coordinates.
    pub fn warp_metric(&self, warp: &WarpSpec) -> Result<ManifoldModel> {
        warp.validate(&self.base)?;
        let sub = self.clone();
        let f = warp.clone();
        let name = format!("{}-warped", self.total.name());
        Ok(self.total.perturbed(name, move |x| {
            let g = sub.total.metric_raw(x)?;
            let spl = sub.splitting_with_metric(x, g)?;
            let fx = f.eval(&sub.project(x)?);
            let delta = &spl.metric * &spl.vertical * (fx * fx - 1.0);
            Ok((&delta + delta.transpose()) * 0.5)
        }))
    }

    /// The same projection viewed from the warped total metric.
    pub fn warped(&self, warp: &WarpSpec) -> Result<SubmersionModel> {
        Ok(SubmersionModel {
            total: self.warp_metric(warp)?,
            base: self.base.clone(),
            proj_fn: self.proj_fn.clone(),
            jacobian_fn: self.jacobian_fn.clone(),
            identity: self.identity,
        })
    }

    /// Measures the submersion invariants on a point set.
    pub fn diagnostics(&self, points: &[Coords]) -> Result<SubmersionDiagnostics> {
        let mut diag = SubmersionDiagnostics { min_singular_value: f64::INFINITY, ..Default::default() };
        let b = self.base_dim();
        for x in points {
            let x = self.total.wrap(x)?;
            let spl = self.splitting(&x)?;
            let sigma = linalg::min_eigenvalue(&(&spl.jacobian * spl.jacobian.transpose())).max(0.0).sqrt();
            diag.min_singular_value = diag.min_singular_value.min(sigma);

            let frame: Vec<DVector<f64>> = self
                .horizontal_space(&x)?
                .into_iter()
                .chain(self.vertical_space(&x)?)
                .map(|t| t.comp)
                .collect();
            for (i, u) in frame.iter().enumerate() {
                for (j, v) in frame.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    diag.splitting = diag.splitting.max((linalg::inner(&spl.metric, u, v) - expect).abs());
                }
            }

            for i in 0..b {
                let w = DVector::from_fn(b, |k, _| if k == i { 1.0 } else { 0.0 });
                let back = &spl.jacobian * (&spl.lift * &w);
                diag.lift_projection = diag.lift_projection.max((back - w).amax());
            }

            let px = self.project(&x)?;
            let g_base = self.base.metric_at(&px)?;
            for e in frame.iter().take(b) {
                let up = linalg::norm(&spl.metric, e);
                let down = linalg::norm(&g_base, &(&spl.jacobian * e));
                diag.riemannian = diag.riemannian.max((down - up).abs() / up);
            }
        }
        Ok(diag)
    }
}

/// A positive warping function on the base, with a declared uniform upper bound.
#[derive(Clone)]
pub struct WarpSpec {
    f: WarpFn,
    upper_bound: f64,
}

impl fmt::Debug for WarpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpSpec").field("upper_bound", &self.upper_bound).finish_non_exhaustive()
    }
}

impl WarpSpec {
    pub fn new<F>(f: F, upper_bound: f64) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        WarpSpec { f: Arc::new(f), upper_bound }
    }

    pub fn constant(c: f64) -> Self {
        WarpSpec::new(move |_| c, c)
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper_bound
    }

    pub fn eval(&self, base_point: &Coords) -> f64 {
        (self.f)(base_point.as_slice())
    }

    /// Checks `0 < f ≤ upper_bound` on a base sampling lattice.
    pub fn validate(&self, base: &ManifoldModel) -> Result<()> {
        let res = vec![WARP_CHECK_RESOLUTION; base.dim()];
        for x in base.sample_grid(&res)? {
            let v = self.eval(&x);
            if !(v > 0.0) {
                return Err(Error::NonPositiveWarp { at: x.as_slice().to_vec(), value: v });
            }
            if v > self.upper_bound * (1.0 + 1e-12) {
                return Err(Error::WarpAboveBound { value: v, upper_bound: self.upper_bound });
            }
        }
        Ok(())
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

    fn product_torus() -> SubmersionModel {
        SubmersionModel::new(catalog::flat_torus(), catalog::circle(1.0), |x| v(&[x[0]])).unwrap()
    }

    fn hopf() -> SubmersionModel {
        SubmersionModel::new(catalog::hopf_three_sphere(), catalog::sphere(0.5), |x| {
            v(&[2.0 * x[0], x[2] - x[1]])
        })
        .unwrap()
    }

    #[test]
    fn product_frames_are_coordinate_axes() {
        let s = product_torus();
        let x = v(&[1.0, 2.0]);
        let vert = s.vertical_space(&x).unwrap();
        let hor = s.horizontal_space(&x).unwrap();
        assert_eq!(vert.len(), 1);
        assert_eq!(hor.len(), 1);
        assert!((vert[0].comp.clone() - v(&[0.0, 1.0])).amax() < 1e-9);
        assert!((hor[0].comp.clone() - v(&[1.0, 0.0])).amax() < 1e-9);
    }

    #[test]
    fn identity_submersion_has_no_vertical_directions() {
        let s = SubmersionModel::identity(catalog::round_sphere());
        let x = v(&[1.0, 0.5]);
        assert!(s.vertical_space(&x).unwrap().is_empty());
        let hor = s.horizontal_space(&x).unwrap();
        assert_eq!(hor.len(), 2);
        let g = s.total().metric_at(&x).unwrap();
        assert!((linalg::norm(&g, &hor[1].comp) - 1.0).abs() < 1e-12);
        assert_eq!(s.integrability_defect(&x).unwrap(), 0.0);
    }

    #[test]
    fn hopf_vertical_is_fiber_direction() {
        let s = hopf();
        let x = v(&[0.6, 1.0, 2.5]);
        let vert = s.vertical_space(&x).unwrap();
        assert_eq!(vert.len(), 1);
        // analytic null space of [[2,0,0],[0,-1,1]] is span(0,1,1), unit length under g̃
        let u = &vert[0].comp;
        assert!(u[0].abs() < 1e-9 && (u[1] - u[2]).abs() < 1e-9);
        let g = s.total().metric_at(&x).unwrap();
        assert!((linalg::norm(&g, u) - 1.0).abs() < 1e-12);
        let hor = s.horizontal_space(&x).unwrap();
        assert_eq!(hor.len(), 2);
        for h in &hor {
            assert!(linalg::inner(&g, &h.comp, u).abs() < 1e-10);
        }
    }

    #[test]
    fn lifts_of_vectors() {
        let s = product_torus();
        let x = v(&[0.3, 4.0]);
        let w = TangentVec::new(v(&[0.3]), v(&[1.0])).unwrap();
        let l = s.horizontal_lift_vector(&x, &w).unwrap();
        assert!((l.comp - v(&[1.0, 0.0])).amax() < 1e-9);
        let zero = TangentVec::new(v(&[0.3]), v(&[0.0])).unwrap();
        assert_eq!(s.horizontal_lift_vector(&x, &zero).unwrap().comp, v(&[0.0, 0.0]));
        let wrong = TangentVec::new(v(&[0.4]), v(&[1.0])).unwrap();
        assert!(matches!(s.horizontal_lift_vector(&x, &wrong), Err(Error::BasePointMismatch { .. })));

        let h = hopf();
        let x = v(&[0.7, 0.2, 1.1]);
        let px = h.project(&x).unwrap();
        let g_base = h.base().metric_at(&px).unwrap();
        let mut w = v(&[0.3, 1.0]);
        w /= linalg::norm(&g_base, &w);
        let l = h.horizontal_lift_vector(&x, &TangentVec::new(px, w.clone()).unwrap()).unwrap();
        assert!((h.total().norm(&x, &l.comp).unwrap() - 1.0).abs() < 1e-6);
        assert!((h.jacobian(&x).unwrap() * &l.comp - w).amax() < 1e-9);
    }

    #[test]
    fn finite_difference_jacobian_unwraps_periodic_base() {
        let h = hopf();
        // ξ₂ − ξ₁ near the 2π seam
        let x = v(&[0.7, 1e-7, 2.0 * PI - 1e-7]);
        let j = h.jacobian(&x).unwrap();
        let expected = DMatrix::from_row_slice(2, 3, &[2.0, 0.0, 0.0, 0.0, -1.0, 1.0]);
        assert!((j - expected).amax() < 1e-8);
    }

    #[test]
    fn product_lift_of_curve_keeps_fiber_coordinate() {
        let s = product_torus();
        let gamma = Curve::from_fn(s.base(), 0.0, 1.0, 50, |t| v(&[0.2 + 2.0 * t])).unwrap();
        let lifted = s.horizontal_lift_curve(&v(&[0.2, 3.0]), &gamma).unwrap();
        for (p, q) in lifted.samples().iter().zip(gamma.samples()) {
            assert!((p[1] - 3.0).abs() < 1e-9);
            assert!(s.base().displacement(&v(&[p[0]]), q).amax() < 1e-9);
        }
        let constant = Curve::new(vec![v(&[0.2])], vec![0.0]).unwrap();
        let lifted = s.horizontal_lift_curve(&v(&[0.2, 3.0]), &constant).unwrap();
        assert_eq!(lifted.samples(), &[v(&[0.2, 3.0])]);
    }

    #[test]
    fn hopf_lift_of_equator_is_not_closed() {
        let h = hopf();
        let x0 = v(&[PI / 4.0, 0.0, 0.0]);
        let gamma = Curve::from_fn(h.base(), 0.0, 2.0 * PI, 2000, |t| v(&[PI / 2.0, t])).unwrap();
        let lifted = h.horizontal_lift_curve(&x0, &gamma).unwrap();
        for (p, q) in lifted.samples().iter().zip(gamma.samples()) {
            assert!(h.base().displacement(&h.project(p).unwrap(), q).amax() < 1e-4);
        }
        let gap = h.total().displacement(&x0, lifted.end());
        let g = h.total().metric_at(&x0).unwrap();
        assert!(linalg::norm(&g, &gap) > 0.1, "fiber displacement {}", linalg::norm(&g, &gap));
    }

    #[test]
    fn integrability_defect_separates_product_and_hopf() {
        let prod = SubmersionModel::new(catalog::sphere_times_circle(), catalog::round_sphere(), |x| {
            v(&[x[0], x[1]])
        })
        .unwrap();
        assert!(prod.integrability_defect(&v(&[1.0, 2.0, 3.0])).unwrap() < 1e-5);
        let d = hopf().integrability_defect(&v(&[0.6, 1.0, 2.0])).unwrap();
        assert!(d > 0.5, "hopf defect {d}");
    }

    #[test]
    fn lemma1_on_hopf() {
        let h = hopf();
        let pts = vec![v(&[0.5, 0.3, 1.0]), v(&[1.0, 4.0, 2.0])];
        let r = h.lemma1_residuals(&pts).unwrap();
        assert!(r.r_i < 1e-4 && r.r_ii < 1e-4, "{r:?}");
    }

    #[test]
    fn warping_identity_and_constant() {
        let s = product_torus();
        let same = s.warp_metric(&WarpSpec::constant(1.0)).unwrap();
        for x in s.total().sample_grid(&[5, 5]).unwrap() {
            let d = same.metric_at(&x).unwrap() - s.total().metric_at(&x).unwrap();
            assert!(d.amax() < 1e-12);
        }
        let c = 0.3;
        let warped = s.warp_metric(&WarpSpec::constant(c)).unwrap();
        let fiber = Curve::from_fn(&warped, 0.0, 2.0 * PI, 1000, |t| v(&[1.0, t])).unwrap();
        assert!((warped.curve_length(&fiber).unwrap() - 2.0 * PI * c).abs() < 1e-4);
        let bad = WarpSpec::new(|x| x[0].sin(), 1.0);
        assert!(matches!(s.warp_metric(&bad), Err(Error::NonPositiveWarp { .. })));
    }

    #[test]
    fn warped_hopf_keeps_horizontal_lengths() {
        let h = hopf();
        let warp = WarpSpec::new(|x| 0.5 + 0.25 * x[1].cos(), 0.75);
        let hw = h.warped(&warp).unwrap();
        let x = v(&[0.6, 1.0, 2.0]);
        for e in h.horizontal_space(&x).unwrap() {
            let n0 = h.total().norm(&x, &e.comp).unwrap();
            let n1 = hw.total().norm(&x, &e.comp).unwrap();
            assert!((n0 - n1).abs() < 1e-10);
        }
        let d = hw.diagnostics(&[x]).unwrap();
        assert!(d.riemannian < 1e-6 && d.splitting < 1e-9);
    }
}
