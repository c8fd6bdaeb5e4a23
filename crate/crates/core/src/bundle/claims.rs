//! The splitting `T Ẽ¹ = H′ ⊕ H″ ⊕ V` and numerical checks of how the differential of
//! `P̃ = P_*: Ẽ¹ → SM` acts on each piece.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::{BundlePoint, BundleTangent, HorizontalBundle, PQParams};
use crate::error::{Error, Result};
use crate::geom::{Coords, FD_STEP};
use crate::linalg;
use crate::submersion::WarpSpec;

/// Integrability defect below which the warped-bundle checks may run.
pub const INTEGRABLE_TOL: f64 = 1e-5;

/// Frames of the three subbundles at one point of `Ẽ¹`.
#[derive(Clone, Debug)]
pub struct Subbundles {
    /// Tangents to the fiber sphere: `(0, v)`, `v ∈ H`, `v ⊥ ξ`. Dimension `b − 1`.
    pub h_prime: Vec<BundleTangent>,
    /// Transport velocities along horizontal lifts of base directions. Dimension `b`.
    pub h_second: Vec<BundleTangent>,
    /// Transport velocities along vertical directions. Dimension `a`.
    pub vertical: Vec<BundleTangent>,
}

impl Subbundles {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.h_prime.len(), self.h_second.len(), self.vertical.len())
    }

    pub fn all(&self) -> impl Iterator<Item = &BundleTangent> {
        self.h_prime.iter().chain(&self.h_second).chain(&self.vertical)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClaimReport {
    pub max_deviation: f64,
    pub checked: usize,
    pub tol: f64,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Claim2Report {
    /// `max | |π_* P̃_* A|_g − |A|_h̃ |`.
    pub norm_deviation: f64,
    /// `max |K^∇(P̃_* A)|_g`.
    pub k_norm: f64,
    pub checked: usize,
    pub tol: f64,
}

impl Claim2Report {
    pub fn passed(&self) -> bool {
        self.norm_deviation < self.tol && self.k_norm < self.tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Submersion,
    NotSubmersion,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Submersion => "SUBMERSION",
            Verdict::NotSubmersion => "NOT_SUBMERSION",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prop1Report {
    /// `max |P̃_* W^h|_h` over the V frames.
    pub v_image_norm: f64,
    /// Largest integrability defect at the sampled base points.
    pub defect: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

impl Prop1Report {
    fn new(v_image_norm: f64, defect: f64, tol: f64) -> Self {
        let verdict = if v_image_norm < tol && defect < tol {
            Verdict::Submersion
        } else if v_image_norm > 10.0 * tol && defect > 10.0 * tol {
            Verdict::NotSubmersion
        } else {
            Verdict::Inconclusive
        };
        Prop1Report { v_image_norm, defect, tol, verdict }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpedReport {
    /// `max |h̃_f − h̃|` over Gram entries of `H′ ∪ H″`.
    pub horizontal_gram: f64,
    /// `max |h̃_f − f̂² h̃|` over Gram entries of `V`.
    pub vertical_ratio: f64,
    /// Largest principal-angle sine between subbundles computed from `g̃` and `g̃_f`.
    pub subspace_sine: f64,
    pub checked: usize,
    pub tol: f64,
}

impl WarpedReport {
    pub fn max_deviation(&self) -> f64 {
        self.horizontal_gram.max(self.vertical_ratio).max(self.subspace_sine)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() < self.tol
    }
}

fn gram(
    e: &HorizontalBundle,
    pq: PQParams,
    frame: &[&BundleTangent],
) -> Result<DMatrix<f64>> {
    let n = frame.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = e.pq_metric(pq, frame[i], frame[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

fn span(frame: &[BundleTangent]) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = frame.iter().map(BundleTangent::stacked).collect();
    if cols.is_empty() {
        return DMatrix::zeros(0, 0);
    }
    DMatrix::from_columns(&cols)
}

impl HorizontalBundle {
    /// The pairwise orthogonal frames of `H′`, `H″` and `V` at a unit point.
    pub fn split_subbundles(&self, zeta: &BundlePoint) -> Result<Subbundles> {
        let sub = self.submersion();
        let x = &zeta.base;
        let g = self.manifold().metric_at(x)?;
        let hor = sub.horizontal_space(x)?;

        let tangential = hor.iter().map(|e| {
            let c = linalg::inner(&g, &e.comp, &zeta.fiber);
            &e.comp - &zeta.fiber * c
        });
        let h_prime = linalg::gram_schmidt(&g, tangential, self.rank() - 1, 1e-8)
            .into_iter()
            .map(|v| self.vertical_lift(zeta, &v))
            .collect();
        let h_second = hor
            .iter()
            .map(|e| self.transport_velocity(zeta, &e.comp))
            .collect::<Result<_>>()?;
        let vertical = sub
            .vertical_space(x)?
            .iter()
            .map(|u| self.transport_velocity(zeta, &u.comp))
            .collect::<Result<_>>()?;
        Ok(Subbundles { h_prime, h_second, vertical })
    }

    /// The differential of `P̃(x̃, ξ) = (P x̃, J(x̃) ξ)` applied to `a`, by central
    /// differences along `s ↦ (x̃ + s·dx̃, ξ + s·dξ)`.
    pub fn push_forward(&self, a: &BundleTangent) -> Result<BundleTangent> {
        let sub = self.submersion();
        let h = FD_STEP;
        let image = |s: f64| -> Result<(Coords, DVector<f64>)> {
            let x = &a.at.base + &a.dbase * s;
            let xi = &a.at.fiber + &a.dfiber * s;
            Ok((sub.project(&x)?, sub.jacobian(&x)? * xi))
        };
        let (yp, up) = image(h)?;
        let (ym, um) = image(-h)?;
        let base = sub.project(&a.at.base)?;
        let u = sub.jacobian(&a.at.base)? * &a.at.fiber;
        Ok(BundleTangent {
            at: BundlePoint { base, fiber: u },
            dbase: sub.base().displacement(&ym, &yp) / (2.0 * h),
            dfiber: (up - um) / (2.0 * h),
        })
    }

    /// The tangent bundle of the base, carrying `(SM, h)`.
    pub fn base_bundle(&self) -> HorizontalBundle {
        HorizontalBundle::tangent(self.submersion().base().clone())
    }

    /// `P̃_*` is isometric on `H′`: relative deviation of `h(P̃_* A, P̃_* A)` from `h̃(A, A)`.
    pub fn verify_claim1(&self, pq: PQParams, samples: &[BundlePoint], tol: f64) -> Result<ClaimReport> {
        let down = self.base_bundle();
        let mut report = ClaimReport { max_deviation: 0.0, checked: 0, tol };
        for zeta in samples {
            for a in self.split_subbundles(zeta)?.h_prime {
                let up = self.pq_metric(pq, &a, &a)?;
                let pa = self.push_forward(&a)?;
                let dn = down.pq_metric(pq, &pa, &pa)?;
                report.max_deviation = report.max_deviation.max((dn - up).abs() / up);
                report.checked += 1;
            }
        }
        Ok(report)
    }

    /// `P̃_*` maps `H″` isometrically onto bundle-horizontal vectors of `SM`.
    pub fn verify_claim2(&self, pq: PQParams, samples: &[BundlePoint], tol: f64) -> Result<Claim2Report> {
        let down = self.base_bundle();
        let g_base = |y: &Coords| self.submersion().base().metric_at(y);
        let mut report = Claim2Report { norm_deviation: 0.0, k_norm: 0.0, checked: 0, tol };
        for zeta in samples {
            for a in self.split_subbundles(zeta)?.h_second {
                let up = self.pq_metric(pq, &a, &a)?.sqrt();
                let pa = self.push_forward(&a)?;
                let g = g_base(&pa.at.base)?;
                let dn = linalg::norm(&g, &pa.dbase);
                let k = down.connection_map(&pa)?;
                report.norm_deviation = report.norm_deviation.max((dn - up).abs());
                report.k_norm = report.k_norm.max(linalg::norm(&g, &k));
                report.checked += 1;
            }
        }
        Ok(report)
    }

    /// `P̃_*` kills `V` exactly when the horizontal distribution is integrable.
    pub fn verify_claim3_and_prop1(&self, pq: PQParams, samples: &[BundlePoint], tol: f64) -> Result<Prop1Report> {
        let down = self.base_bundle();
        let sub = self.submersion();
        let mut v_image: f64 = 0.0;
        let mut defect: f64 = 0.0;
        for zeta in samples {
            for a in self.split_subbundles(zeta)?.vertical {
                let pa = self.push_forward(&a)?;
                v_image = v_image.max(down.pq_metric(pq, &pa, &pa)?.max(0.0).sqrt());
            }
            defect = defect.max(sub.integrability_defect(&zeta.base)?);
        }
        Ok(Prop1Report::new(v_image, defect, tol))
    }

    /// Compares the bundle of `g̃` with the bundle of the warped metric `g̃_f`.
    pub fn verify_warped_claims(
        &self,
        warp: &WarpSpec,
        pq: PQParams,
        samples: &[BundlePoint],
        tol: f64,
    ) -> Result<WarpedReport> {
        let sub = self.submersion();
        for zeta in samples {
            let d = sub.integrability_defect(&zeta.base)?;
            if d >= INTEGRABLE_TOL {
                return Err(Error::IntegrabilityRequired(format!(
                    "integrability defect {d:e} at {:?}",
                    zeta.base.as_slice()
                )));
            }
        }
        let warped = HorizontalBundle::new(sub.warped(warp)?);
        let mut report = WarpedReport { horizontal_gram: 0.0, vertical_ratio: 0.0, subspace_sine: 0.0, checked: 0, tol };
        for zeta in samples {
            let plain = self.split_subbundles(zeta)?;
            let bent = warped.split_subbundles(zeta)?;

            let horizontal: Vec<&BundleTangent> = plain.h_prime.iter().chain(&plain.h_second).collect();
            let g0 = gram(self, pq, &horizontal)?;
            let g1 = gram(&warped, pq, &horizontal)?;
            if !horizontal.is_empty() {
                report.horizontal_gram = report.horizontal_gram.max((g1 - g0).amax());
            }

            let vertical: Vec<&BundleTangent> = plain.vertical.iter().collect();
            if !vertical.is_empty() {
                let f = warp.eval(&sub.project(&zeta.base)?);
                let g0 = gram(self, pq, &vertical)?;
                let g1 = gram(&warped, pq, &vertical)?;
                report.vertical_ratio = report.vertical_ratio.max((g1 - g0 * (f * f)).amax());
            }

            for (p, b) in [
                (&plain.h_prime, &bent.h_prime),
                (&plain.h_second, &bent.h_second),
                (&plain.vertical, &bent.vertical),
            ] {
                if !p.is_empty() {
                    report.subspace_sine = report.subspace_sine.max(linalg::max_principal_sine(&span(p), &span(b)));
                }
            }
            report.checked += 1;
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::fiber_sphere;
    use crate::geom::catalog;
    use crate::submersion::SubmersionModel;
    use nalgebra::DMatrix;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    fn product() -> HorizontalBundle {
        let sub = SubmersionModel::new(catalog::flat_torus(), catalog::circle(1.0), |x| v(&[x[0]]))
            .unwrap()
            .with_jacobian(|_| DMatrix::from_row_slice(1, 2, &[1.0, 0.0]));
        HorizontalBundle::new(sub)
    }

    fn hopf() -> HorizontalBundle {
        let sub = SubmersionModel::new(catalog::hopf_three_sphere(), catalog::sphere(0.5), |x| {
            v(&[2.0 * x[0], x[2] - x[1]])
        })
        .unwrap()
        .with_jacobian(|_| DMatrix::from_row_slice(2, 3, &[2.0, 0.0, 0.0, 0.0, -1.0, 1.0]));
        HorizontalBundle::new(sub)
    }

    fn samples(e: &HorizontalBundle, points: &[Coords], res: usize) -> Vec<BundlePoint> {
        points
            .iter()
            .flat_map(|x| {
                let frame: Vec<_> = e.submersion().horizontal_space(x).unwrap().into_iter().map(|t| t.comp).collect();
                fiber_sphere(&frame, res)
                    .unwrap()
                    .into_iter()
                    .map(|xi| e.unit_point(x, xi).unwrap())
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    #[test]
    fn subbundle_dimensions_and_orthogonality() {
        let h = hopf();
        let pts = samples(&h, &[v(&[0.6, 1.0, 2.0])], 5);
        let pq = PQParams::cheeger_gromoll();
        for zeta in &pts {
            let s = h.split_subbundles(zeta).unwrap();
            assert_eq!(s.dims(), (1, 2, 1));
            let all: Vec<_> = s.all().collect();
            // unit-bundle tangency
            for a in &all {
                let k = h.connection_map(a).unwrap();
                assert!(h.fiber_inner(&zeta.base, &k, &zeta.fiber).unwrap().abs() < 1e-6);
            }
            let groups = [s.h_prime.len(), s.h_second.len()];
            for i in 0..all.len() {
                for j in 0..all.len() {
                    let gi = if i < groups[0] { 0 } else if i < groups[0] + groups[1] { 1 } else { 2 };
                    let gj = if j < groups[0] { 0 } else if j < groups[0] + groups[1] { 1 } else { 2 };
                    if gi != gj {
                        assert!(h.pq_metric(pq, all[i], all[j]).unwrap().abs() < 1e-6);
                    }
                }
            }
        }
        let p = product();
        let pts = samples(&p, &[v(&[1.0, 2.0])], 2);
        assert_eq!(p.split_subbundles(&pts[0]).unwrap().dims(), (0, 1, 1));
    }

    #[test]
    fn claims_on_product_and_hopf() {
        let pq = PQParams::cheeger_gromoll();
        let p = product();
        let pts = samples(&p, &[v(&[1.0, 2.0]), v(&[4.0, 0.5])], 2);
        let c1 = p.verify_claim1(pq, &pts, 1e-5).unwrap();
        assert_eq!(c1.checked, 0);
        assert!(p.verify_claim2(pq, &pts, 1e-5).unwrap().passed());
        let prop = p.verify_claim3_and_prop1(pq, &pts, 1e-5).unwrap();
        assert_eq!(prop.verdict, Verdict::Submersion, "{prop:?}");

        let h = hopf();
        let pts = samples(&h, &[v(&[0.6, 1.0, 2.0]), v(&[1.1, 3.0, 0.4])], 3);
        let c1 = h.verify_claim1(pq, &pts, 1e-4).unwrap();
        assert!(c1.passed() && c1.checked == 6, "{c1:?}");
        let c2 = h.verify_claim2(pq, &pts, 1e-4).unwrap();
        assert!(c2.passed(), "{c2:?}");
        let prop = h.verify_claim3_and_prop1(pq, &pts, 1e-5).unwrap();
        assert_eq!(prop.verdict, Verdict::NotSubmersion, "{prop:?}");
        assert!(prop.defect > 0.1 && prop.v_image_norm > 0.01);
    }

    #[test]
    fn warped_claims_on_product() {
        let p = product();
        let pq = PQParams::new(2.0, 1.0).unwrap();
        let pts = samples(&p, &[v(&[1.0, 2.0]), v(&[4.0, 0.5])], 2);
        let id = p.verify_warped_claims(&WarpSpec::constant(1.0), pq, &pts, 1e-10).unwrap();
        assert!(id.max_deviation() < 1e-10, "{id:?}");
        let half = p.verify_warped_claims(&WarpSpec::constant(0.5), pq, &pts, 1e-5).unwrap();
        assert!(half.passed(), "{half:?}");
        let wavy = WarpSpec::new(|x| 0.5 + 0.25 * x[0].sin(), 0.75);
        assert!(p.verify_warped_claims(&wavy, pq, &pts, 1e-4).unwrap().passed());
        let h = hopf();
        let pts = samples(&h, &[v(&[0.6, 1.0, 2.0])], 3);
        assert!(matches!(
            h.verify_warped_claims(&WarpSpec::constant(0.5), pq, &pts, 1e-4),
            Err(Error::IntegrabilityRequired(_))
        ));
    }
}
