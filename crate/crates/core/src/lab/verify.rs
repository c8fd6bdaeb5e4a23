use std::fmt;

use crate::bundle::{fiber_sphere, BundlePoint, HorizontalBundle, PQParams, Verdict};
use crate::error::Result;
use crate::metric_space::sample_manifold;
use crate::submersion::WarpSpec;

use super::collapse::{net_lemma_check, projection_map};
use super::scenario::{Scenario, ScenarioId};

/// Threshold for the two basic-field residuals.
pub const LEMMA1_TOL: f64 = 1e-4;
/// Threshold for warped-metric comparisons with a non-trivial warp.
pub const WARPED_TOL: f64 = 1e-4;
/// Threshold for the identity warp.
pub const IDENTITY_WARP_TOL: f64 = 1e-10;
/// Sampling slack for covering radii of nets.
pub const NET_SLACK: f64 = 1.05;
pub const NET_EPSILONS: [f64; 3] = [0.2, 0.4, 0.8];

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub pq: PQParams,
    /// Lattice resolution used for the sampled-space checks.
    pub resolution: usize,
    /// Threshold for the bundle claims and the verdict band.
    pub tol: f64,
    pub points: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { pq: PQParams::cheeger_gromoll(), resolution: 16, tol: 1e-5, points: 4, directions: 3, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl CheckLine {
    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckLine { name: name.into(), value, threshold, passed: value < threshold }
    }

    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        CheckLine { name: name.into(), value, threshold, passed: value <= threshold }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub scenario: ScenarioId,
    pub pq: PQParams,
    pub lines: Vec<CheckLine>,
    pub verdict: Verdict,
    pub v_image_norm: f64,
    pub defect: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn line(&self, name: &str) -> Option<&CheckLine> {
        self.lines.iter().find(|l| l.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} (p = {}, q = {})", self.scenario, self.pq.p(), self.pq.q())?;
        for l in &self.lines {
            let mark = if l.passed { "pass" } else { "FAIL" };
            writeln!(f, "  [{mark}] {:<34} {:>12.3e}  (threshold {:.1e})", l.name, l.value, l.threshold)?;
        }
        writeln!(
            f,
            "  verdict: {} (V image {:.3e}, integrability defect {:.3e})",
            self.verdict, self.v_image_norm, self.defect
        )?;
        write!(f, "{}", if self.passed() { "all checks passed" } else { "some checks FAILED" })
    }
}

/// Unit samples `ξ` over `points`, `directions` per point on a circle fiber and both signs on
/// a point fiber.
pub fn unit_samples(e: &HorizontalBundle, points: &[crate::geom::Coords], directions: usize) -> Result<Vec<BundlePoint>> {
    let mut out = Vec::new();
    for x in points {
        let frame: Vec<_> = e.submersion().horizontal_space(x)?.into_iter().map(|t| t.comp).collect();
        for xi in fiber_sphere(&frame, directions.max(3))? {
            out.push(e.unit_point(x, xi)?);
        }
    }
    Ok(out)
}

/// Runs the invariant suite for one scenario.
pub fn verify_all(id: ScenarioId, opts: &VerifyOptions) -> Result<VerifyReport> {
    let scenario = Scenario::new(id, opts.resolution, opts.resolution, opts.resolution)?;
    let sub = &scenario.submersion;
    let points = scenario.random_points(opts.points, opts.seed);
    let mut lines = Vec::new();

    let d = sub.diagnostics(&points)?;
    lines.push(CheckLine::below("splitting orthonormality", d.splitting, 1e-9));
    lines.push(CheckLine::below("lift-projection identity", d.lift_projection, 1e-9));
    lines.push(CheckLine::below("horizontal isometry", d.riemannian, 1e-6));

    let r = sub.lemma1_residuals(&points)?;
    lines.push(CheckLine::below("horizontal connection residual", r.r_i, LEMMA1_TOL));
    lines.push(CheckLine::below("vertical bracket residual", r.r_ii, LEMMA1_TOL));

    let e = HorizontalBundle::new(sub.clone());
    let samples = unit_samples(&e, &points, opts.directions)?;
    let c1 = e.verify_claim1(opts.pq, &samples, opts.tol)?;
    lines.push(CheckLine::below("H' isometry", c1.max_deviation, opts.tol));
    let c2 = e.verify_claim2(opts.pq, &samples, opts.tol)?;
    lines.push(CheckLine::below("H'' length", c2.norm_deviation, opts.tol));
    lines.push(CheckLine::below("H'' connection map", c2.k_norm, opts.tol));
    let prop = e.verify_claim3_and_prop1(opts.pq, &samples, opts.tol)?;
    lines.push(CheckLine {
        name: "submersion verdict is decisive".into(),
        value: if prop.verdict == Verdict::Inconclusive { 1.0 } else { 0.0 },
        threshold: 0.5,
        passed: prop.verdict != Verdict::Inconclusive,
    });

    if id.integrable() {
        let identity = e.verify_warped_claims(&WarpSpec::constant(1.0), opts.pq, &samples, IDENTITY_WARP_TOL)?;
        lines.push(CheckLine::below("warp f = 1: deviation", identity.max_deviation(), IDENTITY_WARP_TOL));
        let constant = e.verify_warped_claims(&WarpSpec::constant(0.5), opts.pq, &samples, WARPED_TOL)?;
        lines.push(CheckLine::below("warp f = 0.5: deviation", constant.max_deviation(), WARPED_TOL));
        let wavy = WarpSpec::new(|x| 0.5 + 0.25 * x[0].sin(), 0.75);
        let separable = e.verify_warped_claims(&wavy, opts.pq, &samples, WARPED_TOL)?;
        lines.push(CheckLine::below("warp f = 0.5 + 0.25 sin: deviation", separable.max_deviation(), WARPED_TOL));

        let total = sample_manifold(sub.total(), &scenario.total_resolution)?;
        let base = sample_manifold(sub.base(), &scenario.base_resolution)?;
        let map = projection_map(sub, &total, &base)?;
        for eps in NET_EPSILONS {
            let nl = net_lemma_check(&total, &base, &map, eps)?;
            lines.push(CheckLine::at_most(format!("merged fiber nets, eps {eps}"), nl.merged_radius, 2.0 * eps * NET_SLACK));
            lines.push(CheckLine::at_most(format!("projected net, eps {eps}"), nl.projected_radius, eps * NET_SLACK));
        }
    }

    Ok(VerifyReport { scenario: id, pq: opts.pq, lines, verdict: prop.verdict, v_image_norm: prop.v_image_norm, defect: prop.defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_scenarios_pass_with_expected_verdicts() {
        for id in ScenarioId::ALL {
            let opts = VerifyOptions { resolution: 8, ..VerifyOptions::default() };
            let r = verify_all(id, &opts).unwrap();
            assert!(r.passed(), "{r}");
            let expected = if id.integrable() { Verdict::Submersion } else { Verdict::NotSubmersion };
            assert_eq!(r.verdict, expected, "{r}");
        }
    }
}
