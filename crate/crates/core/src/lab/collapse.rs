use std::io::Write;

use rayon::prelude::*;

use crate::bundle::{unit_bundle_space, BundleSampling, HorizontalBundle, SampledBundle};
use crate::error::{Error, Result};
use crate::metric_space::{
    covering_radius, eps_net, gh_upper, merge_fiber_nets, project_net, sample_manifold, Correspondence,
    FiniteMetricSpace, SampledManifold,
};
use crate::submersion::{SubmersionModel, WarpSpec};

use super::config::ScenarioConfig;
use super::scenario::Scenario;

/// Number of values in the ε-grid of the net criterion.
pub const EPS_GRID_LEN: usize = 16;

pub const CSV_HEADER: [&str; 5] = ["n", "sup_f", "gh_total_base", "gh_bundle_sm", "criterion_eps"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseRecord {
    pub n: u32,
    pub sup_f: f64,
    /// Upper bound for `d_GH(M̃_n, M)` from the projection correspondence.
    pub gh_total_base: f64,
    /// Upper bound for `d_GH(Ẽ¹_n, SM)` from the correspondence induced by `P_*`.
    pub gh_bundle_sm: f64,
    /// Smallest grid ε admitting an ε-net on which `f_n < ε`; `+∞` if none does.
    pub criterion_eps: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseRun {
    pub records: Vec<CollapseRecord>,
    pub eps_grid: Vec<f64>,
    /// Base lattice mesh: the first ε-grid value.
    pub mesh: f64,
}

impl CollapseRun {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(CSV_HEADER)?;
        for r in &self.records {
            wtr.write_record([
                r.n.to_string(),
                r.sup_f.to_string(),
                r.gh_total_base.to_string(),
                r.gh_bundle_sm.to_string(),
                r.criterion_eps.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn final_record(&self) -> &CollapseRecord {
        self.records.last().expect("runs have at least one n")
    }

    /// The net criterion bottoms out at the lattice mesh for the last `n`.
    pub fn criterion_at_floor(&self) -> bool {
        self.final_record().criterion_eps == self.mesh
    }

    /// The total-vs-base GH bound is at or below the lattice mesh for the last `n`.
    pub fn gh_at_floor(&self) -> bool {
        self.final_record().gh_total_base <= self.mesh
    }
}

/// `len` geometric values from `lo` to `hi` inclusive; the first is exactly `lo`.
pub fn epsilon_grid(lo: f64, hi: f64, len: usize) -> Vec<f64> {
    if len == 1 || hi <= lo {
        return vec![lo];
    }
    let ratio = hi / lo;
    (0..len).map(|k| if k == len - 1 { hi } else { lo * ratio.powf(k as f64 / (len - 1) as f64) }).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    /// Smallest passing ε, or `+∞`.
    pub eps: f64,
    /// A net witnessing `eps` (empty when nothing passes).
    pub net: Vec<usize>,
}

/// Smallest ε on `grid` for which some ε-net consists of points where `f < ε`.
///
/// Such a net exists iff every point lies within ε of an allowed point; the witness net is
/// grown greedily by covering the farthest uncovered point with its nearest allowed point.
pub fn criterion_check(space: &FiniteMetricSpace, f_values: &[f64], grid: &[f64]) -> CriterionResult {
    for &eps in grid {
        let allowed: Vec<usize> = (0..space.len()).filter(|&i| f_values[i] < eps).collect();
        if allowed.is_empty() || covering_radius(space, &allowed) > eps {
            continue;
        }
        let mut net: Vec<usize> = Vec::new();
        let mut nearest = vec![f64::INFINITY; space.len()];
        loop {
            let (far, d) = nearest
                .iter()
                .enumerate()
                .fold((0, -1.0), |(bi, bd), (i, &d)| if d > bd { (i, d) } else { (bi, bd) });
            if d <= eps {
                break;
            }
            let pick = allowed
                .iter()
                .cloned()
                .min_by(|&a, &b| space.d(far, a).total_cmp(&space.d(far, b)).then(a.cmp(&b)))
                .expect("allowed is non-empty");
            net.push(pick);
            for (n, d) in nearest.iter_mut().zip(space.row(pick)) {
                *n = n.min(*d);
            }
        }
        return CriterionResult { eps, net };
    }
    CriterionResult { eps: f64::INFINITY, net: Vec::new() }
}

/// Index of the nearest base sample for every total sample.
pub fn projection_map(sub: &SubmersionModel, total: &SampledManifold, base: &SampledManifold) -> Result<Vec<usize>> {
    total
        .points
        .iter()
        .map(|x| Ok(base.nearest_index(sub.base(), &sub.project(x)?)))
        .collect()
}

/// Index of the nearest `SM` sample for the image `(P x̃, J ξ)` of every `Ẽ¹` sample.
pub fn bundle_projection_map(
    sub: &SubmersionModel,
    bundle: &SampledBundle,
    sm_bundle: &HorizontalBundle,
    sm: &SampledBundle,
) -> Result<Vec<usize>> {
    bundle
        .points
        .iter()
        .map(|pt| {
            let y = sub.project(&pt.base)?;
            let u = sub.jacobian(&pt.base)? * &pt.fiber;
            sm.nearest_index(sm_bundle, &y, &u)
        })
        .collect()
}

/// Covering radii produced by the two constructions relating nets upstairs and downstairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetLemmaReport {
    pub eps: f64,
    /// Radius of the union of fiber ε-nets over a base ε-net.
    pub merged_radius: f64,
    /// Radius in the base of the projection of a total-space ε-net.
    pub projected_radius: f64,
}

pub fn net_lemma_check(total: &SampledManifold, base: &SampledManifold, map: &[usize], eps: f64) -> Result<NetLemmaReport> {
    let base_net = eps_net(&base.space, eps)?;
    let mut fiber_nets = Vec::with_capacity(base_net.subset.len());
    for &b in &base_net.subset {
        let fiber: Vec<usize> = (0..map.len()).filter(|&i| map[i] == b).collect();
        if fiber.is_empty() {
            return Err(Error::UncoveredTarget(b));
        }
        let sub = total.space.subspace(&fiber)?;
        fiber_nets.push(eps_net(&sub, eps)?.subset.into_iter().map(|k| fiber[k]).collect());
    }
    let merged = merge_fiber_nets(&fiber_nets, &total.space)?;
    let upstairs = eps_net(&total.space, eps)?;
    let projected = project_net(&upstairs.subset, map, &base.space);
    Ok(NetLemmaReport { eps, merged_radius: merged.covering_radius, projected_radius: projected.covering_radius })
}

/// Runs the collapse experiment of a config: one record per `n`.
pub fn run_collapse(cfg: &ScenarioConfig) -> Result<CollapseRun> {
    if !cfg.scenario_id.integrable() {
        return Err(Error::IntegrabilityRequired(cfg.scenario_id.to_string()));
    }
    let scenario = cfg.scenario()?;
    let pq = cfg.pq()?;
    let family = cfg.warp_family()?;
    let sub = &scenario.submersion;

    let base = sample_manifold(sub.base(), &scenario.base_resolution)?;
    let sm_bundle = HorizontalBundle::tangent(sub.base().clone());
    let sm = unit_bundle_space(
        &sm_bundle,
        pq,
        &BundleSampling { resolution: scenario.base_resolution.clone(), sphere_resolution: scenario.sphere_resolution },
    )?;
    let mesh = base.mesh();
    let eps_grid = epsilon_grid(mesh, base.space.diameter(), EPS_GRID_LEN);

    let records = cfg
        .n_list
        .par_iter()
        .map(|&n| collapse_leg(&scenario, &family.member(n), n, pq, &base, &sm_bundle, &sm, &eps_grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(CollapseRun { records, eps_grid, mesh })
}

#[allow(clippy::too_many_arguments)]
fn collapse_leg(
    scenario: &Scenario,
    warp: &WarpSpec,
    n: u32,
    pq: crate::bundle::PQParams,
    base: &SampledManifold,
    sm_bundle: &HorizontalBundle,
    sm: &SampledBundle,
    eps_grid: &[f64],
) -> Result<CollapseRecord> {
    let warped = scenario.submersion.warped(warp)?;

    let total = sample_manifold(warped.total(), &scenario.total_resolution)?;
    let map = projection_map(&warped, &total, base)?;
    let r = Correspondence::from_map(&map, base.points.len())?;
    let gh_total_base = gh_upper(&r, &total.space, &base.space)?;

    let bundle = HorizontalBundle::new(warped.clone());
    let e1 = unit_bundle_space(
        &bundle,
        pq,
        &BundleSampling { resolution: scenario.total_resolution.clone(), sphere_resolution: scenario.sphere_resolution },
    )?;
    let bmap = bundle_projection_map(&warped, &e1, sm_bundle, sm)?;
    let rb = Correspondence::from_map(&bmap, sm.points.len())?;
    let gh_bundle_sm = gh_upper(&rb, &e1.space, &sm.space)?;

    let f_values: Vec<f64> = base.points.iter().map(|y| warp.eval(y)).collect();
    let sup_f = f_values.iter().cloned().fold(0.0, f64::max);
    let criterion_eps = criterion_check(&base.space, &f_values, eps_grid).eps;
    Ok(CollapseRecord { n, sup_f, gh_total_base, gh_bundle_sm, criterion_eps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn((0..n).map(|i| i.to_string()).collect(), |i, j| {
            let d = (i as f64 - j as f64).abs() * 2.0 * PI / n as f64;
            d.min(2.0 * PI - d)
        })
        .unwrap()
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let g = epsilon_grid(0.2, PI, 16);
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 0.2);
        assert_eq!(g[15], PI);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn criterion_for_constant_warps() {
        let x = circle(32);
        let mesh = 2.0 * PI / 32.0;
        let grid = epsilon_grid(mesh, PI, 16);
        let small = criterion_check(&x, &vec![0.01; 32], &grid);
        assert_eq!(small.eps, mesh);
        assert!(covering_radius(&x, &small.net) <= mesh);
        let mid = criterion_check(&x, &vec![0.5; 32], &grid);
        assert!(mid.eps > 0.5 && mid.eps < 0.5 * 1.3, "{}", mid.eps);
        assert_eq!(criterion_check(&x, &vec![10.0; 32], &grid).eps, f64::INFINITY);
    }

    #[test]
    fn criterion_with_partial_allowed_set() {
        let x = circle(32);
        // only point 0 has a small value: needs ε ≥ π to cover the far side
        let mut f = vec![5.0; 32];
        f[0] = 0.0;
        let grid = epsilon_grid(0.2, PI, 16);
        let r = criterion_check(&x, &f, &grid);
        assert_eq!(r.eps, PI);
        assert_eq!(r.net, vec![0]);
    }
}
