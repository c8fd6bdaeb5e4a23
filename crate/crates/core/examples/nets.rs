//! Nets upstairs and downstairs. A base ε-net with an ε-net in each of its fibers is a
//! 2ε-net of the total space, and the projection of a total-space ε-net is an ε-net of the
//! base.

use sublab::lab::{net_lemma_check, projection_map, Scenario, ScenarioId};
use sublab::metric_space::{eps_net, sample_manifold};

fn main() -> sublab::Result<()> {
    for id in [ScenarioId::ProductTorus, ScenarioId::ProductSphereCircle] {
        let scenario = Scenario::new(id, 16, 16, 16)?;
        let sub = &scenario.submersion;
        let total = sample_manifold(sub.total(), &scenario.total_resolution)?;
        let base = sample_manifold(sub.base(), &scenario.base_resolution)?;
        let map = projection_map(sub, &total, &base)?;
        println!("{id}: {} total samples over {} base samples", total.points.len(), base.points.len());
        for eps in [0.2, 0.4, 0.8, 1.6] {
            let r = net_lemma_check(&total, &base, &map, eps)?;
            let size = eps_net(&total.space, eps)?.subset.len();
            println!(
                "  eps {eps:<4} merged radius {:.4} (<= {:.4})   projected radius {:.4} (<= {eps})   total net size {size}",
                r.merged_radius,
                2.0 * eps,
                r.projected_radius
            );
        }
    }
    Ok(())
}
