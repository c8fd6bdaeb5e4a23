//! The projection `Ẽ¹ → SM` is a Riemannian submersion exactly when the horizontal
//! distribution is integrable. Each scenario reports the image of `V` under the pushforward
//! and the integrability defect.

use sublab::bundle::{HorizontalBundle, PQParams};
use sublab::lab::{unit_samples, Scenario, ScenarioId};

fn main() -> sublab::Result<()> {
    let tol = 1e-5;
    for id in ScenarioId::ALL {
        let scenario = Scenario::new(id, 16, 16, 16)?;
        let bundle = HorizontalBundle::new(scenario.submersion.clone());
        let samples = unit_samples(&bundle, &scenario.random_points(6, 1), 4)?;
        for pq in [PQParams::sasaki(), PQParams::cheeger_gromoll()] {
            let r = bundle.verify_claim3_and_prop1(pq, &samples, tol)?;
            println!(
                "{:<22} p={} q={}  V image {:.3e}  defect {:.3e}  -> {}",
                id.as_str(),
                pq.p(),
                pq.q(),
                r.v_image_norm,
                r.defect,
                r.verdict
            );
        }
    }
    Ok(())
}
