//! Warping the vertical directions of an integrable submersion by `f∘π`.
//!
//! The induced metric on the horizontal bundle is again warped: horizontal pieces are
//! untouched and the vertical piece scales by `f²`.

use sublab::bundle::{HorizontalBundle, PQParams};
use sublab::lab::{unit_samples, Scenario, ScenarioId};
use sublab::submersion::WarpSpec;
use sublab::Error;

fn main() -> sublab::Result<()> {
    let warps = [
        ("f = 1", WarpSpec::constant(1.0)),
        ("f = 0.25", WarpSpec::constant(0.25)),
        ("f = 2", WarpSpec::constant(2.0)),
        ("f = 0.5 + 0.25 sin", WarpSpec::new(|x| 0.5 + 0.25 * x[0].sin(), 0.75)),
    ];
    for id in [ScenarioId::ProductTorus, ScenarioId::ProductSphereCircle] {
        let scenario = Scenario::new(id, 16, 16, 16)?;
        let bundle = HorizontalBundle::new(scenario.submersion.clone());
        let samples = unit_samples(&bundle, &scenario.random_points(4, 3), 3)?;
        println!("{id}");
        for (name, warp) in &warps {
            let r = bundle.verify_warped_claims(warp, PQParams::cheeger_gromoll(), &samples, 1e-4)?;
            println!(
                "  {name:<20} horizontal {:.2e}  vertical/f² {:.2e}  subspace sine {:.2e}",
                r.horizontal_gram, r.vertical_ratio, r.subspace_sine
            );
        }
    }

    let hopf = Scenario::new(ScenarioId::Hopf, 16, 16, 16)?;
    let bundle = HorizontalBundle::new(hopf.submersion.clone());
    let samples = unit_samples(&bundle, &hopf.random_points(1, 0), 3)?;
    match bundle.verify_warped_claims(&WarpSpec::constant(0.5), PQParams::sasaki(), &samples, 1e-4) {
        Err(Error::IntegrabilityRequired(why)) => println!("hopf refused: {why}"),
        other => println!("hopf: unexpected {other:?}"),
    }
    Ok(())
}
