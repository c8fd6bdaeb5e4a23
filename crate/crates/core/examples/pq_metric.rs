//! The (p,q)-metrics on the unit tangent bundle of the round sphere.
//!
//! Horizontal vectors keep their base length for every (p,q); the vertical part is scaled by
//! `(1 + |ξ|²)^{-p}` after adding `q·⟨ξ, ·⟩²`. At (0,0) this is the Sasaki metric and at (1,1) the
//! Cheeger-Gromoll metric.

use nalgebra::DVector;
use sublab::bundle::{HorizontalBundle, PQParams};
use sublab::geom::catalog;

fn main() -> sublab::Result<()> {
    let tm = HorizontalBundle::tangent(catalog::round_sphere());
    let x = DVector::from_vec(vec![1.1, 0.4]);
    let w = DVector::from_vec(vec![0.3, -0.7]);

    for scale in [0.0, 0.5, 1.0, 2.0] {
        let zeta = tm.point(&x, DVector::from_vec(vec![scale, 0.0]))?;
        let h = tm.horizontal_lift(&zeta, &w)?;
        // unit vectors parallel and orthogonal to ξ
        let along = tm.vertical_lift(&zeta, &DVector::from_vec(vec![1.0, 0.0]));
        let across = tm.vertical_lift(&zeta, &DVector::from_vec(vec![0.0, 1.0 / x[0].sin()]));
        println!("|xi| = {scale}");
        for (name, pq) in [("sasaki", PQParams::sasaki()), ("cheeger-gromoll", PQParams::cheeger_gromoll()), ("p=2 q=0.5", PQParams::new(2.0, 0.5)?)] {
            println!(
                "  {name:<16} |H|² {:.6}   |V along ξ|² {:.6}   |V across ξ|² {:.6}   <H,V> {:.1e}",
                tm.pq_metric(pq, &h, &h)?,
                tm.pq_metric(pq, &along, &along)?,
                tm.pq_metric(pq, &across, &across)?,
                tm.pq_metric(pq, &h, &across)?,
            );
        }
    }
    Ok(())
}
