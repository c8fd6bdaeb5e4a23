//! Horizontal lifts in the Hopf fibration `S³ → S²(1/2)`.
//!
//! Lifting a latitude loop of the base does not close up: the endpoint differs from the
//! start by a shift along the fiber equal to `π(1 − cos θ)`, half the solid angle of the cap.

use std::f64::consts::PI;

use nalgebra::DVector;
use sublab::geom::Curve;
use sublab::lab::{submersion, ScenarioId};

fn main() -> sublab::Result<()> {
    let hopf = submersion(ScenarioId::Hopf);
    println!("{:>8} {:>14} {:>14} {:>10}", "theta", "fiber shift", "predicted", "|error|");
    for theta in [0.4, 0.8, PI / 2.0, 2.2, 2.8] {
        let eta = theta / 2.0;
        let loop_ = Curve::from_fn(hopf.base(), 0.0, 2.0 * PI, 2000, |t| DVector::from_vec(vec![theta, t]))?;
        let x0 = DVector::from_vec(vec![eta, 0.0, 0.0]);
        let lift = hopf.horizontal_lift_curve(&x0, &loop_)?;
        let end = lift.end();

        // the lift returns to the starting fiber, displaced along (1, 1) in (ξ₁, ξ₂)
        let back = hopf.project(end)?;
        let base_gap = hopf.base().displacement(&back, loop_.end()).amax();
        let d = hopf.total().displacement(lift.start(), end);
        let shift = (-d[1]).rem_euclid(2.0 * PI);
        let predicted = (PI * (1.0 - theta.cos())).rem_euclid(2.0 * PI);
        let err = (shift - predicted).abs().min(2.0 * PI - (shift - predicted).abs());
        println!("{theta:>8.4} {shift:>14.8} {predicted:>14.8} {err:>10.2e}   (base gap {base_gap:.1e})");
    }

    let x = DVector::from_vec(vec![0.6, 1.0, 2.0]);
    let v = &hopf.vertical_space(&x)?[0];
    println!("vertical direction at {:?}: {:.6?}", x.as_slice(), v.comp.as_slice());
    println!("integrability defect there: {:.6}", hopf.integrability_defect(&x)?);
    Ok(())
}
