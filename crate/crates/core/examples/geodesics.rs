//! Geodesics on the catalog manifolds: a great circle on the round sphere and a closed
//! straight line on the flat torus.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DVector;
use sublab::geom::{catalog, TangentVec};

fn main() -> sublab::Result<()> {
    let s2 = catalog::round_sphere();
    // start on the equator heading due north, so the geodesic is a meridian
    let start = TangentVec::new(DVector::from_vec(vec![FRAC_PI_2, 0.3]), DVector::from_vec(vec![-1.0, 0.0]))?;
    let t_end = FRAC_PI_2 - 0.05;
    let curve = s2.integrate_geodesic(&start, t_end, 400)?;
    let end = curve.end();
    println!("sphere meridian: length {:.10} (expected {t_end:.10})", s2.curve_length(&curve)?);
    println!("  end point theta {:.10}, phi {:.10}", end[0], end[1]);

    // an oblique great circle: check that speed stays 1 and the embedded point stays on S²
    let start = TangentVec::new(DVector::from_vec(vec![FRAC_PI_2, 0.0]), DVector::from_vec(vec![-0.6, 0.8]))?;
    let curve = s2.integrate_geodesic(&start, 2.0, 800)?;
    let speeds = s2.sampled_speeds(&curve)?;
    let drift = speeds.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    println!("oblique great circle: max speed drift {drift:.3e} over {} samples", curve.len());
    if let Some(p) = s2.embed(curve.end()) {
        println!("  embedded end point {:.6?}, |p| = {:.12}", p.as_slice(), p.norm());
    }

    let torus = catalog::flat_torus();
    let start = TangentVec::new(DVector::from_vec(vec![0.0, 0.0]), DVector::from_vec(vec![1.0, 2.0]))?;
    let t_end = 2.0 * PI;
    let line = torus.integrate_geodesic(&start, t_end, 200)?;
    println!(
        "torus line of slope 2: length {:.10} (expected {:.10}), closes at {:.3e}",
        torus.curve_length(&line)?,
        t_end * 5f64.sqrt(),
        torus.displacement(line.start(), line.end()).amax()
    );
    Ok(())
}
