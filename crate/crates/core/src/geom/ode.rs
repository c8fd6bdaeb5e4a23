use nalgebra::DVector;

use crate::error::Result;

/// One classical fourth-order Runge-Kutta step of `y' = f(t, y)`.
pub fn rk4_step<F>(t: f64, y: &DVector<f64>, dt: f64, mut f: F) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * dt, &(y + &k1 * (0.5 * dt)))?;
    let k3 = f(t + 0.5 * dt, &(y + &k2 * (0.5 * dt)))?;
    let k4 = f(t + dt, &(y + &k3 * dt))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}
