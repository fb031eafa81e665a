//! Classical fourth-order Runge–Kutta on a flat state vector.

use crate::error::Result;

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &[f64], dt: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let axpy =
        |a: f64, k: &[f64]| -> Vec<f64> { y.iter().zip(k).map(|(yi, ki)| yi + a * ki).collect() };
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * dt, &axpy(0.5 * dt, &k1))?;
    let k3 = f(t + 0.5 * dt, &axpy(0.5 * dt, &k2))?;
    let k4 = f(t + dt, &axpy(dt, &k3))?;
    Ok((0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Splits `[0, span]` into equal steps no longer than `dt_max`.
pub fn step_plan(span: f64, dt_max: f64) -> (usize, f64) {
    if span <= 0.0 {
        return (0, 0.0);
    }
    let steps = (span / dt_max - 1e-9).ceil().max(1.0) as usize;
    (steps, span / steps as f64)
}
