use num_complex::Complex64;

use super::liouvillian::{build_liouvillian, unvectorize, vectorize, Liouvillian, Vec16};
use super::{DensityMatrix4, MasterEqParams};
use crate::error::{Error, Result};

const DERIVATIVE_TOL: f64 = 1e-12;

fn rk4_step(l: &Liouvillian, y: &Vec16, k1: Vec16, dt: f64) -> Vec16 {
    let c = |x: f64| Complex64::new(x, 0.0);
    let k2 = l * (y + k1 * c(dt / 2.0));
    let k3 = l * (y + k2 * c(dt / 2.0));
    let k4 = l * (y + k3 * c(dt));
    y + (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0)
}

/// Fixed-step RK4 integration of dρ/dt = Lρ until |dρ/dt| ≤ 1e-12.
///
/// Independent of the kernel extraction in [`super::steady_state`].
pub fn propagate_to_steady(
    params: &MasterEqParams,
    rho0: &DensityMatrix4,
    t_max: f64,
    dt: f64,
) -> Result<DensityMatrix4> {
    params.validate()?;
    let limit = 0.01 / params.max_rate();
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::InvalidParams(format!("time step {dt} exceeds 0.01/max-rate = {limit}")));
    }
    let l = build_liouvillian(params);
    let mut y: Vec16 = vectorize(&rho0.0);
    let steps = (t_max / dt).ceil() as usize;
    let mut deriv = f64::INFINITY;
    for _ in 0..steps {
        let k1 = l * y;
        deriv = k1.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deriv <= DERIVATIVE_TOL {
            return Ok(DensityMatrix4(unvectorize(&y)));
        }
        y = rk4_step(&l, &y, k1, dt);
    }
    Err(Error::PropagationNotConverged { t_max, derivative: deriv })
}
