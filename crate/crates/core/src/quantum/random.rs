//! Random samplers used by the oracle tests and the validation suite.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DensityMatrix4, MasterEqParams};

/// Valid master-equation parameters with a unique steady state.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> MasterEqParams {
    let gamma11: f64 = rng.random_range(0.1..3.0);
    let gamma22 = rng.random_range(0.1..3.0);
    let bound = (gamma11 * gamma22).sqrt();
    MasterEqParams {
        gamma11,
        gamma22,
        gamma12: rng.random_range(-0.9..0.9) * bound,
        g12: rng.random_range(-3.0..3.0),
        pump: rng.random_range(1e-3..2.0),
    }
}

/// Symmetric-emitter parameters in units of γ, the shape the optimizer produces.
pub fn random_symmetric_params<R: Rng + ?Sized>(rng: &mut R) -> MasterEqParams {
    let ratio: f64 = rng.random_range(-0.999..0.999);
    MasterEqParams {
        gamma11: 1.0,
        gamma22: 1.0,
        gamma12: ratio,
        g12: rng.random_range(-2.0..2.0),
        pump: 10f64.powf(rng.random_range(-3.0..0.5)),
    }
}

/// Random X state with a single-excitation coherence.
pub fn random_x_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let raw: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
    let total: f64 = raw.iter().sum();
    let p = raw.map(|v| v / total);
    let mag = rng.random::<f64>() * (p[1] * p[2]).sqrt();
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    DensityMatrix4::x_state(p, Complex64::from_polar(mag, phase))
}

/// Ginibre-induced random density matrix AA†/Tr(AA†).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix4 {
    let a = Matrix4::from_fn(|_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let m = a * a.adjoint();
    let tr = m.trace();
    DensityMatrix4(m / tr)
}
