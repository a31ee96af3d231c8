//! Free-space dyadic Green's function and conversion to emitter coupling rates.
//!
//! Internal units: lengths in λ₀, rates in γ₀, ħ = ε₀ = c = 1. With λ₀ = 1 the
//! free-space wavenumber is 2π. Every rate produced here is already divided by
//! the free-space decay rate, so the dipole strength never appears.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Sub};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Separations below this (in λ₀) are treated as coincident points.
pub const COINCIDENT_THRESHOLD: f64 = 1e-6;

/// Slack on the positivity bound |γ₁₂| ≤ √(γ₁₁γ₂₂).
pub const COUPLING_BOUND_TOL: f64 = 1e-9;

const DIPOLE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// Reference wavelength; the unit of length.
    pub lambda0: f64,
    /// Wavenumber in grid units, 2π/λ₀.
    pub k0: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { lambda0: 1.0, k0: 2.0 * PI }
    }
}

impl UnitSystem {
    /// γ₀ is the rate unit.
    pub const RATE_UNIT: f64 = 1.0;

    /// Converts a length in λ₀ to nanometres for a given physical wavelength.
    pub fn to_nanometres(&self, length: f64, wavelength_nm: f64) -> f64 {
        length / self.lambda0 * wavelength_nm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn on_axis(z: f64) -> Self {
        Self::new(0.0, 0.0, z)
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn distance(self, other: Position) -> f64 {
        (self.to_vector() - other.to_vector()).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<Vector3<f64>> for Position {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// A 3×3 complex dyadic Green's tensor sample, in units of λ₀⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyad33(pub Matrix3<Complex64>);

impl Dyad33 {
    pub fn zeros() -> Self {
        Self(Matrix3::zeros())
    }

    pub fn identity_scaled(s: Complex64) -> Self {
        Self(Matrix3::from_diagonal_element(s))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// p̂* · G · p̂ for a real unit dipole orientation.
    pub fn project(&self, p_hat: &Vector3<f64>) -> Complex64 {
        let p = p_hat.map(|v| Complex64::new(v, 0.0));
        p.dot(&(self.0 * p))
    }

    /// G · p̂, the field radiated by a unit dipole along `p_hat`.
    pub fn apply(&self, p_hat: &Vector3<f64>) -> Vector3<Complex64> {
        self.0 * p_hat.map(|v| Complex64::new(v, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for Dyad33 {
    type Output = Dyad33;
    fn add(self, rhs: Dyad33) -> Dyad33 {
        Dyad33(self.0 + rhs.0)
    }
}

impl AddAssign for Dyad33 {
    fn add_assign(&mut self, rhs: Dyad33) {
        self.0 += rhs.0;
    }
}

impl Sub for Dyad33 {
    type Output = Dyad33;
    fn sub(self, rhs: Dyad33) -> Dyad33 {
        Dyad33(self.0 - rhs.0)
    }
}

impl Mul for Dyad33 {
    type Output = Dyad33;
    fn mul(self, rhs: Dyad33) -> Dyad33 {
        Dyad33(self.0 * rhs.0)
    }
}

/// Dimensionless master-equation inputs, all in units of γ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    pub gamma11: f64,
    pub gamma22: f64,
    pub gamma12: f64,
    pub g12: f64,
    /// Purcell factor of emitter 1, γ₁₁/γ₀.
    pub purcell: f64,
}

impl CouplingSet {
    pub fn new(gamma11: f64, gamma22: f64, gamma12: f64, g12: f64) -> Result<Self> {
        let set = Self { gamma11, gamma22, gamma12, g12, purcell: gamma11 };
        set.check()?;
        Ok(set)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.gamma11 > 0.0 && self.gamma22 > 0.0) {
            return Err(Error::NonPositiveDecay { gamma11: self.gamma11, gamma22: self.gamma22 });
        }
        let bound = (self.gamma11 * self.gamma22).sqrt();
        if !(self.gamma12.abs() <= bound + COUPLING_BOUND_TOL) {
            return Err(Error::InconsistentCouplings { gamma12: self.gamma12, bound });
        }
        Ok(())
    }

    /// Purcell factor of emitter 2.
    pub fn purcell2(&self) -> f64 {
        self.gamma22
    }

    /// Free-space couplings of two parallel dipoles aligned with their separation.
    pub fn free_space_aligned(distance: f64) -> Self {
        let x = 2.0 * PI * distance;
        let (s, c) = x.sin_cos();
        let x3 = x * x * x;
        Self {
            gamma11: 1.0,
            gamma22: 1.0,
            gamma12: 3.0 * (s - x * c) / x3,
            g12: 1.5 * (c + x * s) / x3,
            purcell: 1.0,
        }
    }
}

/// Homogeneous-medium dyadic Green's function [I + ∇∇/k²] e^{ikR}/(4πR).
pub fn free_space_green(r1: Position, r2: Position, k: f64) -> Result<Dyad33> {
    let rv = r1.to_vector() - r2.to_vector();
    let r = rv.norm();
    if !(r >= COINCIDENT_THRESHOLD) {
        return Err(Error::CoincidentPoints { separation: r });
    }
    Ok(free_space_green_offset(&rv, k))
}

/// Same as [`free_space_green`] for a displacement vector known to be non-zero.
pub(crate) fn free_space_green_offset(rv: &Vector3<f64>, k: f64) -> Dyad33 {
    let r = rv.norm();
    let x = k * r;
    let x2 = x * x;
    let ikr = Complex64::new(0.0, x);
    let pre = Complex64::from_polar(1.0 / (4.0 * PI * r), x);
    let a = pre * (1.0 + (ikr - 1.0) / x2);
    let b = pre * ((3.0 - 3.0 * ikr - x2) / x2);
    let u = rv / r;
    let mut g = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { a } else { Complex64::new(0.0, 0.0) };
            g[(i, j)] = delta + b * (u[i] * u[j]);
        }
    }
    Dyad33(g)
}

/// Finite part of the free-space self tensor: the radiative imaginary diagonal
/// k/(6π). The divergent real part renormalizes the transition frequency.
pub fn free_space_self_green(k: f64) -> Dyad33 {
    Dyad33::identity_scaled(Complex64::new(0.0, k / (6.0 * PI)))
}

pub fn check_unit(p_hat: &Vector3<f64>) -> Result<()> {
    let norm = p_hat.norm();
    if (norm - 1.0).abs() > DIPOLE_NORM_TOL {
        return Err(Error::InvalidDipole { norm });
    }
    Ok(())
}

/// γᵢⱼ = (6π/k)·Im{p̂*Gp̂}, g₁₂ = (3π/k)·Re{p̂*G₁₂p̂}.
pub fn couplings_from_green(
    g11: &Dyad33,
    g22: &Dyad33,
    g12: &Dyad33,
    p_hat: &Vector3<f64>,
    k: f64,
) -> Result<CouplingSet> {
    check_unit(p_hat)?;
    let gamma = |g: &Dyad33| 6.0 * PI / k * g.project(p_hat).im;
    let cross = g12.project(p_hat);
    CouplingSet::new(gamma(g11), gamma(g22), 6.0 * PI / k * cross.im, 3.0 * PI / k * cross.re)
}
