use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DensityMatrix4;
use crate::em::CouplingSet;
use crate::error::{Error, Result};

pub type Liouvillian = SMatrix<Complex64, 16, 16>;
pub type Vec16 = SVector<Complex64, 16>;

/// Singular values below this fraction of the largest count towards the kernel.
const KERNEL_REL_TOL: f64 = 1e-10;
const STEADY_RESIDUAL_TOL: f64 = 1e-10;

/// Rates in units of γ₀; `pump` is the symmetric incoherent pump P.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterEqParams {
    pub gamma11: f64,
    pub gamma22: f64,
    pub gamma12: f64,
    pub g12: f64,
    pub pump: f64,
}

impl MasterEqParams {
    pub fn new(gamma11: f64, gamma22: f64, gamma12: f64, g12: f64, pump: f64) -> Result<Self> {
        let p = Self { gamma11, gamma22, gamma12, g12, pump };
        p.validate()?;
        Ok(p)
    }

    /// Rates normalized to γ = γ₁₁ with the pump held at `pump_ratio`·γ.
    pub fn from_couplings(c: &CouplingSet, pump_ratio: f64) -> Result<Self> {
        c.check()?;
        let g = c.gamma11;
        Self::new(1.0, c.gamma22 / g, c.gamma12 / g, c.g12 / g, pump_ratio)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma11, self.gamma22, self.gamma12, self.g12, self.pump];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite rate".into()));
        }
        if !(self.gamma11 > 0.0 && self.gamma22 > 0.0) {
            return Err(Error::NonPositiveDecay { gamma11: self.gamma11, gamma22: self.gamma22 });
        }
        if self.pump < 0.0 {
            return Err(Error::InvalidParams(format!("negative pump {}", self.pump)));
        }
        let bound = (self.gamma11 * self.gamma22).sqrt();
        if self.gamma12.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::InconsistentCouplings { gamma12: self.gamma12, bound });
        }
        Ok(())
    }

    pub fn max_rate(&self) -> f64 {
        [self.gamma11, self.gamma22, self.gamma12.abs(), self.g12.abs(), self.pump]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn lowering() -> [Matrix4<Complex64>; 2] {
    let one = Complex64::new(1.0, 0.0);
    let mut s1 = Matrix4::zeros();
    s1[(0, 1)] = one; // |e₁g₂⟩ → |g₁g₂⟩
    s1[(2, 3)] = one; // |e₁e₂⟩ → |g₁e₂⟩
    let mut s2 = Matrix4::zeros();
    s2[(0, 2)] = one;
    s2[(1, 3)] = one;
    [s1, s2]
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// dρ/dt for the master equation in the rotating frame.
pub fn apply_generator(params: &MasterEqParams, rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let s = lowering();
    let sd = [s[0].adjoint(), s[1].adjoint()];
    let i = Complex64::new(0.0, 1.0);
    let h = (sd[0] * s[1] + sd[1] * s[0]) * Complex64::new(params.g12, 0.0);
    let mut out = (h * rho - rho * h) * (-i);

    let gamma = [[params.gamma11, params.gamma12], [params.gamma12, params.gamma22]];
    for a in 0..2 {
        for b in 0..2 {
            let w = gamma[a][b];
            if w == 0.0 {
                continue;
            }
            // L_ab(ρ) = 2σ_b ρ σ_a† − σ_a†σ_b ρ − ρ σ_a†σ_b
            let n = sd[a] * s[b];
            let l = s[b] * rho * sd[a] * c(2.0) - n * rho - rho * n;
            out += l * Complex64::new(w / 2.0, 0.0);
        }
    }
    if params.pump != 0.0 {
        for a in 0..2 {
            // L'_aa(ρ) = 2σ_a† ρ σ_a − σ_aσ_a† ρ − ρ σ_aσ_a†
            let n = s[a] * sd[a];
            let l = sd[a] * rho * s[a] * c(2.0) - n * rho - rho * n;
            out += l * Complex64::new(params.pump / 2.0, 0.0);
        }
    }
    out
}

pub fn vectorize(rho: &Matrix4<Complex64>) -> Vec16 {
    Vec16::from_iterator(rho.iter().copied())
}

pub fn unvectorize(v: &Vec16) -> Matrix4<Complex64> {
    Matrix4::from_iterator(v.iter().copied())
}

/// Matrix L with vec(dρ/dt) = L·vec(ρ).
pub fn build_liouvillian(params: &MasterEqParams) -> Liouvillian {
    let mut l = Liouvillian::zeros();
    for col in 0..16 {
        let mut e = Matrix4::zeros();
        e[(col % 4, col / 4)] = Complex64::new(1.0, 0.0);
        let image = vectorize(&apply_generator(params, &e));
        l.set_column(col, &image);
    }
    l
}

/// Unique trace-one kernel vector of the Liouvillian.
pub fn steady_state(params: &MasterEqParams) -> Result<DensityMatrix4> {
    params.validate()?;
    let l = build_liouvillian(params);
    let svd = l.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let threshold = KERNEL_REL_TOL * smax.max(f64::MIN_POSITIVE);
    let kernel_dim = sv.iter().filter(|&&s| s <= threshold).count();
    if kernel_dim > 1 {
        return Err(Error::MultipleSteadyStates { kernel_dim });
    }
    let imin = sv.imin();
    let v = Vec16::from_iterator(v_t.row(imin).iter().map(|z| z.conj()));
    let mut rho = unvectorize(&v);
    let tr = rho.trace();
    rho /= tr;
    rho = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);

    let residual = (l * vectorize(&rho)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > STEADY_RESIDUAL_TOL * smax.max(1.0) {
        return Err(Error::InvalidParams(format!(
            "steady-state residual {residual:e} above tolerance; kernel is ill-conditioned"
        )));
    }
    Ok(DensityMatrix4(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{concurrence, random::random_params};
    use rand::SeedableRng;

    fn res(params: &MasterEqParams, rho: &DensityMatrix4) -> f64 {
        let l = build_liouvillian(params);
        (l * vectorize(&rho.0)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn decay_only_ground_state_in_kernel() {
        let p = MasterEqParams::new(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(res(&p, &DensityMatrix4::ground()) < 1e-15);
        let rho = steady_state(&p).unwrap();
        assert!((rho.rho00() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_only_generator_has_imaginary_spectrum() {
        let p = MasterEqParams { gamma11: 0.0, gamma22: 0.0, gamma12: 0.0, g12: 0.7, pump: 0.0 };
        let l = build_liouvillian(&p);
        // Skew-adjoint in the Hilbert–Schmidt product ⇒ purely imaginary eigenvalues.
        let herm_part = l + l.adjoint();
        assert!(herm_part.iter().all(|z| z.norm() < 1e-14));
        let dense = nalgebra::DMatrix::from_iterator(16, 16, l.iter().copied());
        let eigs = nalgebra::linalg::Schur::new(dense).eigenvalues().expect("complex Schur form");
        for ev in eigs.iter() {
            assert!(ev.re.abs() < 1e-12);
        }
    }

    #[test]
    fn trace_preserving() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            let l = build_liouvillian(&p);
            // Trace functional annihilates every column.
            for c in 0..16 {
                let t: Complex64 = (0..4).map(|i| l[(i + 4 * i, c)]).sum();
                assert!(t.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn isolated_emitters_product_state() {
        let gamma = 1.0;
        let pump = 5e-3;
        let p = MasterEqParams::new(gamma, gamma, 0.0, 0.0, pump).unwrap();
        let rho = steady_state(&p).unwrap();
        let excited = rho.rho11() + rho.rho33();
        assert!((excited - 4.9751e-3).abs() < 1e-7);
        assert!((excited - pump / (pump + gamma)).abs() < 1e-12);
        // Product state: ρ₃₃ = n², ρ₀₀ = (1−n)².
        let n = pump / (pump + gamma);
        assert!((rho.rho33() - n * n).abs() < 1e-12);
        assert!((rho.rho00() - (1.0 - n).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn balanced_pump_gives_maximally_mixed() {
        let p = MasterEqParams::new(1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let rho = steady_state(&p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.25 } else { 0.0 };
                assert!((rho.0[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dark_state_degeneracy_reported() {
        // |gg⟩, the singlet, and the two coherences between them are all stationary.
        let p = MasterEqParams::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        match steady_state(&p) {
            Err(Error::MultipleSteadyStates { kernel_dim }) => assert_eq!(kernel_dim, 4),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn near_dicke_limit_concurrence() {
        let p = MasterEqParams::new(1.0, 1.0, 1.0 - 1e-6, 0.0, 5e-3).unwrap();
        let rho = steady_state(&p).unwrap();
        let c = concurrence(&rho);
        // Plateau value of the near-ideal dissipative coupling at P/γ = 5e-3.
        assert!((c - 0.44565).abs() < 1e-4, "C = {c}");
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(MasterEqParams::new(0.0, 1.0, 0.0, 0.0, 0.1).is_err());
        assert!(MasterEqParams::new(1.0, 1.0, 0.0, 0.0, -0.1).is_err());
        assert!(MasterEqParams::new(1.0, 1.0, 1.5, 0.0, 0.1).is_err());
    }
}
