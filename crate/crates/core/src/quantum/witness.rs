use nalgebra::Matrix4;
use num_complex::Complex64;

use super::DensityMatrix4;

/// Off-diagonal magnitude above which a state is not treated as X-type.
const X_STRUCTURE_TOL: f64 = 1e-10;

/// A witness value plus whether the closed form had to be abandoned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessValue {
    pub value: f64,
    /// The input was not X-type and the general eigenvalue route was used.
    pub used_general: bool,
}

/// C = 2·max{0, |ρ₁₂| − √(ρ₀₀ρ₃₃)} for single-coherence X states.
pub fn concurrence_checked(rho: &DensityMatrix4) -> WitnessValue {
    if rho.x_structure_error() > X_STRUCTURE_TOL {
        return WitnessValue { value: concurrence_wootters(rho), used_general: true };
    }
    let c = 2.0 * (rho.rho12().norm() - (rho.rho00() * rho.rho33()).max(0.0).sqrt());
    WitnessValue { value: c.clamp(0.0, 1.0), used_general: false }
}

pub fn concurrence(rho: &DensityMatrix4) -> f64 {
    concurrence_checked(rho).value
}

fn hermitian_part(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn psd_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = hermitian_part(m).symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0));
    let u = eig.eigenvectors;
    u * Matrix4::from_diagonal(&vals) * u.adjoint()
}

/// Wootters concurrence max{0, λ₁−λ₂−λ₃−λ₄}, with λᵢ the decreasing square
/// roots of the eigenvalues of ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y).
///
/// The λᵢ are obtained as eigenvalues of the Hermitian √(√ρ ρ̃ √ρ), which shares
/// its spectrum with √(ρρ̃).
pub fn concurrence_wootters(rho: &DensityMatrix4) -> f64 {
    let mut flip = Matrix4::<Complex64>::zeros();
    let one = Complex64::new(1.0, 0.0);
    flip[(0, 3)] = -one;
    flip[(1, 2)] = one;
    flip[(2, 1)] = one;
    flip[(3, 0)] = -one;
    let tilde = flip * rho.0.conjugate() * flip;
    let s = psd_sqrt(&rho.0);
    let r = hermitian_part(&(s * tilde * s));
    let mut lambdas: Vec<f64> =
        r.symmetric_eigenvalues().iter().map(|v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0)
}

/// N = max{0, √((ρ₀₀−ρ₃₃)² + 4|ρ₁₂|²) − (ρ₀₀+ρ₃₃)} for single-coherence X states.
pub fn negativity_checked(rho: &DensityMatrix4) -> WitnessValue {
    if rho.x_structure_error() > X_STRUCTURE_TOL {
        return WitnessValue { value: negativity_partial_transpose(rho), used_general: true };
    }
    let (a, d) = (rho.rho00(), rho.rho33());
    let n = ((a - d).powi(2) + 4.0 * rho.rho12().norm_sqr()).sqrt() - (a + d);
    WitnessValue { value: n.clamp(0.0, 1.0), used_general: false }
}

pub fn negativity(rho: &DensityMatrix4) -> f64 {
    negativity_checked(rho).value
}

/// 2·Σ|negative eigenvalues| of the partial transpose on emitter 2.
pub fn negativity_partial_transpose(rho: &DensityMatrix4) -> f64 {
    let mut pt = Matrix4::<Complex64>::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let (a1, a2) = (a & 1, a >> 1);
            let (b1, b2) = (b & 1, b >> 1);
            // ⟨a₁a₂|ρ^{T₂}|b₁b₂⟩ = ⟨a₁b₂|ρ|b₁a₂⟩
            pt[(a, b)] = rho.0[(a1 | (b2 << 1), b1 | (a2 << 1))];
        }
    }
    let neg: f64 = hermitian_part(&pt).symmetric_eigenvalues().iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    (2.0 * neg).clamp(0.0, 1.0)
}

/// S_L = (4/3)(1 − Tr ρ²).
pub fn linear_entropy(rho: &DensityMatrix4) -> f64 {
    4.0 / 3.0 * (1.0 - rho.purity())
}
