use nalgebra::Matrix4;
use num_complex::Complex64;

/// Two-qubit density matrix in the basis {|g₁g₂⟩, |e₁g₂⟩, |g₁e₂⟩, |e₁e₂⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(pub Matrix4<Complex64>);

impl DensityMatrix4 {
    /// |g₁g₂⟩⟨g₁g₂|
    pub fn ground() -> Self {
        Self::basis_projector(0)
    }

    pub fn basis_projector(i: usize) -> Self {
        let mut m = Matrix4::zeros();
        m[(i, i)] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::from_diagonal_element(Complex64::new(0.25, 0.0)))
    }

    /// |ψ⟩⟨ψ| for an unnormalized amplitude vector.
    pub fn pure(amplitudes: [Complex64; 4]) -> Self {
        let v = nalgebra::Vector4::from(amplitudes);
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Self(v * v.adjoint() / Complex64::new(norm2, 0.0))
    }

    /// X-type state with populations `p` and single-excitation coherence `rho12`.
    pub fn x_state(p: [f64; 4], rho12: Complex64) -> Self {
        let mut m = Matrix4::zeros();
        for (i, &v) in p.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m[(1, 2)] = rho12;
        m[(2, 1)] = rho12.conj();
        Self(m)
    }

    pub fn rho00(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn rho11(&self) -> f64 {
        self.0[(1, 1)].re
    }

    pub fn rho22(&self) -> f64 {
        self.0[(2, 2)].re
    }

    pub fn rho33(&self) -> f64 {
        self.0[(3, 3)].re
    }

    /// ⟨e₁g₂|ρ|g₁e₂⟩
    pub fn rho12(&self) -> Complex64 {
        self.0[(1, 2)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let e = h.symmetric_eigenvalues();
        [e[0], e[1], e[2], e[3]]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Largest magnitude among off-diagonal entries other than ρ₁₂ and ρ₂₁.
    pub fn x_structure_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i == j || (i, j) == (1, 2) || (i, j) == (2, 1) {
                    continue;
                }
                worst = worst.max(self.0[(i, j)].norm());
            }
        }
        worst
    }

    pub fn purity(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Checks the density-matrix invariants at the given tolerances.
    pub fn is_physical(&self, tol: f64, eig_tol: f64) -> bool {
        self.hermiticity_error() <= tol
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol
            && self.min_eigenvalue() >= -eig_tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_normalized() {
        let c = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix4::pure([c, c, c, c]);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!(rho.is_physical(1e-12, 1e-12));
    }

    #[test]
    fn x_structure_detects_outer_coherence() {
        let mut rho = DensityMatrix4::x_state([0.4, 0.3, 0.2, 0.1], Complex64::new(0.1, 0.05));
        assert_eq!(rho.x_structure_error(), 0.0);
        rho.0[(0, 3)] = Complex64::new(0.01, 0.0);
        assert!((rho.x_structure_error() - 0.01).abs() < 1e-16);
    }
}
