//! The discretized Lippmann–Schwinger operator A = I − k²·G₀·diag(ε−1)·δV.
//!
//! Unknowns are the total field in every voxel, stored voxel-major
//! (`x[3i + a]`). Off-diagonal blocks use the point-sampled free-space tensor;
//! the self block is supplied by [`SelfTerm`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::PermittivityGrid;
use crate::em::free_space_green_offset;
use crate::error::{Error, Result};

/// Largest dense system (3N unknowns) the oracle path will assemble.
pub const DENSE_LIMIT: usize = 6000;

/// Self-interaction of a voxel, expressed as k²·∫G₀ over the voxel (the
/// coefficient multiplying (ε−1)·x in the voxel's own equation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelfTerm {
    /// Equivalent-volume sphere of radius a: −1/3 + (ka)²/3 + i·k³δV/(6π).
    /// The −1/3 is the depolarization, the rest the finite-size and radiative
    /// corrections.
    EquivalentSphere,
    /// Fixed coefficient; lets tests and the validation suite swap the scheme.
    Fixed(Complex64),
}

impl SelfTerm {
    pub fn value(&self, spacing: f64, k: f64) -> Complex64 {
        match *self {
            SelfTerm::EquivalentSphere => {
                let volume = spacing.powi(3);
                let a = (3.0 * volume / (4.0 * PI)).cbrt();
                Complex64::new(-1.0 / 3.0 + (k * a).powi(2) / 3.0, k.powi(3) * volume / (6.0 * PI))
            }
            SelfTerm::Fixed(v) => v,
        }
    }
}

/// Coupling tensor between two distinct voxels, scaled by k²·δV.
pub(crate) fn pair_block(grid: &PermittivityGrid, i: usize, j: usize, k: f64) -> nalgebra::Matrix3<Complex64> {
    let rv = grid.center(i).to_vector() - grid.center(j).to_vector();
    free_space_green_offset(&rv, k).0 * Complex64::new(k * k * grid.voxel_volume(), 0.0)
}

/// Dense operator matrix (oracle path).
pub fn assemble_dense(grid: &PermittivityGrid, k: f64, self_term: SelfTerm) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let unknowns = 3 * n;
    if unknowns > DENSE_LIMIT {
        return Err(Error::DenseTooLarge { unknowns, limit: DENSE_LIMIT });
    }
    let s = self_term.value(grid.spacing, k);
    let chi = grid.contrast();
    let mut a = DMatrix::<Complex64>::identity(unknowns, unknowns);
    for i in 0..n {
        for c in 0..3 {
            a[(3 * i + c, 3 * i + c)] -= s * chi[i];
        }
    }
    for j in grid.active() {
        for i in 0..n {
            if i == j {
                continue;
            }
            let block = pair_block(grid, i, j, k);
            for r in 0..3 {
                for c in 0..3 {
                    a[(3 * i + r, 3 * j + c)] -= block[(r, c)] * chi[j];
                }
            }
        }
    }
    Ok(a)
}

/// Σ_{j≠i} G₀(rᵢ, rⱼ)·uⱼ by direct summation; reference for the FFT path.
pub fn direct_interaction(grid: &PermittivityGrid, k: f64, u: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let mut y = vec![Complex64::new(0.0, 0.0); 3 * n];
    for i in 0..n {
        let ri = grid.center(i).to_vector();
        for j in 0..n {
            if i == j {
                continue;
            }
            let g = free_space_green_offset(&(ri - grid.center(j).to_vector()), k).0;
            for r in 0..3 {
                for c in 0..3 {
                    y[3 * i + r] += g[(r, c)] * u[3 * j + c];
                }
            }
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{free_space_green, Position};

    const K: f64 = 2.0 * PI;

    #[test]
    fn vacuum_operator_is_identity() {
        let g = PermittivityGrid::centered([3, 3, 3], 0.1, 9.0).unwrap();
        let a = assemble_dense(&g, K, SelfTerm::EquivalentSphere).unwrap();
        assert_eq!(a, DMatrix::identity(81, 81));
    }

    #[test]
    fn size_limit_enforced() {
        let g = PermittivityGrid::centered([13, 13, 12], 0.05, 9.0).unwrap();
        assert!(matches!(
            assemble_dense(&g, K, SelfTerm::EquivalentSphere),
            Err(Error::DenseTooLarge { unknowns: 6084, .. })
        ));
    }

    #[test]
    fn two_voxel_system_matches_hand_built() {
        let mut g = PermittivityGrid::vacuum(Position::new(0.0, 0.0, 0.0), 0.1, [2, 1, 1], 9.0).unwrap();
        g.eps = vec![2.0, 3.5];
        let a = assemble_dense(&g, K, SelfTerm::EquivalentSphere).unwrap();

        let s = SelfTerm::EquivalentSphere.value(0.1, K);
        let v = 1e-3;
        let g01 = free_space_green(g.center(0), g.center(1), K).unwrap().0;
        let g10 = free_space_green(g.center(1), g.center(0), K).unwrap().0;
        let mut hand = DMatrix::<Complex64>::zeros(6, 6);
        for r in 0..3 {
            hand[(r, r)] = Complex64::new(1.0, 0.0) - s * 1.0;
            hand[(3 + r, 3 + r)] = Complex64::new(1.0, 0.0) - s * 2.5;
            for c in 0..3 {
                hand[(r, 3 + c)] = -g01[(r, c)] * (K * K * v * 2.5);
                hand[(3 + r, c)] = -g10[(r, c)] * (K * K * v * 1.0);
            }
        }
        assert!((a - hand).camax() < 1e-12);
    }

    #[test]
    fn self_term_radiative_part_matches_free_self_tensor() {
        let h = 0.05;
        let s = SelfTerm::EquivalentSphere.value(h, K);
        // k²·δV·Im G₀(r,r) with Im G₀(r,r) = k/(6π).
        assert!((s.im - K * K * h.powi(3) * K / (6.0 * PI)).abs() < 1e-15);
        assert!(s.re > -1.0 / 3.0 && s.re < 0.0);
    }
}
