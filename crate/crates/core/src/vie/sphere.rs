use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use super::solve::{solve_system, SolverOptions};
use super::PermittivityGrid;
use crate::em::Position;
use crate::error::Result;

/// Polarizability of a voxelized dielectric sphere next to its
/// Clausius–Mossotti value 4πa³(ε−1)/(ε+2).
///
/// `a` is the equivalent-volume radius of the voxel set, (3NΔ³/4π)^{1/3},
/// so staircase volume error does not masquerade as solver error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePolarizability {
    /// α_zz from the induced dipole under a ẑ-polarized unit plane wave.
    pub numeric: Complex64,
    pub clausius_mossotti: f64,
    pub equivalent_radius: f64,
    pub voxels: usize,
}

impl SpherePolarizability {
    pub fn relative_error(&self) -> f64 {
        (self.numeric.re - self.clausius_mossotti).abs() / self.clausius_mossotti
    }
}

/// Voxelizes a sphere of `radius` with `per_radius` voxels per radius,
/// illuminates it with E = ẑ·e^{ikx}, and sums the induced dipoles.
pub fn sphere_polarizability(
    radius: f64,
    eps: f64,
    per_radius: usize,
    k: f64,
    opts: &SolverOptions,
) -> Result<SpherePolarizability> {
    let h = radius / per_radius as f64;
    let n = 2 * per_radius;
    let mut grid = PermittivityGrid::centered([n, n, n], h, eps.max(1.0))?;
    for i in 0..grid.len() {
        if grid.center(i).distance(Position::new(0.0, 0.0, 0.0)) <= radius {
            grid.eps[i] = eps;
        }
    }
    let b: Vec<Complex64> = (0..grid.len())
        .flat_map(|i| {
            let phase = Complex64::from_polar(1.0, k * grid.center(i).x);
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), phase]
        })
        .collect();
    let x = solve_system(&grid, k, &[b], opts)?.pop().expect("one solution");
    let dv = grid.voxel_volume();
    let mut p = Vector3::<Complex64>::zeros();
    for i in grid.active() {
        let w = (grid.eps[i] - 1.0) * dv;
        for a in 0..3 {
            p[a] += x[3 * i + a] * w;
        }
    }
    let voxels = grid.active().count();
    let a = (3.0 * voxels as f64 * dv / (4.0 * PI)).cbrt();
    Ok(SpherePolarizability {
        numeric: p[2],
        clausius_mossotti: 4.0 * PI * a.powi(3) * (eps - 1.0) / (eps + 2.0),
        equivalent_radius: a,
        voxels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vie::SelfTerm;

    const K: f64 = 2.0 * PI;

    #[test]
    fn small_sphere_approaches_clausius_mossotti() {
        for n in [5, 8] {
            let s = sphere_polarizability(0.05, 2.25, n, K, &SolverOptions::default()).unwrap();
            assert!(s.relative_error() < 0.03, "{s:?}");
            assert!((s.equivalent_radius / 0.05 - 1.0).abs() < 0.02);
        }
        let s = sphere_polarizability(0.05, 2.25, 8, K, &SolverOptions::dense()).unwrap_err();
        assert!(matches!(s, crate::Error::DenseTooLarge { .. }));
        let s = sphere_polarizability(0.05, 2.25, 8, K, &SolverOptions::default()).unwrap();
        assert!(s.numeric.im > 0.0);
    }

    #[test]
    fn corrupted_self_term_is_detected() {
        let opts = SolverOptions { self_term: SelfTerm::Fixed(Complex64::new(0.0, 0.0)), ..SolverOptions::default() };
        let s = sphere_polarizability(0.05, 2.25, 8, K, &opts).unwrap();
        assert!(s.relative_error() > 0.05, "{s:?}");
    }
}
