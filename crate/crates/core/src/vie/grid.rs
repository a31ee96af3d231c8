use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::em::Position;
use crate::error::{Error, Result};

/// Default permittivity ceiling (semiconductor-like dielectric).
pub const DEFAULT_EPS_MAX: f64 = 9.0;

/// Uniform Cartesian voxel map of real permittivities.
///
/// Voxel `(ix, iy, iz)` has linear index `(ix·ny + iy)·nz + iz`, so iterating
/// indices in order walks the grid lexicographically. `origin` is the lower
/// corner of voxel `(0, 0, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermittivityGrid {
    pub origin: Position,
    pub spacing: f64,
    pub dims: [usize; 3],
    pub eps: Vec<f64>,
    pub eps_max: f64,
    pub frozen: Vec<bool>,
}

impl PermittivityGrid {
    pub fn vacuum(origin: Position, spacing: f64, dims: [usize; 3], eps_max: f64) -> Result<Self> {
        let n = dims.iter().product();
        let grid = Self {
            origin,
            spacing,
            dims,
            eps: vec![1.0; n],
            eps_max,
            frozen: vec![false; n],
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Vacuum grid whose geometric centre sits at the coordinate origin.
    pub fn centered(dims: [usize; 3], spacing: f64, eps_max: f64) -> Result<Self> {
        let half = |n: usize| -(n as f64) * spacing / 2.0;
        Self::vacuum(Position::new(half(dims[0]), half(dims[1]), half(dims[2])), spacing, dims, eps_max)
    }

    pub fn validate(&self) -> Result<()> {
        let n: usize = self.dims.iter().product();
        if n == 0 {
            return Err(Error::InvalidGrid("grid has no voxels".into()));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing {} must be positive", self.spacing)));
        }
        if !self.origin.is_finite() {
            return Err(Error::InvalidGrid("non-finite origin".into()));
        }
        if !(self.eps_max >= 1.0 && self.eps_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("eps_max {} below 1", self.eps_max)));
        }
        if self.eps.len() != n || self.frozen.len() != n {
            return Err(Error::InvalidGrid(format!(
                "expected {n} voxels, got {} permittivities and {} frozen flags",
                self.eps.len(),
                self.frozen.len()
            )));
        }
        if let Some((i, e)) =
            self.eps.iter().enumerate().find(|(_, &e)| !(1.0..=self.eps_max).contains(&e))
        {
            return Err(Error::InvalidGrid(format!(
                "voxel {i} has permittivity {e} outside [1, {}]",
                self.eps_max
            )));
        }
        Ok(())
    }

    /// Δ ≤ λ/(10·√ε_max), the resolution expected of production solves.
    pub fn discretization_ok(&self) -> bool {
        self.spacing <= 1.0 / (10.0 * self.eps_max.sqrt())
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.dims[1] + iy) * self.dims[2] + iz
    }

    pub fn coords(&self, i: usize) -> [usize; 3] {
        let iz = i % self.dims[2];
        let iy = (i / self.dims[2]) % self.dims[1];
        let ix = i / (self.dims[1] * self.dims[2]);
        [ix, iy, iz]
    }

    pub fn center(&self, i: usize) -> Position {
        let [ix, iy, iz] = self.coords(i);
        let h = self.spacing;
        Position::new(
            self.origin.x + (ix as f64 + 0.5) * h,
            self.origin.y + (iy as f64 + 0.5) * h,
            self.origin.z + (iz as f64 + 0.5) * h,
        )
    }

    /// Susceptibility-like contrast ε − 1 per voxel.
    pub fn contrast(&self) -> Vec<Complex64> {
        self.eps.iter().map(|&e| Complex64::new(e - 1.0, 0.0)).collect()
    }

    /// Indices of voxels carrying material.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.eps.iter().enumerate().filter(|(_, &e)| e != 1.0).map(|(i, _)| i)
    }

    pub fn is_vacuum(&self) -> bool {
        self.eps.iter().all(|&e| e == 1.0)
    }

    /// Freezes every voxel whose centre lies within `radius` of any point.
    pub fn freeze_near(&mut self, points: &[Position], radius: f64) {
        for i in 0..self.len() {
            let c = self.center(i);
            if points.iter().any(|p| p.distance(c) <= radius + 1e-12) {
                self.frozen[i] = true;
            }
        }
    }

    pub fn freeze_all(&mut self) {
        self.frozen.iter_mut().for_each(|f| *f = true);
    }

    /// Mirror image through the grid's mid-plane normal to z.
    pub fn mirror_z(&self, i: usize) -> usize {
        let [ix, iy, iz] = self.coords(i);
        self.index(ix, iy, self.dims[2] - 1 - iz)
    }

    /// Quarter-turn about the grid's central z axis; requires nx == ny.
    pub fn rotate_z(&self, i: usize) -> Option<usize> {
        if self.dims[0] != self.dims[1] {
            return None;
        }
        let [ix, iy, iz] = self.coords(i);
        Some(self.index(self.dims[1] - 1 - iy, ix, iz))
    }

    /// Whether the permittivity map is invariant under the z mirror.
    pub fn is_mirror_z_symmetric(&self) -> bool {
        (0..self.len()).all(|i| self.eps[i] == self.eps[self.mirror_z(i)])
    }
}
