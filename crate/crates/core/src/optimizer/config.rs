use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::em::{check_unit, Position, COINCIDENT_THRESHOLD};
use crate::error::{Error, Result};
use crate::vie::{PermittivityGrid, DEFAULT_EPS_MAX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Each accepted increment updates the running Green's tensors before the
    /// next voxel is tried.
    #[default]
    Sequential,
    /// Every candidate is scored against the start-of-sweep tensors; accepted
    /// increments are applied jointly.
    FrozenReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    #[default]
    None,
    /// Four-fold rotation about the grid's z axis.
    ZAxisRotation4,
    /// Reflection through the grid's z mid-plane.
    MirrorZ,
}

impl Symmetry {
    /// Voxels that must change together with `i`, sorted and deduplicated.
    pub fn orbit(&self, grid: &PermittivityGrid, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        match self {
            Symmetry::None => {}
            Symmetry::MirrorZ => out.push(grid.mirror_z(i)),
            Symmetry::ZAxisRotation4 => {
                let mut j = i;
                for _ in 0..3 {
                    j = grid.rotate_z(j).expect("rotation symmetry needs a square xy cross-section");
                    out.push(j);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn check_grid(&self, grid: &PermittivityGrid) -> Result<()> {
        if *self == Symmetry::ZAxisRotation4 && grid.dims[0] != grid.dims[1] {
            return Err(Error::Config(format!(
                "z-axis-rotation-4fold needs nx == ny, got {}×{}",
                grid.dims[0], grid.dims[1]
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    #[default]
    Concurrence,
    Negativity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignConfig {
    pub delta_eps: f64,
    pub delta_eps_min: f64,
    pub eps_max: f64,
    pub tol_accept: f64,
    pub eta_converge: f64,
    pub max_iterations: usize,
    pub sweep_mode: SweepMode,
    pub bidirectional: bool,
    /// In voxel spacings.
    pub exclusion_radius: f64,
    pub symmetry: Symmetry,
    pub target: Target,
    /// P/γ with γ = γ₁₁ of the current device.
    pub pump_ratio: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            delta_eps: 0.05,
            delta_eps_min: 1e-3,
            eps_max: DEFAULT_EPS_MAX,
            tol_accept: 1e-9,
            eta_converge: 1e-2,
            max_iterations: 200,
            sweep_mode: SweepMode::Sequential,
            bidirectional: false,
            exclusion_radius: 2.0,
            symmetry: Symmetry::None,
            target: Target::Concurrence,
            pump_ratio: 5e-3,
        }
    }
}

impl DesignConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.delta_eps > 0.0 && self.delta_eps.is_finite()) {
            return bad(format!("delta_eps must be positive, got {}", self.delta_eps));
        }
        if !(self.delta_eps_min > 0.0) {
            return bad(format!("delta_eps_min must be positive, got {}", self.delta_eps_min));
        }
        if !(self.eps_max >= 1.0 + self.delta_eps && self.eps_max.is_finite()) {
            return bad(format!("eps_max {} must be at least 1 + delta_eps", self.eps_max));
        }
        if !(self.pump_ratio > 0.0 && self.pump_ratio.is_finite()) {
            return bad(format!("pump_ratio must be positive, got {}", self.pump_ratio));
        }
        if !(self.tol_accept >= 0.0) {
            return bad(format!("tol_accept must be non-negative, got {}", self.tol_accept));
        }
        if !(self.eta_converge > 0.0) {
            return bad(format!("eta_converge must be positive, got {}", self.eta_converge));
        }
        if !(self.exclusion_radius >= 0.0 && self.exclusion_radius.is_finite()) {
            return bad(format!("exclusion_radius must be non-negative, got {}", self.exclusion_radius));
        }
        Ok(())
    }
}

/// Two identical emitters with a shared dipole orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emitters {
    pub r1: Position,
    pub r2: Position,
    pub p_hat: Vector3<f64>,
}

impl Emitters {
    /// Emitters at z = ∓d/2 on the z axis with z-oriented dipoles.
    pub fn on_axis(d12: f64) -> Self {
        Self { r1: Position::on_axis(-d12 / 2.0), r2: Position::on_axis(d12 / 2.0), p_hat: Vector3::z() }
    }

    pub fn separation(&self) -> f64 {
        self.r1.distance(self.r2)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit(&self.p_hat)?;
        if !(self.r1.is_finite() && self.r2.is_finite()) {
            return Err(Error::Config("non-finite emitter position".into()));
        }
        if self.separation() < COINCIDENT_THRESHOLD {
            return Err(Error::CoincidentPoints { separation: self.separation() });
        }
        Ok(())
    }
}
