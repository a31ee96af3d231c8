use serde::{Deserialize, Serialize};

use super::config::{DesignConfig, Emitters};
use super::sweep::{sweep_once, EmitterTensors, SolvedState};
use crate::em::CouplingSet;
use crate::error::{Error, Result};
use crate::quantum::DensityMatrix4;
use crate::vie::{PermittivityGrid, SolverOptions};

/// One completed iteration of the design loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationEntry {
    pub n: usize,
    pub target_value: f64,
    pub concurrence: f64,
    pub negativity: f64,
    pub accepted_count: usize,
    pub couplings: CouplingSet,
    /// Normalized by γ₁₁.
    pub gamma12_over_gamma: f64,
    pub g12_over_gamma: f64,
    pub eq3_mismatch: f64,
    pub delta_eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// A sweep accepted no voxel.
    NoAcceptance,
    /// The re-solved target improved by less than tol_accept.
    Stalled,
    MaxIterations,
    /// δε was halved below delta_eps_min.
    DeltaEpsFloor,
}

#[derive(Debug, Clone)]
pub struct DesignRecord {
    pub entries: Vec<IterationEntry>,
    pub grid: PermittivityGrid,
    pub rho: DensityMatrix4,
    pub emitters: Emitters,
    pub config: DesignConfig,
    pub stop: StopReason,
    /// Sweeps reverted by the safeguard.
    pub reverted: usize,
}

impl DesignRecord {
    pub fn final_entry(&self) -> &IterationEntry {
        self.entries.last().expect("record holds the initial state")
    }

    pub fn initial_entry(&self) -> &IterationEntry {
        &self.entries[0]
    }
}

/// Relative Frobenius mismatch between G_n + ΣδG and the re-solved tensors,
/// max-aggregated over (1,1), (2,2), (1,2).
pub fn verify_convergence(estimate: &EmitterTensors, resolved: &EmitterTensors) -> f64 {
    estimate.relative_mismatch(resolved)
}

fn entry(n: usize, state: &SolvedState, accepted_count: usize, mismatch: f64, delta_eps: f64) -> IterationEntry {
    let p = &state.eval.params;
    IterationEntry {
        n,
        target_value: state.eval.value,
        concurrence: state.eval.concurrence,
        negativity: state.eval.negativity,
        accepted_count,
        couplings: state.eval.couplings,
        gamma12_over_gamma: p.gamma12,
        g12_over_gamma: p.g12,
        eq3_mismatch: mismatch,
        delta_eps,
    }
}

fn in_iteration<T>(iteration: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Iteration { iteration, source: Box::new(e) })
}

/// Greedy design loop starting from `grid0`.
pub fn optimize(
    grid0: PermittivityGrid,
    emitters: &Emitters,
    k: f64,
    config: &DesignConfig,
    opts: &SolverOptions,
) -> Result<DesignRecord> {
    optimize_with_progress(grid0, emitters, k, config, opts, |_| {})
}

/// [`optimize`] with a callback invoked after every completed iteration.
pub fn optimize_with_progress(
    grid0: PermittivityGrid,
    emitters: &Emitters,
    k: f64,
    config: &DesignConfig,
    opts: &SolverOptions,
    mut progress: impl FnMut(&IterationEntry),
) -> Result<DesignRecord> {
    config.validate()?;
    emitters.validate()?;
    grid0.validate()?;
    config.symmetry.check_grid(&grid0)?;
    let mut grid = grid0;
    grid.eps_max = grid.eps_max.min(config.eps_max);
    grid.validate()?;
    let radius = config.exclusion_radius * grid.spacing;
    grid.freeze_near(&[emitters.r1, emitters.r2], radius);
    for i in 0..grid.len() {
        let c = grid.center(i);
        if c.distance(emitters.r1).min(c.distance(emitters.r2)) <= radius + 1e-12 {
            grid.eps[i] = 1.0;
        }
    }

    let mut state = in_iteration(0, SolvedState::solve(grid, emitters, k, config, opts))?;
    let mut delta_eps = config.delta_eps;
    let mut entries = vec![entry(0, &state, 0, 0.0, delta_eps)];
    progress(&entries[0]);
    let mut reverted = 0;

    let stop = loop {
        let n = entries.len();
        if n > config.max_iterations {
            break StopReason::MaxIterations;
        }
        let sweep = sweep_once(&state, emitters, k, config, delta_eps, None);
        if sweep.accepted_count == 0 {
            break StopReason::NoAcceptance;
        }
        let next = in_iteration(n, SolvedState::solve(sweep.grid, emitters, k, config, opts))?;
        let mismatch = verify_convergence(&sweep.estimate, &next.tensors);
        if mismatch > config.eta_converge || next.eval.value < state.eval.value {
            reverted += 1;
            delta_eps /= 2.0;
            if delta_eps < config.delta_eps_min {
                break StopReason::DeltaEpsFloor;
            }
            continue;
        }
        let gain = next.eval.value - state.eval.value;
        entries.push(entry(n, &next, sweep.accepted_count, mismatch, delta_eps));
        progress(entries.last().expect("just pushed"));
        state = next;
        if gain < config.tol_accept {
            break StopReason::Stalled;
        }
    };

    Ok(DesignRecord {
        entries,
        rho: state.eval.rho,
        grid: state.grid,
        emitters: *emitters,
        config: *config,
        stop,
        reverted,
    })
}
