use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::born::born_delta_green;
use super::config::{DesignConfig, Emitters, SweepMode, Target};
use crate::em::{couplings_from_green, CouplingSet, Dyad33};
use crate::error::Result;
use crate::quantum::{concurrence, negativity, steady_state, DensityMatrix4, MasterEqParams};
use crate::vie::{scattered_green_pair, DyadicField, PermittivityGrid, SolverOptions};

/// Green's tensors that fix the emitter couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterTensors {
    pub g11: Dyad33,
    pub g22: Dyad33,
    /// G(r₁, r₂)
    pub g12: Dyad33,
}

impl EmitterTensors {
    pub fn add(&self, d: &EmitterTensors) -> EmitterTensors {
        EmitterTensors { g11: self.g11 + d.g11, g22: self.g22 + d.g22, g12: self.g12 + d.g12 }
    }

    fn zeros() -> Self {
        Self { g11: Dyad33::zeros(), g22: Dyad33::zeros(), g12: Dyad33::zeros() }
    }

    /// Largest relative Frobenius difference over the three tensors.
    pub fn relative_mismatch(&self, reference: &EmitterTensors) -> f64 {
        [(self.g11, reference.g11), (self.g22, reference.g22), (self.g12, reference.g12)]
            .iter()
            .map(|(a, b)| (*a - *b).frobenius_norm() / b.frobenius_norm())
            .fold(0.0, f64::max)
    }
}

/// Target value of a set of tensors, with the physics behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub concurrence: f64,
    pub negativity: f64,
    pub couplings: CouplingSet,
    pub params: MasterEqParams,
    pub rho: DensityMatrix4,
}

/// Couplings → normalized master equation → steady state → witness.
pub fn evaluate_tensors(t: &EmitterTensors, emitters: &Emitters, k: f64, config: &DesignConfig) -> Result<Evaluation> {
    let couplings = couplings_from_green(&t.g11, &t.g22, &t.g12, &emitters.p_hat, k)?;
    let params = MasterEqParams::from_couplings(&couplings, config.pump_ratio)?;
    let rho = steady_state(&params)?;
    let c = concurrence(&rho);
    let n = negativity(&rho);
    let value = match config.target {
        Target::Concurrence => c,
        Target::Negativity => n,
    };
    Ok(Evaluation { value, concurrence: c, negativity: n, couplings, params, rho })
}

/// A fully solved design: grid, emitter tensors, voxel fields, and score.
#[derive(Debug, Clone)]
pub struct SolvedState {
    pub grid: PermittivityGrid,
    pub tensors: EmitterTensors,
    /// G(r_k, r₁) for every voxel.
    pub fields1: DyadicField,
    /// G(r_k, r₂) for every voxel.
    pub fields2: DyadicField,
    pub eval: Evaluation,
}

impl SolvedState {
    pub fn solve(
        grid: PermittivityGrid,
        emitters: &Emitters,
        k: f64,
        config: &DesignConfig,
        opts: &SolverOptions,
    ) -> Result<Self> {
        let pair = scattered_green_pair(&grid, emitters.r1, emitters.r2, k, opts)?;
        let tensors = EmitterTensors { g11: pair.g11, g22: pair.g22, g12: pair.g12 };
        let eval = evaluate_tensors(&tensors, emitters, k, config)?;
        Ok(Self { grid, tensors, fields1: pair.fields1, fields2: pair.fields2, eval })
    }

    /// Σ over `voxels` of the first-Born increments of all three tensors.
    pub fn born_increment(&self, voxels: &[usize], delta_eps: f64, k: f64) -> EmitterTensors {
        let dv = self.grid.voxel_volume();
        let mut d = EmitterTensors::zeros();
        for &m in voxels {
            let x1 = &self.fields1.values[m];
            let x2 = &self.fields2.values[m];
            d.g11 += born_delta_green(&x1.transpose(), x1, delta_eps, dv, k);
            d.g22 += born_delta_green(&x2.transpose(), x2, delta_eps, dv, k);
            d.g12 += born_delta_green(&x1.transpose(), x2, delta_eps, dv, k);
        }
        d
    }
}

/// Scores changing `voxels` by `delta_eps` on top of `current` tensors.
///
/// Fails when the perturbed couplings leave the physical manifold or the
/// steady state degenerates; callers treat that as a rejected candidate.
pub fn evaluate_candidate(
    state: &SolvedState,
    current: &EmitterTensors,
    voxels: &[usize],
    delta_eps: f64,
    emitters: &Emitters,
    k: f64,
    config: &DesignConfig,
) -> Result<(Evaluation, EmitterTensors)> {
    let delta = state.born_increment(voxels, delta_eps, k);
    let trial = current.add(&delta);
    Ok((evaluate_tensors(&trial, emitters, k, config)?, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptedMove {
    /// Smallest voxel index of the orbit.
    pub voxel: usize,
    pub increase: bool,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub grid: PermittivityGrid,
    /// G_n + Σ accepted δG.
    pub estimate: EmitterTensors,
    /// Target value predicted from `estimate`.
    pub predicted: f64,
    pub moves: Vec<AcceptedMove>,
    /// Voxels whose permittivity changed.
    pub accepted_count: usize,
}

/// Orbit representatives in visiting order: lexicographic, or `order` if given.
pub fn candidate_orbits(grid: &PermittivityGrid, config: &DesignConfig, order: Option<&[usize]>) -> Vec<Vec<usize>> {
    let lexicographic: Vec<usize> = (0..grid.len()).collect();
    let order = order.unwrap_or(&lexicographic);
    let mut seen = vec![false; grid.len()];
    let mut out = Vec::new();
    for &i in order {
        if seen[i] {
            continue;
        }
        let orbit = config.symmetry.orbit(grid, i);
        for &j in &orbit {
            seen[j] = true;
        }
        if orbit.iter().any(|&j| grid.frozen[j]) {
            continue;
        }
        out.push(orbit);
    }
    out
}

const BOUND_SLACK: f64 = 1e-12;

fn can_step(grid: &PermittivityGrid, orbit: &[usize], step: f64) -> bool {
    orbit.iter().all(|&j| {
        let e = grid.eps[j] + step;
        e >= 1.0 - BOUND_SLACK && e <= grid.eps_max + BOUND_SLACK
    })
}

fn apply_step(grid: &mut PermittivityGrid, orbit: &[usize], step: f64) {
    for &j in orbit {
        grid.eps[j] = (grid.eps[j] + step).clamp(1.0, grid.eps_max);
    }
}

fn steps(config: &DesignConfig, delta_eps: f64) -> Vec<f64> {
    if config.bidirectional {
        vec![delta_eps, -delta_eps]
    } else {
        vec![delta_eps]
    }
}

/// Best admissible step for one orbit against `current`, if it beats `baseline`.
#[allow(clippy::too_many_arguments)]
fn best_step(
    state: &SolvedState,
    current: &EmitterTensors,
    grid: &PermittivityGrid,
    orbit: &[usize],
    delta_eps: f64,
    baseline: f64,
    emitters: &Emitters,
    k: f64,
    config: &DesignConfig,
) -> Option<(f64, f64, EmitterTensors)> {
    let mut best: Option<(f64, f64, EmitterTensors)> = None;
    for step in steps(config, delta_eps) {
        if !can_step(grid, orbit, step) {
            continue;
        }
        let Ok((eval, delta)) = evaluate_candidate(state, current, orbit, step, emitters, k, config) else {
            continue;
        };
        // Strict: a gain of exactly tol_accept is rejected.
        if eval.value - baseline > config.tol_accept && best.as_ref().is_none_or(|b| eval.value > b.1) {
            best = Some((step, eval.value, delta));
        }
    }
    best
}

/// One pass over every non-frozen orbit.
pub fn sweep_once(
    state: &SolvedState,
    emitters: &Emitters,
    k: f64,
    config: &DesignConfig,
    delta_eps: f64,
    order: Option<&[usize]>,
) -> SweepOutcome {
    let orbits = candidate_orbits(&state.grid, config, order);
    let mut grid = state.grid.clone();
    let mut estimate = state.tensors;
    let mut predicted = state.eval.value;
    let mut moves = Vec::new();
    let mut accepted_count = 0;
    match config.sweep_mode {
        SweepMode::Sequential => {
            for orbit in &orbits {
                if let Some((step, value, delta)) =
                    best_step(state, &estimate, &grid, orbit, delta_eps, predicted, emitters, k, config)
                {
                    apply_step(&mut grid, orbit, step);
                    estimate = estimate.add(&delta);
                    predicted = value;
                    moves.push(AcceptedMove { voxel: orbit[0], increase: step > 0.0 });
                    accepted_count += orbit.len();
                }
            }
        }
        SweepMode::FrozenReference => {
            let base = state.eval.value;
            let mut accepted: Vec<(&Vec<usize>, f64, EmitterTensors)> = orbits
                .par_iter()
                .filter_map(|orbit| {
                    best_step(state, &state.tensors, &state.grid, orbit, delta_eps, base, emitters, k, config)
                        .map(|(step, _, delta)| (orbit, step, delta))
                })
                .collect();
            // Sum in index order so the result is independent of visiting order.
            accepted.sort_by_key(|(orbit, _, _)| orbit[0]);
            for (orbit, step, delta) in accepted {
                apply_step(&mut grid, orbit, step);
                estimate = estimate.add(&delta);
                moves.push(AcceptedMove { voxel: orbit[0], increase: step > 0.0 });
                accepted_count += orbit.len();
            }
            if accepted_count > 0 {
                predicted = evaluate_tensors(&estimate, emitters, k, config).map(|e| e.value).unwrap_or(f64::NAN);
            }
        }
    }
    SweepOutcome { grid, estimate, predicted, moves, accepted_count }
}
