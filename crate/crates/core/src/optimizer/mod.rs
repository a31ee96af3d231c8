//! Greedy voxel-by-voxel design loop driven by first-Born Green's-tensor updates.
//!
//! Each iteration solves the current structure once per emitter, scores a
//! ±δε change of every free voxel from the Born increment alone, keeps the
//! improving ones, then re-solves and compares the accumulated estimate with
//! the exact tensors. A sweep whose estimate drifts beyond `eta_converge`, or
//! whose re-solved target drops, is undone and retried with half the step.

mod born;
mod config;
mod design;
mod sweep;

pub use born::born_delta_green;
pub use config::{DesignConfig, Emitters, SweepMode, Symmetry, Target};
pub use design::{optimize, optimize_with_progress, verify_convergence, DesignRecord, IterationEntry, StopReason};
pub use sweep::{
    candidate_orbits, evaluate_candidate, evaluate_tensors, sweep_once, AcceptedMove, EmitterTensors, Evaluation,
    SolvedState, SweepOutcome,
};
