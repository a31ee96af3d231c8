//! Two-emitter incoherently pumped master equation and entanglement witnesses.
//!
//! Basis ordering is {|g₁g₂⟩, |e₁g₂⟩, |g₁e₂⟩, |e₁e₂⟩}, i.e. index = e₁ + 2·e₂.
//! Density matrices are vectorized column-major, so `vec(ρ)[a + 4b] = ρ[a][b]`.

mod density;
mod liouvillian;
mod mems;
mod propagate;
pub mod random;
mod witness;

pub use density::DensityMatrix4;
pub use liouvillian::{
    apply_generator, build_liouvillian, steady_state, vectorize, unvectorize, Liouvillian,
    MasterEqParams,
};
pub use mems::{mems_concurrence_at_entropy, mems_curve, mems_distance};
pub use propagate::propagate_to_steady;
pub use witness::{
    concurrence, concurrence_checked, concurrence_wootters, linear_entropy, negativity,
    negativity_checked, negativity_partial_transpose, WitnessValue,
};
