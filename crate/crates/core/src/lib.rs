//! Inverse design of voxelized dielectric environments that maximize the
//! steady-state entanglement of two incoherently pumped quantum emitters.
//!
//! The pipeline couples three pieces:
//!
//! * [`em`]: free-space dyadic Green's tensor and coupling-rate conversion,
//! * [`vie`]: a coupled-dipole volume-integral solver giving the Green's tensor
//!   of an arbitrary voxel permittivity map (dense LU or FFT-accelerated BiCGSTAB),
//! * [`quantum`]: the two-emitter Lindblad steady state and entanglement witnesses,
//!
//! driven by the greedy first-Born update loop in [`optimizer`]. The [`cli`]
//! module holds the batch driver and file formats behind the `entcloak` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod em;
pub mod error;
pub mod quantum;
pub mod optimizer;
pub mod vie;

pub use error::{Error, Result};
