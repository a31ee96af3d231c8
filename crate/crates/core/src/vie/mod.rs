//! Volume-integral solver for the dressed Green's tensor of a voxelized
//! dielectric.

mod fft;
mod grid;
mod krylov;
mod operator;
mod solve;
mod sphere;

pub use fft::{fft_matvec, FftOperator, InteractionFft};
pub use grid::{PermittivityGrid, DEFAULT_EPS_MAX};
pub use krylov::{bicgstab, KrylovSolution};
pub use operator::{assemble_dense, direct_interaction, SelfTerm, DENSE_LIMIT};
pub use solve::{
    dense_residual, green_at, scattered_green_pair, solve_dyadic, solve_fields, solve_system, DyadicField,
    FieldMap, GreenPair, SolveMethod, SolverOptions,
};
pub use sphere::{sphere_polarizability, SpherePolarizability};
