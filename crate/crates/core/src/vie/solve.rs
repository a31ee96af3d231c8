use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft::FftOperator;
use super::krylov::bicgstab;
use super::operator::{assemble_dense, SelfTerm};
use super::PermittivityGrid;
use crate::em::{
    check_unit, free_space_green, free_space_self_green, Dyad33, Position, COINCIDENT_THRESHOLD,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Dense,
    #[default]
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolveMethod,
    /// Relative residual target of the Krylov path.
    pub tol: f64,
    pub max_iterations: usize,
    pub self_term: SelfTerm,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { method: SolveMethod::Iterative, tol: 1e-8, max_iterations: 2000, self_term: SelfTerm::EquivalentSphere }
    }
}

impl SolverOptions {
    pub fn dense() -> Self {
        Self { method: SolveMethod::Dense, ..Self::default() }
    }
}

/// Total field G(r_k, r_s)·p̂ in every voxel for one point source.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub source: Position,
    pub values: Vec<Vector3<Complex64>>,
}

/// Full tensor G(r_k, r_s) in every voxel for one source point.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicField {
    pub source: Position,
    pub values: Vec<Dyad33>,
}

impl DyadicField {
    /// Column G(r_k, r_s)·p̂.
    pub fn column(&self, p_hat: &Vector3<f64>) -> FieldMap {
        FieldMap { source: self.source, values: self.values.iter().map(|g| g.apply(p_hat)).collect() }
    }
}

fn incident(grid: &PermittivityGrid, source: Position, k: f64) -> Result<Vec<Dyad33>> {
    (0..grid.len()).map(|i| free_space_green(grid.center(i), source, k)).collect()
}

/// Solves A·x = b for each right-hand side with the configured method.
pub fn solve_system(
    grid: &PermittivityGrid,
    k: f64,
    rhs: &[Vec<Complex64>],
    opts: &SolverOptions,
) -> Result<Vec<Vec<Complex64>>> {
    grid.validate()?;
    if grid.is_vacuum() {
        return Ok(rhs.to_vec());
    }
    match opts.method {
        SolveMethod::Dense => {
            let a = assemble_dense(grid, k, opts.self_term)?;
            let lu = a.lu();
            rhs.iter()
                .map(|b| {
                    lu.solve(&DVector::from_column_slice(b))
                        .map(|x| x.as_slice().to_vec())
                        .ok_or_else(|| Error::InvalidGrid("singular Lippmann–Schwinger operator".into()))
                })
                .collect()
        }
        SolveMethod::Iterative => {
            let op = FftOperator::new(grid, k, opts.self_term);
            rhs.par_iter()
                .map(|b| bicgstab(|x| op.apply(x), b, opts.tol, opts.max_iterations).map(|s| s.x))
                .collect()
        }
    }
}

/// Field radiated by a unit dipole `p_hat` at `source`, everywhere in the grid.
pub fn solve_fields(
    grid: &PermittivityGrid,
    source: Position,
    p_hat: &Vector3<f64>,
    k: f64,
    opts: &SolverOptions,
) -> Result<FieldMap> {
    check_unit(p_hat)?;
    let inc = incident(grid, source, k)?;
    let b: Vec<Complex64> = inc.iter().flat_map(|g| g.apply(p_hat).iter().copied().collect::<Vec<_>>()).collect();
    let x = solve_system(grid, k, &[b], opts)?.pop().expect("one solution");
    Ok(FieldMap {
        source,
        values: x.chunks_exact(3).map(|c| Vector3::new(c[0], c[1], c[2])).collect(),
    })
}

/// All three Cartesian columns of G(r_k, r_s).
pub fn solve_dyadic(grid: &PermittivityGrid, source: Position, k: f64, opts: &SolverOptions) -> Result<DyadicField> {
    let inc = incident(grid, source, k)?;
    let rhs: Vec<Vec<Complex64>> =
        (0..3).map(|c| inc.iter().flat_map(|g| g.0.column(c).iter().copied().collect::<Vec<_>>()).collect()).collect();
    let cols = solve_system(grid, k, &rhs, opts)?;
    let values = (0..grid.len())
        .map(|i| Dyad33(Matrix3::from_fn(|r, c| cols[c][3 * i + r])))
        .collect();
    Ok(DyadicField { source, values })
}

/// Total Green's tensor G(r, r_s) = G₀(r, r_s) + k²·δV·Σ_k G₀(r, r_k)(ε_k−1)·G(r_k, r_s).
///
/// When `r` coincides with the source, the free part is the radiative self
/// tensor i·k/(6π)·I.
pub fn green_at(grid: &PermittivityGrid, k: f64, r: Position, field: &DyadicField) -> Result<Dyad33> {
    let mut g = if r.distance(field.source) < COINCIDENT_THRESHOLD {
        free_space_self_green(k)
    } else {
        free_space_green(r, field.source, k)?
    };
    let scale = k * k * grid.voxel_volume();
    for i in grid.active() {
        let g0 = free_space_green(r, grid.center(i), k)?;
        g += (g0 * field.values[i]).scale(Complex64::new(scale * (grid.eps[i] - 1.0), 0.0));
    }
    Ok(g)
}

/// Green's tensors between and at two emitters, plus the voxel fields of each.
#[derive(Debug, Clone)]
pub struct GreenPair {
    pub g11: Dyad33,
    pub g22: Dyad33,
    /// G(r₁, r₂)
    pub g12: Dyad33,
    /// G(r₂, r₁); equals g12ᵀ by reciprocity.
    pub g21: Dyad33,
    pub fields1: DyadicField,
    pub fields2: DyadicField,
}

impl GreenPair {
    pub fn field_maps(&self, p_hat: &Vector3<f64>) -> (FieldMap, FieldMap) {
        (self.fields1.column(p_hat), self.fields2.column(p_hat))
    }
}

/// Solves for both emitters and evaluates all Green's tensors between them.
pub fn scattered_green_pair(
    grid: &PermittivityGrid,
    r1: Position,
    r2: Position,
    k: f64,
    opts: &SolverOptions,
) -> Result<GreenPair> {
    if r1.distance(r2) < COINCIDENT_THRESHOLD {
        return Err(Error::CoincidentPoints { separation: r1.distance(r2) });
    }
    let (f1, f2) = rayon::join(|| solve_dyadic(grid, r1, k, opts), || solve_dyadic(grid, r2, k, opts));
    let (fields1, fields2) = (f1?, f2?);
    Ok(GreenPair {
        g11: green_at(grid, k, r1, &fields1)?,
        g22: green_at(grid, k, r2, &fields2)?,
        g12: green_at(grid, k, r1, &fields2)?,
        g21: green_at(grid, k, r2, &fields1)?,
        fields1,
        fields2,
    })
}

/// Residual ‖A·x − b‖/‖b‖ of a field map against the dense operator (oracle use).
pub fn dense_residual(grid: &PermittivityGrid, k: f64, field: &FieldMap, p_hat: &Vector3<f64>, opts: &SolverOptions) -> Result<f64> {
    let a: DMatrix<Complex64> = assemble_dense(grid, k, opts.self_term)?;
    let x = DVector::from_iterator(3 * grid.len(), field.values.iter().flat_map(|v| v.iter().copied()));
    let b = DVector::from_iterator(
        3 * grid.len(),
        incident(grid, field.source, k)?.iter().flat_map(|g| g.apply(p_hat).iter().copied().collect::<Vec<_>>()),
    );
    Ok((a * x - &b).norm() / b.norm())
}
