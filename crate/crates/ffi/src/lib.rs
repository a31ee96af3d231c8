//! C ABI over the `entcloak` design engine.
//!
//! Every function returns an [`EcStatus`]. On failure a message is kept per
//! thread and can be copied out with [`ec_last_error`]. Grids and design
//! records are opaque handles owned by the caller and released with the
//! matching `*_free` function. Lengths are in units of the free-space
//! wavelength and rates in units of the isolated-emitter decay rate.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::Vector3;

use entcloak::em::{couplings_from_green, free_space_green, free_space_self_green, Position};
use entcloak::optimizer::{optimize, DesignConfig, DesignRecord, Emitters, SweepMode, Symmetry, Target};
use entcloak::quantum::{concurrence, negativity, steady_state, MasterEqParams};
use entcloak::vie::{PermittivityGrid, SolverOptions};
use entcloak::Error;

const K: f64 = 2.0 * std::f64::consts::PI;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SolverFailure = 3,
    DegenerateSteadyState = 4,
    Panic = 5,
}

/// Voxel permittivity map.
pub struct EcGrid(PermittivityGrid);

/// Result of a design run.
pub struct EcDesign(DesignRecord);

/// Optimizer settings. Obtain defaults from [`ec_design_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EcDesignOptions {
    /// Emitter separation; emitters sit at z = ∓d12/2 with z-oriented dipoles.
    pub d12: f64,
    pub delta_eps: f64,
    pub delta_eps_min: f64,
    pub eps_max: f64,
    pub tol_accept: f64,
    pub eta_converge: f64,
    pub max_iterations: usize,
    /// 0 sequential, 1 frozen reference.
    pub sweep_mode: u32,
    /// 0 concurrence, 1 negativity.
    pub target: u32,
    pub pump_ratio: f64,
    /// In voxel spacings.
    pub exclusion_radius: f64,
    pub bidirectional: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> EcStatus {
    match e.root() {
        Error::MultipleSteadyStates { .. } => EcStatus::DegenerateSteadyState,
        Error::NotConverged { .. } | Error::PropagationNotConverged { .. } => EcStatus::SolverFailure,
        _ => EcStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), EcStatus>) -> EcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            EcStatus::Panic
        }
    }
}

fn check<T>(r: entcloak::Result<T>) -> Result<T, EcStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T) -> Result<(), EcStatus> {
    if p.is_null() {
        set_error("null pointer argument".into());
        return Err(EcStatus::NullPointer);
    }
    Ok(())
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len` bytes. Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ec_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Dissipative and coherent couplings γ12/γ0 and g12/γ0 of two z-oriented
/// dipoles a distance `d12` apart in vacuum.
///
/// # Safety
/// `gamma12` and `g12` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_free_space_couplings(d12: f64, gamma12: *mut f64, g12: *mut f64) -> EcStatus {
    guard(|| {
        non_null(gamma12)?;
        non_null(g12)?;
        let g = check(free_space_green(Position::on_axis(0.0), Position::on_axis(d12), K))?;
        let s = free_space_self_green(K);
        let c = check(couplings_from_green(&s, &s, &g, &Vector3::z(), K))?;
        *gamma12 = c.gamma12;
        *g12 = c.g12;
        Ok(())
    })
}

/// Steady-state concurrence and negativity of the pumped two-emitter system.
///
/// # Safety
/// `concurrence_out` and `negativity_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_steady_state_entanglement(
    gamma11: f64,
    gamma22: f64,
    gamma12: f64,
    g12: f64,
    pump: f64,
    concurrence_out: *mut f64,
    negativity_out: *mut f64,
) -> EcStatus {
    guard(|| {
        non_null(concurrence_out)?;
        non_null(negativity_out)?;
        let p = check(MasterEqParams::new(gamma11, gamma22, gamma12, g12, pump))?;
        let rho = check(steady_state(&p))?;
        *concurrence_out = concurrence(&rho);
        *negativity_out = negativity(&rho);
        Ok(())
    })
}

/// Vacuum grid of `nx·ny·nz` voxels centred on the origin.
///
/// # Safety
/// `out` must be valid for writes; the handle is released with [`ec_grid_free`].
#[no_mangle]
pub unsafe extern "C" fn ec_grid_new(
    nx: usize,
    ny: usize,
    nz: usize,
    spacing: f64,
    eps_max: f64,
    out: *mut *mut EcGrid,
) -> EcStatus {
    guard(|| {
        non_null(out)?;
        let g = check(PermittivityGrid::centered([nx, ny, nz], spacing, eps_max))?;
        *out = Box::into_raw(Box::new(EcGrid(g)));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ec_grid_free(grid: *mut EcGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of voxels, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ec_grid_len(grid: *const EcGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Copies the permittivities (voxel index `(ix·ny + iy)·nz + iz`) into `eps`.
///
/// # Safety
/// `grid` must be live and `eps` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ec_grid_get_eps(grid: *const EcGrid, eps: *mut f64, len: usize) -> EcStatus {
    guard(|| {
        non_null(grid)?;
        non_null(eps)?;
        let g = &(*grid).0;
        if len != g.len() {
            set_error(format!("buffer holds {len} values, grid has {}", g.len()));
            return Err(EcStatus::InvalidArgument);
        }
        ptr::copy_nonoverlapping(g.eps.as_ptr(), eps, len);
        Ok(())
    })
}

/// Replaces the permittivities; each value must lie in [1, eps_max].
///
/// # Safety
/// `grid` must be live and `eps` valid for `len` reads.
#[no_mangle]
pub unsafe extern "C" fn ec_grid_set_eps(grid: *mut EcGrid, eps: *const f64, len: usize) -> EcStatus {
    guard(|| {
        non_null(grid)?;
        non_null(eps)?;
        let g = &mut (*grid).0;
        if len != g.len() {
            set_error(format!("buffer holds {len} values, grid has {}", g.len()));
            return Err(EcStatus::InvalidArgument);
        }
        let mut next = g.clone();
        next.eps.copy_from_slice(std::slice::from_raw_parts(eps, len));
        check(next.validate())?;
        *g = next;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ec_design_options_default() -> EcDesignOptions {
    let d = DesignConfig::default();
    EcDesignOptions {
        d12: 0.25,
        delta_eps: d.delta_eps,
        delta_eps_min: d.delta_eps_min,
        eps_max: d.eps_max,
        tol_accept: d.tol_accept,
        eta_converge: d.eta_converge,
        max_iterations: d.max_iterations,
        sweep_mode: 0,
        target: 0,
        pump_ratio: d.pump_ratio,
        exclusion_radius: d.exclusion_radius,
        bidirectional: d.bidirectional,
    }
}

fn design_config(o: &EcDesignOptions) -> Result<DesignConfig, EcStatus> {
    let bad = |msg: &str| {
        set_error(msg.into());
        EcStatus::InvalidArgument
    };
    let sweep_mode = match o.sweep_mode {
        0 => SweepMode::Sequential,
        1 => SweepMode::FrozenReference,
        _ => return Err(bad("sweep_mode must be 0 or 1")),
    };
    let target = match o.target {
        0 => Target::Concurrence,
        1 => Target::Negativity,
        _ => return Err(bad("target must be 0 or 1")),
    };
    Ok(DesignConfig {
        delta_eps: o.delta_eps,
        delta_eps_min: o.delta_eps_min,
        eps_max: o.eps_max,
        tol_accept: o.tol_accept,
        eta_converge: o.eta_converge,
        max_iterations: o.max_iterations,
        sweep_mode,
        bidirectional: o.bidirectional,
        exclusion_radius: o.exclusion_radius,
        symmetry: Symmetry::None,
        target,
        pump_ratio: o.pump_ratio,
    })
}

/// Runs the greedy design loop starting from `grid`, which is not modified.
///
/// # Safety
/// `grid` and `options` must be live, `out` valid for writes; the result is
/// released with [`ec_design_free`].
#[no_mangle]
pub unsafe extern "C" fn ec_optimize(
    grid: *const EcGrid,
    options: *const EcDesignOptions,
    out: *mut *mut EcDesign,
) -> EcStatus {
    guard(|| {
        non_null(grid)?;
        non_null(options)?;
        non_null(out)?;
        let o = &*options;
        let cfg = design_config(o)?;
        let record = check(optimize((*grid).0.clone(), &Emitters::on_axis(o.d12), K, &cfg, &SolverOptions::default()))?;
        *out = Box::into_raw(Box::new(EcDesign(record)));
        Ok(())
    })
}

/// # Safety
/// `design` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ec_design_free(design: *mut EcDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// Trace length: completed iterations plus the initial state, or 0 for null.
///
/// # Safety
/// `design` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ec_design_trace_len(design: *const EcDesign) -> usize {
    design.as_ref().map_or(0, |d| d.0.entries.len())
}

/// Copies the target value of every trace entry into `values`.
///
/// # Safety
/// `design` must be live and `values` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ec_design_trace(design: *const EcDesign, values: *mut f64, len: usize) -> EcStatus {
    guard(|| {
        non_null(design)?;
        non_null(values)?;
        let entries = &(*design).0.entries;
        if len != entries.len() {
            set_error(format!("buffer holds {len} values, trace has {}", entries.len()));
            return Err(EcStatus::InvalidArgument);
        }
        for (i, e) in entries.iter().enumerate() {
            *values.add(i) = e.target_value;
        }
        Ok(())
    })
}

/// Final concurrence and negativity of the designed device.
///
/// # Safety
/// `design` must be live; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_design_result(
    design: *const EcDesign,
    concurrence_out: *mut f64,
    negativity_out: *mut f64,
) -> EcStatus {
    guard(|| {
        non_null(design)?;
        non_null(concurrence_out)?;
        non_null(negativity_out)?;
        let last = (*design).0.final_entry();
        *concurrence_out = last.concurrence;
        *negativity_out = last.negativity;
        Ok(())
    })
}

/// Copy of the final permittivity map as a new grid handle.
///
/// # Safety
/// `design` must be live and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_design_grid(design: *const EcDesign, out: *mut *mut EcGrid) -> EcStatus {
    guard(|| {
        non_null(design)?;
        non_null(out)?;
        *out = Box::into_raw(Box::new(EcGrid((*design).0.grid.clone())));
        Ok(())
    })
}
