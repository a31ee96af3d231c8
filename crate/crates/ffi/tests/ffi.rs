use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use entcloak_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe {
        ec_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn free_space_couplings_match_closed_form() {
    let (mut gamma12, mut g12) = (0.0, 0.0);
    assert_eq!(unsafe { ec_free_space_couplings(0.5, &mut gamma12, &mut g12) }, EcStatus::Ok);
    assert!((gamma12 - 0.303_963_550_927_013_3).abs() < 1e-12);
    assert!((g12 + 0.048_377_301_649_799_23).abs() < 1e-12);
    assert_eq!(unsafe { ec_free_space_couplings(0.0, &mut gamma12, &mut g12) }, EcStatus::InvalidArgument);
    assert!(last_error().contains("coincide"));
    assert_eq!(unsafe { ec_free_space_couplings(0.5, ptr::null_mut(), &mut g12) }, EcStatus::NullPointer);
}

#[test]
fn steady_state_status_codes() {
    let (mut c, mut n) = (0.0, 0.0);
    assert_eq!(unsafe { ec_steady_state_entanglement(1.0, 1.0, 0.0, 0.0, 0.1, &mut c, &mut n) }, EcStatus::Ok);
    assert_eq!((c, n), (0.0, 0.0));
    let s = unsafe { ec_steady_state_entanglement(1.0, 1.0, 1.5, 0.0, 0.1, &mut c, &mut n) };
    assert_eq!(s, EcStatus::InvalidArgument);
    // Ideal dissipative coupling with no pump leaves a dark subspace.
    let s = unsafe { ec_steady_state_entanglement(1.0, 1.0, 1.0, 0.0, 0.0, &mut c, &mut n) };
    assert_eq!(s, EcStatus::DegenerateSteadyState, "{}", last_error());
}

#[test]
fn grid_handles_round_trip_and_reject_bad_input() {
    let mut grid = ptr::null_mut();
    assert_eq!(unsafe { ec_grid_new(2, 3, 4, 0.05, 9.0, &mut grid) }, EcStatus::Ok);
    assert_eq!(unsafe { ec_grid_len(grid) }, 24);
    let eps: Vec<f64> = (0..24).map(|i| 1.0 + i as f64 / 4.0).collect();
    assert_eq!(unsafe { ec_grid_set_eps(grid, eps.as_ptr(), eps.len()) }, EcStatus::Ok);
    let mut back = vec![0.0; 24];
    assert_eq!(unsafe { ec_grid_get_eps(grid, back.as_mut_ptr(), back.len()) }, EcStatus::Ok);
    assert_eq!(back, eps);
    let too_big = [10.0; 24];
    assert_eq!(unsafe { ec_grid_set_eps(grid, too_big.as_ptr(), 24) }, EcStatus::InvalidArgument);
    assert_eq!(unsafe { ec_grid_get_eps(grid, back.as_mut_ptr(), 5) }, EcStatus::InvalidArgument);
    assert_eq!(unsafe { ec_grid_get_eps(grid, back.as_mut_ptr(), 24) }, EcStatus::Ok);
    assert_eq!(back, eps, "failed write left the grid untouched");
    unsafe { ec_grid_free(grid) };
    assert_eq!(unsafe { ec_grid_new(0, 3, 4, 0.05, 9.0, &mut grid) }, EcStatus::InvalidArgument);
    assert_eq!(unsafe { ec_grid_len(ptr::null()) }, 0);
}

#[test]
fn optimize_through_handles() {
    let mut grid = ptr::null_mut();
    assert_eq!(unsafe { ec_grid_new(4, 4, 4, 0.0625, 9.0, &mut grid) }, EcStatus::Ok);
    let mut opts = ec_design_options_default();
    opts.delta_eps = 0.2;
    opts.max_iterations = 3;
    let mut design = ptr::null_mut();
    assert_eq!(unsafe { ec_optimize(grid, &opts, &mut design) }, EcStatus::Ok, "{}", last_error());
    let len = unsafe { ec_design_trace_len(design) };
    let mut trace = vec![0.0; len];
    assert_eq!(unsafe { ec_design_trace(design, trace.as_mut_ptr(), len) }, EcStatus::Ok);
    assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    let (mut c, mut n) = (0.0, 0.0);
    assert_eq!(unsafe { ec_design_result(design, &mut c, &mut n) }, EcStatus::Ok);
    assert_eq!(c, trace[len - 1]);
    let mut out_grid = ptr::null_mut();
    assert_eq!(unsafe { ec_design_grid(design, &mut out_grid) }, EcStatus::Ok);
    let mut eps = vec![0.0; 64];
    assert_eq!(unsafe { ec_grid_get_eps(out_grid, eps.as_mut_ptr(), 64) }, EcStatus::Ok);
    assert!(eps.iter().any(|&e| e > 1.0));
    let mut input = vec![0.0; 64];
    assert_eq!(unsafe { ec_grid_get_eps(grid, input.as_mut_ptr(), 64) }, EcStatus::Ok);
    assert!(input.iter().all(|&e| e == 1.0));

    opts.target = 7;
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { ec_optimize(grid, &opts, &mut bad) }, EcStatus::InvalidArgument);
    assert!(bad.is_null());
    unsafe {
        ec_design_free(design);
        ec_grid_free(out_grid);
        ec_grid_free(grid);
    }
}

#[test]
fn header_is_generated_and_usable_from_c() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/entcloak.h")).unwrap();
    for sym in ["ec_optimize", "ec_grid_new", "ec_last_error", "EC_STATUS_DEGENERATE_STEADY_STATE", "typedef struct EcGrid EcGrid"] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
    // `cargo test` does not refresh the staticlib, so build it in a private target dir.
    let target = root.join("../../target/ffi-smoke");
    let built = Command::new(env!("CARGO"))
        .args(["build", "-p", "entcloak-ffi", "--lib", "--target-dir"])
        .arg(&target)
        .status()
        .unwrap();
    assert!(built.success());
    let lib = target.join("debug/libentcloak_ffi.a");
    let exe = target.join("entcloak_ffi_smoke");
    let status = Command::new("cc")
        .arg(root.join("tests/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
