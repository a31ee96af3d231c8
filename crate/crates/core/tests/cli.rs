use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entcloak::cli::config::RunConfig;
use entcloak::cli::io;
use entcloak::quantum::{concurrence, steady_state, MasterEqParams};

const BIN: &str = env!("CARGO_BIN_EXE_entcloak");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, cmd: &str, config: Option<&str>, extra: &[&str]) -> (Output, PathBuf) {
    let out = dir.join(format!("out-{cmd}"));
    let mut args = vec![cmd.to_string(), "--out".into(), out.display().to_string()];
    if let Some(text) = config {
        let path = dir.join(format!("{cmd}.cfg"));
        fs::write(&path, text).unwrap();
        args.extend(["--config".into(), path.display().to_string()]);
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    (run(&refs), out)
}

const TOY: &str = "\
# toy design on a 4x4x4 region
grid_dims = 4,4,4
grid_spacing = 0.0625
d12 = 0.25
delta_eps = 0.2
max_iterations = 4
";

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for bad in ["grid_dims = 4,4\n", "delta_eps = -1\n", "not_a_key = 3\n", "d12 = 0.25\nd12 = 0.5\n", "garbage line\n"] {
        for cmd in ["optimize", "sweep", "freespace", "validate"] {
            let (o, out) = run_in(dir.path(), cmd, Some(bad), &[]);
            assert_eq!(o.status.code(), Some(2), "{cmd} with {bad:?}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(!out.exists(), "{cmd} left outputs for {bad:?}");
        }
    }
    let (o, out) = run_in(dir.path(), "optimize", None, &["--config", "/nonexistent/entcloak.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn mems_file_has_201_rows_and_exact_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run_in(dir.path(), "mems", None, &[]);
    assert!(o.status.success());
    let rows = io::read_mems(&out.join(io::MEMS_FILE)).unwrap();
    assert_eq!(rows.len(), 201);
    assert_eq!((rows[0].r, rows[0].C), (0.0, 0.0));
    assert!((rows[0].S_L - 8.0 / 9.0).abs() < 1e-15);
    assert_eq!((rows[200].r, rows[200].C, rows[200].S_L), (1.0, 1.0, 0.0));
}

#[test]
fn freespace_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "freespace_d12 = 0.05, 0.5, 0.1, 0.7, 1.3, 2, 4.5\nfreespace_pump_ratio = 5e-3, 1e-2\n";
    let (o, out) = run_in(dir.path(), "freespace", Some(cfg), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = io::read_freespace(&out.join(io::FREESPACE_FILE)).unwrap();
    assert_eq!(header[3..], [io::c0_column(5e-3), io::c0_column(1e-2)]);
    assert_eq!(rows.len(), 7);
    let near = &rows[0];
    // 3(sin x − x cos x)/x³ at x = 0.1π, evaluated independently.
    assert!((near.gamma12_over_gamma0 - 0.990_165_121_047_311).abs() < 1e-12, "{near:?}");
    let half = &rows[1];
    assert!((half.gamma12_over_gamma0 - 0.30396).abs() < 5e-6, "{half:?}");
    assert!((half.g12_over_gamma0 + 0.04838).abs() < 5e-6, "{half:?}");
    for r in &rows {
        let x = 2.0 * std::f64::consts::PI * r.d12_over_lambda;
        let g = 3.0 * (x.sin() - x * x.cos()) / x.powi(3);
        assert!((r.gamma12_over_gamma0 - g).abs() <= 1e-10 * g.abs());
        assert_eq!(r.c0.len(), 2);
    }
}

#[test]
fn optimize_toy_run_is_monotone_reproducible_and_schema_valid() {
    let dir = tempfile::tempdir().unwrap();
    let (a, out_a) = run_in(dir.path(), "optimize", Some(TOY), &["--threads", "1"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let trace = io::read_trace(&out_a.join(io::TRACE_FILE)).unwrap();
    assert!(trace.len() > 1);
    assert!(trace.windows(2).all(|w| w[1].target_value >= w[0].target_value));
    assert!(trace.iter().all(|r| r.eq3_mismatch <= 1e-2));
    assert!(trace.last().unwrap().target_value > trace[0].target_value);

    let again = dir.path().join("again");
    let b = run(&["optimize", "--config", dir.path().join("optimize.cfg").to_str().unwrap(), "--out", again.to_str().unwrap(), "--threads", "3"]);
    assert!(b.status.success());
    for f in [io::EPS_FILE, io::META_FILE, io::TRACE_FILE] {
        assert_eq!(fs::read(out_a.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f} differs");
    }

    let meta: serde_json::Value = serde_json::from_slice(&fs::read(out_a.join(io::META_FILE)).unwrap()).unwrap();
    let schema: serde_json::Value = serde_json::from_str(io::META_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    assert!(validator.is_valid(&meta), "{meta}");
    let shipped: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/design.meta.schema.json")).unwrap())
            .unwrap();
    assert_eq!(shipped, schema);
    let mut broken = meta.clone();
    broken["dims"] = serde_json::json!([4, 4]);
    assert!(!validator.is_valid(&broken));

    let (grid, m) = io::read_design(&out_a.join(io::EPS_FILE), &out_a.join(io::META_FILE)).unwrap();
    assert_eq!(grid.dims, [4, 4, 4]);
    assert_eq!(m.emitter_positions, [[0.0, 0.0, -0.125], [0.0, 0.0, 0.125]]);
    assert!(grid.eps.iter().any(|&e| e > 1.0));
}

#[test]
fn all_frozen_region_gives_single_row_at_free_space_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{TOY}exclusion_radius = 100\n");
    let (o, out) = run_in(dir.path(), "optimize", Some(&cfg), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = io::read_trace(&out.join(io::TRACE_FILE)).unwrap();
    assert_eq!(trace.len(), 1);
    let (c0, _, _) = entcloak::cli::free_space_reference(0.25, 5e-3).unwrap();
    assert!((trace[0].target_value - c0).abs() < 1e-12);
    let (grid, _) = io::read_design(&out.join(io::EPS_FILE), &out.join(io::META_FILE)).unwrap();
    assert!(grid.eps.iter().all(|&e| e == 1.0));
}

#[test]
fn sweep_never_worsens_and_reference_column_matches_direct_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "grid_dims = 4,4,4\ngrid_spacing = 0.0625\ndelta_eps = 0.2\nmax_iterations = 2\n\
               sweep_d12 = 0.125, 0.25, 0.5\nsweep_pump_ratio = 1e-3, 5e-3, 2.5e-2\n";
    let (o, out) = run_in(dir.path(), "sweep", Some(cfg), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = io::read_sweep(&out.join(io::SWEEP_FILE)).unwrap();
    assert_eq!(rows.len(), 9);
    assert!(io::read_failures(&out.join(io::FAILURES_FILE)).unwrap().is_empty());
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.d12_over_lambda, [0.125, 0.25, 0.5][i / 3]);
        assert_eq!(r.P_over_gamma, [1e-3, 5e-3, 2.5e-2][i % 3]);
        assert!(r.C >= r.C0 - 1e-9, "{r:?}");
        assert_eq!(r.C_minus_C0, r.C - r.C0);
        // Closed-form aligned-dipole couplings fed straight to the steady state.
        let x = 2.0 * std::f64::consts::PI * r.d12_over_lambda;
        let (s, c) = x.sin_cos();
        let gamma12 = 3.0 * (s - x * c) / x.powi(3);
        let g12 = 1.5 * (c + x * s) / x.powi(3);
        let rho = steady_state(&MasterEqParams::new(1.0, 1.0, gamma12, g12, r.P_over_gamma).unwrap()).unwrap();
        assert!((r.C0 - concurrence(&rho)).abs() < 1e-12, "{r:?}");
    }
    let text = fs::read_to_string(out.join(io::SWEEP_FILE)).unwrap();
    assert!(text.starts_with(
        "d12_over_lambda,P_over_gamma,C,C0,C_minus_C0,gamma12_over_gamma,g12_over_gamma,purcell,S_L,S_L0,N,N0\n"
    ));
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run_in(dir.path(), "validate", None, &["--seed", "7"]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{table}");
    assert!(table.contains("0 failed"));

    let (o, _) = run_in(dir.path(), "validate", Some("self_term = fixed:0,0\n"), &[]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(1), "{table}");
    let failing: Vec<&str> = table.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(failing.iter().any(|l| l.contains("vie/rayleigh-sphere")), "{table}");
}

#[test]
fn default_config_parses_and_validates() {
    let cfg = RunConfig::parse("").unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.freespace_d12.len(), 100);
}

#[test]
fn readme_config_example_parses() {
    let readme = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../README.md")).unwrap();
    let block = readme.split("```ini\n").nth(1).and_then(|s| s.split("```").next()).expect("ini block");
    let cfg = RunConfig::parse(block).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.design.delta_eps, 0.2);
    assert_eq!(cfg.freespace_d12.len(), 100);
}
