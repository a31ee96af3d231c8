//! Batch driver behind the `entcloak` binary.
//!
//! Every command parses and validates its configuration before touching the
//! output directory, then stages all files in memory and writes them at the
//! end, so a failed run leaves no partial outputs.

pub mod config;
pub mod io;
pub mod validate;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::em::{couplings_from_green, free_space_green, free_space_self_green, CouplingSet, Position};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_with_progress, DesignConfig, DesignRecord, Emitters};
use crate::quantum::{concurrence, linear_entropy, mems_curve, negativity, steady_state, MasterEqParams};
use config::RunConfig;
use io::{Artifacts, DesignMeta, FailureRow, FreespaceRow, MemsRow, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATE_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

const K: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Parser)]
#[command(name = "entcloak", version, about = "Inverse design of dielectric environments for steady-state emitter entanglement")]
pub struct Cli {
    /// key = value configuration file; omitted keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config; default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the rayon pool (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized checks (overrides `seed` in the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Design one device: design.eps.csv, design.meta.json, trace.csv.
    Optimize,
    /// Optimize over a grid of separations and pump ratios: sweep.csv, failures.csv.
    Sweep,
    /// Analytic free-space couplings and concurrence: freespace.csv.
    Freespace,
    /// Maximally entangled mixed state frontier: mems.csv.
    Mems,
    /// Run the invariant suite and print a pass/fail table.
    Validate,
}

pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config(_) | Error::Io(_) | Error::Json(_) => EXIT_CONFIG,
        Error::MultipleSteadyStates { .. } => EXIT_DEGENERATE,
        _ => EXIT_SOLVER,
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = load(cli).and_then(|(cfg, out)| {
        if let Some(n) = cli.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        }
        match cli.command {
            Command::Optimize => cmd_optimize(&cfg)?.write(&out).map(|_| EXIT_OK),
            Command::Sweep => cmd_sweep(&cfg)?.write(&out).map(|_| EXIT_OK),
            Command::Freespace => cmd_freespace(&cfg)?.write(&out).map(|_| EXIT_OK),
            Command::Mems => cmd_mems()?.write(&out).map(|_| EXIT_OK),
            Command::Validate => Ok(cmd_validate(&cfg)),
        }
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load(cli: &Cli) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads == Some(0) {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    cfg.validate()?;
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn design_for(cfg: &RunConfig, d12: f64, pump_ratio: f64, report: bool) -> Result<DesignRecord> {
    let grid = cfg.grid()?;
    if report && !grid.discretization_ok() {
        eprintln!(
            "warning: voxel spacing {} exceeds λ/(10·√ε_max); results may be under-resolved",
            grid.spacing
        );
    }
    let design = DesignConfig { pump_ratio, ..cfg.design };
    optimize_with_progress(grid, &Emitters::on_axis(d12), K, &design, &cfg.solver, |e| {
        if report {
            eprintln!(
                "iter {:4}  target {:.8}  accepted {:5}  mismatch {:.2e}  δε {}",
                e.n, e.target_value, e.accepted_count, e.eq3_mismatch, e.delta_eps
            );
        }
    })
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<Artifacts> {
    let record = design_for(cfg, cfg.d12, cfg.design.pump_ratio, true)?;
    eprintln!("stopped: {:?} after {} iterations", record.stop, record.entries.len() - 1);
    let p = record.emitters.p_hat;
    let meta = DesignMeta::new(&record.grid, record.emitters.r1, record.emitters.r2, [p.x, p.y, p.z]);
    let mut files = Artifacts::default();
    files.add(io::EPS_FILE, io::eps_csv(&record.grid)?);
    files.add(io::META_FILE, serde_json::to_vec_pretty(&meta)?);
    files.add(io::TRACE_FILE, io::trace_csv(&record)?);
    Ok(files)
}

/// Concurrence, linear entropy, and negativity of the free-space pair.
pub fn free_space_reference(d12: f64, pump_ratio: f64) -> Result<(f64, f64, f64)> {
    let params = MasterEqParams::from_couplings(&CouplingSet::free_space_aligned(d12), pump_ratio)?;
    let rho = steady_state(&params)?;
    Ok((concurrence(&rho), linear_entropy(&rho), negativity(&rho)))
}

fn sweep_point(cfg: &RunConfig, d12: f64, pump_ratio: f64) -> Result<SweepRow> {
    let (c0, s0, n0) = free_space_reference(d12, pump_ratio)?;
    let record = design_for(cfg, d12, pump_ratio, false)?;
    let last = record.final_entry();
    Ok(SweepRow {
        d12_over_lambda: d12,
        P_over_gamma: pump_ratio,
        C: last.concurrence,
        C0: c0,
        C_minus_C0: last.concurrence - c0,
        gamma12_over_gamma: last.gamma12_over_gamma,
        g12_over_gamma: last.g12_over_gamma,
        purcell: last.couplings.purcell,
        S_L: linear_entropy(&record.rho),
        S_L0: s0,
        N: last.negativity,
        N0: n0,
    })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Artifacts> {
    let points: Vec<(f64, f64)> =
        cfg.sweep_d12.iter().flat_map(|&d| cfg.sweep_pump_ratio.iter().map(move |&p| (d, p))).collect();
    let results: Vec<Result<SweepRow>> = points.par_iter().map(|&(d, p)| sweep_point(cfg, d, p)).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for ((d, p), r) in points.iter().zip(results) {
        match r {
            Ok(row) => {
                eprintln!("d12 {d}  P/γ {p}  C {:.6}  C0 {:.6}", row.C, row.C0);
                rows.push(row);
            }
            Err(e) => {
                eprintln!("d12 {d}  P/γ {p}  failed: {e}");
                failures.push(FailureRow { d12_over_lambda: *d, P_over_gamma: *p, error: e.to_string() });
                first_error.get_or_insert(e);
            }
        }
    }
    if rows.is_empty() {
        return Err(first_error.expect("at least one point"));
    }
    let mut files = Artifacts::default();
    files.add(io::SWEEP_FILE, io::sweep_csv(&rows)?);
    files.add(io::FAILURES_FILE, io::failures_csv(&failures)?);
    Ok(files)
}

pub fn cmd_freespace(cfg: &RunConfig) -> Result<Artifacts> {
    let self_g = free_space_self_green(K);
    let p_hat = nalgebra::Vector3::z();
    let rows = cfg
        .freespace_d12
        .iter()
        .map(|&d| {
            let g12 = free_space_green(Position::on_axis(0.0), Position::on_axis(d), K)?;
            let c = couplings_from_green(&self_g, &self_g, &g12, &p_hat, K)?;
            let c0 = cfg
                .freespace_pump_ratio
                .iter()
                .map(|&p| Ok(concurrence(&steady_state(&MasterEqParams::from_couplings(&c, p)?)?)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(FreespaceRow { d12_over_lambda: d, gamma12_over_gamma0: c.gamma12, g12_over_gamma0: c.g12, c0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut files = Artifacts::default();
    files.add(io::FREESPACE_FILE, io::freespace_csv(&cfg.freespace_pump_ratio, &rows)?);
    Ok(files)
}

pub fn cmd_mems() -> Result<Artifacts> {
    let rows = (0..=200)
        .map(|i| {
            let r = i as f64 / 200.0;
            mems_curve(r).map(|(c, s)| MemsRow { r, C: c, S_L: s })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut files = Artifacts::default();
    files.add(io::MEMS_FILE, io::mems_csv(&rows)?);
    Ok(files)
}

pub fn cmd_validate(cfg: &RunConfig) -> i32 {
    let results = validate::run_suite(cfg.seed, &cfg.solver);
    print!("{}", validate::format_table(&results));
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_VALIDATE_FAILED
    }
}
