//! Cross-module invariant suite behind `entcloak validate`.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::io::{eps_csv, parse_design, DesignMeta};
use crate::em::{couplings_from_green, free_space_green, free_space_self_green, CouplingSet, Position};
use crate::error::Result;
use crate::optimizer::{
    candidate_orbits, evaluate_candidate, optimize_with_progress, sweep_once, verify_convergence, DesignConfig,
    Emitters, SolvedState, SweepMode, Symmetry,
};
use crate::quantum::random::{random_density, random_params};
use crate::quantum::{
    apply_generator, concurrence_checked, concurrence_wootters, linear_entropy, mems_concurrence_at_entropy,
    mems_curve, negativity_checked, negativity_partial_transpose, propagate_to_steady, steady_state,
    DensityMatrix4, MasterEqParams,
};
use crate::vie::{
    assemble_dense, fft_matvec, scattered_green_pair, solve_fields, sphere_polarizability, PermittivityGrid,
    SolveMethod, SolverOptions,
};

const K: f64 = 2.0 * PI;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn(&mut ChaCha8Rng, &SolverOptions) -> Result<(bool, String)>;

/// Every check in the order it runs.
pub const CHECKS: &[(&str, Check)] = &[
    ("em/free-space-closed-form", free_space_closed_form),
    ("em/reciprocity", free_space_reciprocity),
    ("quantum/isolated-populations", isolated_populations),
    ("quantum/steady-state-physical", steady_states_physical),
    ("quantum/witness-equivalence", witness_equivalence),
    ("quantum/mems-frontier", mems_frontier),
    ("quantum/nullspace-vs-propagation", nullspace_vs_propagation),
    ("vie/vacuum-limit", vacuum_limit),
    ("vie/fft-vs-dense-matvec", fft_vs_dense),
    ("vie/dense-vs-iterative", dense_vs_iterative),
    ("vie/reciprocity", scattered_reciprocity),
    ("vie/passivity", passivity),
    ("vie/rayleigh-sphere", rayleigh_sphere),
    ("optimizer/born-candidate-vs-resolve", born_vs_resolve),
    ("optimizer/one-voxel-mismatch", one_voxel_mismatch),
    ("optimizer/frozen-reference-order", frozen_reference_order),
    ("optimizer/run-invariants", run_invariants),
    ("optimizer/mirror-purcell-symmetry", mirror_purcell),
    ("cli/design-roundtrip", design_roundtrip),
];

/// Runs every check with randomness derived from `seed`.
pub fn run_suite(seed: u64, opts: &SolverOptions) -> Vec<CheckResult> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let start = Instant::now();
            let (passed, detail) = match check(&mut rng, opts) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {:width$}  {:7.2}s  {}\n", r.name, r.seconds, r.detail));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", results.len(), failed));
    out
}

fn verdict(ok: bool, detail: String) -> Result<(bool, String)> {
    Ok((ok, detail))
}

fn random_grid(rng: &mut ChaCha8Rng, dims: [usize; 3], spacing: f64) -> Result<PermittivityGrid> {
    let mut g = PermittivityGrid::centered(dims, spacing, 9.0)?;
    for e in g.eps.iter_mut() {
        if rng.random_bool(0.5) {
            *e = rng.random_range(1.0..6.0);
        }
    }
    Ok(g)
}

fn outside_point(rng: &mut ChaCha8Rng, grid: &PermittivityGrid) -> Position {
    let half = grid.dims.iter().max().copied().unwrap_or(1) as f64 * grid.spacing / 2.0;
    let z = half + rng.random_range(0.05..0.3);
    Position::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05), if rng.random_bool(0.5) { z } else { -z })
}

fn free_space_closed_form(_: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let z = Vector3::z();
    let mut worst: f64 = 0.0;
    for d in super::config::logspace(0.05, 5.0, 100) {
        let g = free_space_green(Position::on_axis(0.0), Position::on_axis(d), K)?;
        let c = couplings_from_green(&free_space_self_green(K), &free_space_self_green(K), &g, &z, K)?;
        let exact = CouplingSet::free_space_aligned(d);
        worst = worst
            .max((c.gamma12 - exact.gamma12).abs() / exact.gamma12.abs())
            .max((c.g12 - exact.g12).abs() / exact.g12.abs());
    }
    verdict(worst <= 1e-10, format!("max relative error {worst:.2e} over 100 distances"))
}

fn free_space_reciprocity(rng: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = Position::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let b = Position::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let g = free_space_green(a, b, K)?;
        let h = free_space_green(b, a, K)?;
        worst = worst.max((g - h.transpose()).frobenius_norm() / g.frobenius_norm());
        worst = worst.max((g - g.transpose()).frobenius_norm() / g.frobenius_norm());
    }
    verdict(worst <= 1e-14, format!("max relative asymmetry {worst:.2e}"))
}

fn isolated_populations(rng: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let gamma = rng.random_range(0.1..3.0);
        let pump = rng.random_range(1e-3..2.0);
        let rho = steady_state(&MasterEqParams::new(gamma, gamma, 0.0, 0.0, pump)?)?;
        let excited = rho.rho11() + rho.rho33();
        worst = worst.max((excited - pump / (pump + gamma)).abs());
    }
    verdict(worst <= 1e-12, format!("max |ρ_e − P/(P+γ)| = {worst:.2e}"))
}

fn steady_states_physical(rng: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let (mut trace, mut herm, mut eig, mut resid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let p = random_params(rng);
        let rho = steady_state(&p)?;
        trace = trace.max((rho.trace() - Complex64::new(1.0, 0.0)).norm());
        herm = herm.max(rho.hermiticity_error());
        eig = eig.min(rho.min_eigenvalue());
        resid = resid.max(apply_generator(&p, &rho.0).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let ok = trace <= 1e-12 && herm <= 1e-12 && eig >= -1e-12 && resid <= 1e-10;
    verdict(ok, format!("trace {trace:.1e}, hermiticity {herm:.1e}, min eigenvalue {eig:.1e}, |Lρ| {resid:.1e}"))
}

fn witness_equivalence(rng: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let (mut dc, mut dn) = (0.0f64, 0.0f64);
    let mut general = 0;
    for _ in 0..10_000 {
        let rho = steady_state(&random_params(rng))?;
        let c = concurrence_checked(&rho);
        let n = negativity_checked(&rho);
        general += usize::from(c.used_general || n.used_general);
        dc = dc.max((c.value - concurrence_wootters(&rho)).abs());
        dn = dn.max((n.value - negativity_partial_transpose(&rho)).abs());
    }
    let ok = dc <= 1e-10 && dn <= 1e-10 && general == 0;
    verdict(ok, format!("10000 states: |ΔC| {dc:.1e}, |ΔN| {dn:.1e}, non-X {general}"))
}

fn mems_frontier(rng: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let (c0, s0) = mems_curve(0.0)?;
    let (c1, s1) = mems_curve(1.0)?;
    let ends = c0 == 0.0 && (s0 - 8.0 / 9.0).abs() < 1e-15 && c1 == 1.0 && s1 == 0.0;
    let lo = mems_curve(2.0 / 3.0 - 1e-12)?.1;
    let hi = mems_curve(2.0 / 3.0 + 1e-12)?.1;
    let continuous = (lo - 16.0 / 27.0).abs() < 1e-10 && (hi - 16.0 / 27.0).abs() < 1e-10;
    let mut above = 0;
    for _ in 0..1000 {
        let rho = random_density(rng);
        if concurrence_wootters(&rho) > mems_concurrence_at_entropy(linear_entropy(&rho)) + 1e-9 {
            above += 1;
        }
    }
    verdict(ends && continuous && above == 0, format!("endpoints {ends}, continuous {continuous}, {above}/1000 random states above"))
}

fn nullspace_vs_propagation(rng: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let p = random_params(rng);
        let dt = 0.01 / p.max_rate();
        let a = propagate_to_steady(&p, &DensityMatrix4::ground(), 5e4, dt)?;
        let b = steady_state(&p)?;
        worst = worst.max((a.0 - b.0).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    verdict(worst <= 1e-8, format!("max element difference {worst:.1e}"))
}

fn vacuum_limit(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let g = PermittivityGrid::centered([4, 4, 4], 0.05, 9.0)?;
    let (r1, r2) = (outside_point(rng, &g), outside_point(rng, &g));
    let pair = scattered_green_pair(&g, r1, r2, K, opts)?;
    let exact = free_space_green(r1, r2, K)?;
    let ok = pair.g12 == exact && pair.g11 == free_space_self_green(K);
    verdict(ok, "ε ≡ 1 reproduces the free-space tensors exactly".into())
}

fn fft_vs_dense(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let g = random_grid(rng, [5, 4, 6], 0.06)?;
    let a = assemble_dense(&g, K, opts.self_term)?;
    let x: Vec<Complex64> =
        (0..3 * g.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let fast = fft_matvec(&g, K, opts.self_term, &x);
    let slow = &a * nalgebra::DVector::from_column_slice(&x);
    let rel = (nalgebra::DVector::from_column_slice(&fast) - &slow).norm() / slow.norm();
    verdict(rel <= 1e-10, format!("relative difference {rel:.1e}"))
}

fn dense_vs_iterative(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let shapes = [[1, 1, 1], [2, 2, 2], [3, 2, 4], [4, 4, 4], [5, 5, 5], [6, 5, 4], [6, 6, 6]];
    for dims in shapes {
        let g = random_grid(rng, dims, 1.0 / 16.0)?;
        let src = outside_point(rng, &g);
        let p = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 1.0).normalize();
        let dense = solve_fields(&g, src, &p, K, &SolverOptions { method: SolveMethod::Dense, ..*opts })?;
        let iter = solve_fields(&g, src, &p, K, &SolverOptions { method: SolveMethod::Iterative, ..*opts })?;
        let num: f64 = dense.values.iter().zip(&iter.values).map(|(a, b)| (a - b).norm_squared()).sum();
        let den: f64 = dense.values.iter().map(|a| a.norm_squared()).sum();
        worst = worst.max((num / den).sqrt());
    }
    verdict(worst <= 1e-6, format!("max relative difference {worst:.1e} over {} grids up to 6³", shapes.len()))
}

fn scattered_reciprocity(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let g = random_grid(rng, [4, 4, 4], 0.06)?;
    let pair = scattered_green_pair(&g, outside_point(rng, &g), outside_point(rng, &g), K, opts)?;
    let rel = (pair.g12 - pair.g21.transpose()).frobenius_norm() / pair.g12.frobenius_norm();
    verdict(rel <= 1e-7, format!("relative asymmetry {rel:.1e}"))
}

fn passivity(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let mut worst_margin = f64::INFINITY;
    let mut min_gamma = f64::INFINITY;
    for _ in 0..5 {
        let g = random_grid(rng, [4, 4, 4], 0.06)?;
        let pair = scattered_green_pair(&g, outside_point(rng, &g), outside_point(rng, &g), K, opts)?;
        let c = couplings_from_green(&pair.g11, &pair.g22, &pair.g12, &Vector3::z(), K)?;
        min_gamma = min_gamma.min(c.gamma11.min(c.gamma22));
        worst_margin = worst_margin.min((c.gamma11 * c.gamma22).sqrt() - c.gamma12.abs());
    }
    verdict(min_gamma > 0.0 && worst_margin >= 0.0, format!("min γ {min_gamma:.3}, min √(γ11γ22) − |γ12| {worst_margin:.3}"))
}

fn rayleigh_sphere(_: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let s = sphere_polarizability(0.05, 2.25, 8, K, &SolverOptions { method: SolveMethod::Iterative, ..*opts })?;
    let err = s.relative_error();
    verdict(err <= 0.05, format!("a = λ/20, ε = 2.25, {} voxels: relative error {err:.4}", s.voxels))
}

fn toy_state(d12: f64, n: usize, cfg: &DesignConfig, opts: &SolverOptions) -> Result<(SolvedState, Emitters)> {
    let em = Emitters::on_axis(d12);
    let mut g = PermittivityGrid::centered([n, n, n], 1.0 / 16.0, cfg.eps_max)?;
    g.freeze_near(&[em.r1, em.r2], cfg.exclusion_radius * g.spacing);
    Ok((SolvedState::solve(g, &em, K, cfg, opts)?, em))
}

fn born_vs_resolve(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let cfg = DesignConfig::default();
    let (s, em) = toy_state(0.25, 4, &cfg, opts)?;
    let mut worst: f64 = 0.0;
    let orbits = candidate_orbits(&s.grid, &cfg, None);
    for _ in 0..4 {
        let v = orbits[rng.random_range(0..orbits.len())][0];
        let (born, _) = evaluate_candidate(&s, &s.tensors, &[v], cfg.delta_eps, &em, K, &cfg)?;
        let mut g = s.grid.clone();
        g.eps[v] += cfg.delta_eps;
        let exact = SolvedState::solve(g, &em, K, &cfg, opts)?;
        worst = worst.max((born.value - exact.eval.value).abs());
    }
    verdict(s.eval.value > 0.0 && worst <= 5e-3, format!("C = {:.5}, max |C_born − C_resolved| {worst:.1e}", s.eval.value))
}

fn one_voxel_mismatch(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let cfg = DesignConfig::default();
    let (s, em) = toy_state(0.25, 4, &cfg, opts)?;
    let orbits = candidate_orbits(&s.grid, &cfg, None);
    let v = orbits[rng.random_range(0..orbits.len())][0];
    let d = s.born_increment(&[v], 0.05, K);
    let estimate = s.tensors.add(&d);
    let mut g = s.grid.clone();
    g.eps[v] += 0.05;
    let next = SolvedState::solve(g, &em, K, &cfg, opts)?;
    let m = verify_convergence(&estimate, &next.tensors);
    verdict(m <= 1e-3, format!("voxel {v}, δε = 0.05: mismatch {m:.1e}"))
}

fn frozen_reference_order(rng: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let cfg = DesignConfig { sweep_mode: SweepMode::FrozenReference, ..DesignConfig::default() };
    let (s, em) = toy_state(0.25, 4, &cfg, opts)?;
    let reference = sweep_once(&s, &em, K, &cfg, cfg.delta_eps, None);
    let mut same = true;
    for _ in 0..5 {
        let mut order: Vec<usize> = (0..s.grid.len()).collect();
        order.shuffle(rng);
        let out = sweep_once(&s, &em, K, &cfg, cfg.delta_eps, Some(&order));
        same &= out.moves == reference.moves && out.grid == reference.grid;
    }
    verdict(same, format!("{} accepted moves identical under 5 shuffles: {same}", reference.moves.len()))
}

fn run_invariants(_: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let cfg = DesignConfig { max_iterations: 5, delta_eps: 0.2, ..DesignConfig::default() };
    let grid = PermittivityGrid::centered([6, 6, 6], 1.0 / 16.0, cfg.eps_max)?;
    let rec = optimize_with_progress(grid, &Emitters::on_axis(0.25), K, &cfg, opts, |_| {})?;
    let monotone = rec.entries.windows(2).all(|w| w[1].target_value >= w[0].target_value);
    let bounded = rec.grid.eps.iter().all(|&e| (1.0..=cfg.eps_max).contains(&e));
    let converged = rec.entries.iter().all(|e| e.eq3_mismatch <= cfg.eta_converge);
    verdict(
        monotone && bounded && converged && rec.entries.len() > 1,
        format!(
            "{} iterations, C {:.5} → {:.5}; monotone {monotone}, ε bounded {bounded}, Born mismatch ok {converged}",
            rec.entries.len() - 1,
            rec.initial_entry().target_value,
            rec.final_entry().target_value
        ),
    )
}

fn mirror_purcell(_: &mut ChaCha8Rng, opts: &SolverOptions) -> Result<(bool, String)> {
    let cfg = DesignConfig { max_iterations: 3, delta_eps: 0.2, symmetry: Symmetry::MirrorZ, ..DesignConfig::default() };
    let grid = PermittivityGrid::centered([4, 4, 4], 1.0 / 16.0, cfg.eps_max)?;
    let mut worst: f64 = 0.0;
    optimize_with_progress(grid, &Emitters::on_axis(0.25), K, &cfg, opts, |e| {
        let c = e.couplings;
        worst = worst.max((c.gamma11 - c.gamma22).abs() / c.gamma11);
    })?;
    verdict(worst <= 1e-6, format!("max |F1 − F2|/F1 {worst:.1e}"))
}

fn design_roundtrip(rng: &mut ChaCha8Rng, _: &SolverOptions) -> Result<(bool, String)> {
    let mut g = PermittivityGrid::centered([3, 5, 4], 0.05, 9.0)?;
    for e in g.eps.iter_mut() {
        *e = rng.random_range(1.0..9.0);
    }
    let meta = DesignMeta::new(&g, Position::on_axis(-0.1), Position::on_axis(0.1), [0.0, 0.0, 1.0]);
    let (back, meta_back) = parse_design(&eps_csv(&g)?, &serde_json::to_string(&meta)?)?;
    let exact = back.eps.iter().zip(&g.eps).all(|(a, b)| a.to_bits() == b.to_bits()) && meta_back == meta;
    verdict(exact, format!("{} voxels bit-exact: {exact}", g.len()))
}
