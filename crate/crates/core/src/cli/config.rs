//! Flat `key = value` run configuration.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Keys are case-sensitive and may appear once. Lists are comma separated or
//! written `logspace(min, max, count)`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::em::Position;
use crate::error::{Error, Result};
use crate::optimizer::{DesignConfig, Emitters, SweepMode, Symmetry, Target};
use crate::vie::{PermittivityGrid, SelfTerm, SolveMethod, SolverOptions};

/// Every key the parser accepts.
pub const KEYS: &[&str] = &[
    "grid_dims",
    "grid_spacing",
    "grid_origin",
    "d12",
    "delta_eps",
    "delta_eps_min",
    "eps_max",
    "tol_accept",
    "eta_converge",
    "max_iterations",
    "sweep_mode",
    "bidirectional",
    "exclusion_radius",
    "symmetry",
    "target",
    "pump_ratio",
    "solver",
    "solver_tol",
    "solver_max_iterations",
    "self_term",
    "sweep_d12",
    "sweep_pump_ratio",
    "freespace_d12",
    "freespace_pump_ratio",
    "seed",
    "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub design: DesignConfig,
    pub solver: SolverOptions,
    pub dims: [usize; 3],
    pub spacing: f64,
    /// Lower corner of the grid; `None` centres the grid on the origin.
    pub origin: Option<Position>,
    pub d12: f64,
    pub sweep_d12: Vec<f64>,
    pub sweep_pump_ratio: Vec<f64>,
    pub freespace_d12: Vec<f64>,
    pub freespace_pump_ratio: Vec<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            design: DesignConfig::default(),
            solver: SolverOptions::default(),
            dims: [8, 8, 8],
            spacing: 1.0 / 16.0,
            origin: None,
            d12: 0.25,
            sweep_d12: vec![0.125, 0.25, 0.5],
            sweep_pump_ratio: vec![1e-3, 5e-3, 2.5e-2],
            freespace_d12: logspace(0.05, 5.0, 100),
            freespace_pump_ratio: vec![1e-3, 5e-3, 2.5e-2],
            seed: 0,
            out: None,
        }
    }
}

/// `count` log-spaced values from `min` to `max` inclusive.
pub fn logspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let (a, b) = (min.ln(), max.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

fn err<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Config(format!("line {line}: {msg}")))
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(line, format!("{key}: expected a finite number, got {v:?}")),
    }
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.trim().parse().or_else(|_| err(line, format!("{key}: expected a non-negative integer, got {v:?}")))
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    let v = v.trim();
    if let Some(inner) = v.strip_prefix("logspace(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return err(line, format!("{key}: logspace takes (min, max, count)"));
        }
        let min = parse_f64(line, key, parts[0])?;
        let max = parse_f64(line, key, parts[1])?;
        let count = parse_usize(line, key, parts[2])?;
        if !(min > 0.0 && max > 0.0) || count == 0 {
            return err(line, format!("{key}: logspace needs positive bounds and count"));
        }
        return Ok(logspace(min, max, count));
    }
    v.split(',').map(|p| parse_f64(line, key, p)).collect()
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => err(line, format!("{key}: expected true or false, got {v:?}")),
    }
}

fn parse_self_term(line: usize, v: &str) -> Result<SelfTerm> {
    let v = v.trim();
    if v == "equivalent-sphere" {
        return Ok(SelfTerm::EquivalentSphere);
    }
    if let Some(rest) = v.strip_prefix("fixed:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            let re = parse_f64(line, "self_term", parts[0])?;
            let im = parse_f64(line, "self_term", parts[1])?;
            return Ok(SelfTerm::Fixed(Complex64::new(re, im)));
        }
    }
    err(line, format!("self_term: expected equivalent-sphere or fixed:<re>,<im>, got {v:?}"))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, format!("expected key = value, got {content:?}"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return err(line, format!("unknown key {key:?}"));
            }
            if let Some(prev) = seen.insert(key.to_string(), line) {
                return err(line, format!("{key} already set on line {prev}"));
            }
            cfg.set(line, key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<()> {
        let d = &mut self.design;
        match key {
            "grid_dims" => {
                let parts: Vec<usize> = v.split(',').map(|p| parse_usize(line, key, p)).collect::<Result<_>>()?;
                match parts.as_slice() {
                    [n] => self.dims = [*n; 3],
                    [x, y, z] => self.dims = [*x, *y, *z],
                    _ => return err(line, "grid_dims: expected n or nx,ny,nz"),
                }
            }
            "grid_spacing" => self.spacing = parse_f64(line, key, v)?,
            "grid_origin" => {
                let p = parse_list(line, key, v)?;
                if p.len() != 3 {
                    return err(line, "grid_origin: expected x,y,z");
                }
                self.origin = Some(Position::new(p[0], p[1], p[2]));
            }
            "d12" => self.d12 = parse_f64(line, key, v)?,
            "delta_eps" => d.delta_eps = parse_f64(line, key, v)?,
            "delta_eps_min" => d.delta_eps_min = parse_f64(line, key, v)?,
            "eps_max" => d.eps_max = parse_f64(line, key, v)?,
            "tol_accept" => d.tol_accept = parse_f64(line, key, v)?,
            "eta_converge" => d.eta_converge = parse_f64(line, key, v)?,
            "max_iterations" => d.max_iterations = parse_usize(line, key, v)?,
            "sweep_mode" => {
                d.sweep_mode = match v {
                    "sequential" => SweepMode::Sequential,
                    "frozen-reference" => SweepMode::FrozenReference,
                    _ => return err(line, format!("sweep_mode: expected sequential or frozen-reference, got {v:?}")),
                }
            }
            "bidirectional" => d.bidirectional = parse_bool(line, key, v)?,
            "exclusion_radius" => d.exclusion_radius = parse_f64(line, key, v)?,
            "symmetry" => {
                d.symmetry = match v {
                    "none" => Symmetry::None,
                    "z-axis-rotation-4fold" => Symmetry::ZAxisRotation4,
                    "mirror-z" => Symmetry::MirrorZ,
                    _ => {
                        return err(line, format!("symmetry: expected none, z-axis-rotation-4fold or mirror-z, got {v:?}"))
                    }
                }
            }
            "target" => {
                d.target = match v {
                    "concurrence" => Target::Concurrence,
                    "negativity" => Target::Negativity,
                    _ => return err(line, format!("target: expected concurrence or negativity, got {v:?}")),
                }
            }
            "pump_ratio" => d.pump_ratio = parse_f64(line, key, v)?,
            "solver" => {
                self.solver.method = match v {
                    "iterative" => SolveMethod::Iterative,
                    "dense" => SolveMethod::Dense,
                    _ => return err(line, format!("solver: expected iterative or dense, got {v:?}")),
                }
            }
            "solver_tol" => self.solver.tol = parse_f64(line, key, v)?,
            "solver_max_iterations" => self.solver.max_iterations = parse_usize(line, key, v)?,
            "self_term" => self.solver.self_term = parse_self_term(line, v)?,
            "sweep_d12" => self.sweep_d12 = parse_list(line, key, v)?,
            "sweep_pump_ratio" => self.sweep_pump_ratio = parse_list(line, key, v)?,
            "freespace_d12" => self.freespace_d12 = parse_list(line, key, v)?,
            "freespace_pump_ratio" => self.freespace_pump_ratio = parse_list(line, key, v)?,
            "seed" => self.seed = v.parse().or_else(|_| err(line, format!("seed: expected u64, got {v:?}")))?,
            "out" => self.out = Some(PathBuf::from(v)),
            _ => unreachable!("key list and match arms agree"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        if !(self.d12 > 0.0) {
            return Err(Error::Config(format!("d12 must be positive, got {}", self.d12)));
        }
        for (name, list) in [
            ("sweep_d12", &self.sweep_d12),
            ("sweep_pump_ratio", &self.sweep_pump_ratio),
            ("freespace_d12", &self.freespace_d12),
            ("freespace_pump_ratio", &self.freespace_pump_ratio),
        ] {
            if list.is_empty() || list.iter().any(|&x| !(x > 0.0)) {
                return Err(Error::Config(format!("{name} must be a non-empty list of positive values")));
            }
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iterations == 0 {
            return Err(Error::Config("solver_tol and solver_max_iterations must be positive".into()));
        }
        let grid = self.grid().map_err(|e| Error::Config(e.to_string()))?;
        self.design.symmetry.check_grid(&grid)?;
        Ok(())
    }

    pub fn grid(&self) -> Result<PermittivityGrid> {
        let eps_max = self.design.eps_max;
        match self.origin {
            Some(o) => PermittivityGrid::vacuum(o, self.spacing, self.dims, eps_max),
            None => PermittivityGrid::centered(self.dims, self.spacing, eps_max),
        }
    }

    pub fn emitters(&self) -> Emitters {
        Emitters::on_axis(self.d12)
    }
}
