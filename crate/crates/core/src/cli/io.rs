//! CSV and JSON artifacts. All values are in internal units: lengths in λ₀,
//! rates in γ₀ or in the device's γ = γ₁₁ where the header says so.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::em::Position;
use crate::error::{Error, Result};
use crate::optimizer::{DesignRecord, IterationEntry};
use crate::vie::PermittivityGrid;

pub const EPS_FILE: &str = "design.eps.csv";
pub const META_FILE: &str = "design.meta.json";
pub const TRACE_FILE: &str = "trace.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const FREESPACE_FILE: &str = "freespace.csv";
pub const MEMS_FILE: &str = "mems.csv";

/// JSON Schema for [`DesignMeta`], also shipped as `schema/design.meta.schema.json`.
pub const META_SCHEMA: &str = include_str!("../../schema/design.meta.schema.json");

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn from_csv<T: for<'de> Deserialize<'de>>(text: &[u8]) -> Result<Vec<T>> {
    csv::Reader::from_reader(text).deserialize().map(|r| r.map_err(csv_err)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EpsRow {
    ix: usize,
    iy: usize,
    iz: usize,
    eps: String,
}

/// ε with 17 significant digits, enough to round-trip any f64.
pub fn format_eps(e: f64) -> String {
    format!("{e:.16e}")
}

pub fn eps_csv(grid: &PermittivityGrid) -> Result<Vec<u8>> {
    let rows: Vec<EpsRow> = (0..grid.len())
        .map(|i| {
            let [ix, iy, iz] = grid.coords(i);
            EpsRow { ix, iy, iz, eps: format_eps(grid.eps[i]) }
        })
        .collect();
    to_csv(&rows)
}

/// Sidecar metadata that, with `design.eps.csv`, fully describes a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMeta {
    pub dims: [usize; 3],
    pub spacing: f64,
    /// Lower corner of voxel (0, 0, 0).
    pub origin: [f64; 3],
    pub emitter_positions: [[f64; 3]; 2],
    pub dipole: [f64; 3],
    pub lambda0: f64,
    pub eps_max: f64,
}

impl DesignMeta {
    pub fn new(grid: &PermittivityGrid, r1: Position, r2: Position, dipole: [f64; 3]) -> Self {
        let p = |q: Position| [q.x, q.y, q.z];
        Self {
            dims: grid.dims,
            spacing: grid.spacing,
            origin: p(grid.origin),
            emitter_positions: [p(r1), p(r2)],
            dipole,
            lambda0: 1.0,
            eps_max: grid.eps_max,
        }
    }
}

/// Rebuilds a grid from the two design files.
pub fn read_design(eps_path: &Path, meta_path: &Path) -> Result<(PermittivityGrid, DesignMeta)> {
    parse_design(&fs::read(eps_path)?, &fs::read_to_string(meta_path)?)
}

/// [`read_design`] on in-memory contents.
pub fn parse_design(eps_csv: &[u8], meta_json: &str) -> Result<(PermittivityGrid, DesignMeta)> {
    let meta: DesignMeta = serde_json::from_str(meta_json)?;
    let [x, y, z] = meta.origin;
    let mut grid = PermittivityGrid::vacuum(Position::new(x, y, z), meta.spacing, meta.dims, meta.eps_max)?;
    let rows: Vec<EpsRow> = from_csv(eps_csv)?;
    if rows.len() != grid.len() {
        return Err(Error::InvalidGrid(format!("{} rows for {} voxels", rows.len(), grid.len())));
    }
    let mut seen = vec![false; grid.len()];
    for r in rows {
        if r.ix >= meta.dims[0] || r.iy >= meta.dims[1] || r.iz >= meta.dims[2] {
            return Err(Error::InvalidGrid(format!("voxel ({}, {}, {}) outside grid", r.ix, r.iy, r.iz)));
        }
        let i = grid.index(r.ix, r.iy, r.iz);
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidGrid(format!("voxel ({}, {}, {}) listed twice", r.ix, r.iy, r.iz)));
        }
        grid.eps[i] = r.eps.trim().parse().map_err(|_| Error::InvalidGrid(format!("bad eps {:?}", r.eps)))?;
    }
    grid.validate()?;
    Ok((grid, meta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub target_value: f64,
    pub accepted_count: usize,
    pub gamma12_over_gamma: f64,
    pub g12_over_gamma: f64,
    pub purcell: f64,
    pub eq3_mismatch: f64,
    pub delta_eps: f64,
}

impl From<&IterationEntry> for TraceRow {
    fn from(e: &IterationEntry) -> Self {
        Self {
            n: e.n,
            target_value: e.target_value,
            accepted_count: e.accepted_count,
            gamma12_over_gamma: e.gamma12_over_gamma,
            g12_over_gamma: e.g12_over_gamma,
            purcell: e.couplings.purcell,
            eq3_mismatch: e.eq3_mismatch,
            delta_eps: e.delta_eps,
        }
    }
}

pub fn trace_csv(record: &DesignRecord) -> Result<Vec<u8>> {
    to_csv(&record.entries.iter().map(TraceRow::from).collect::<Vec<_>>())
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    from_csv(&fs::read(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SweepRow {
    pub d12_over_lambda: f64,
    pub P_over_gamma: f64,
    pub C: f64,
    pub C0: f64,
    pub C_minus_C0: f64,
    pub gamma12_over_gamma: f64,
    pub g12_over_gamma: f64,
    pub purcell: f64,
    pub S_L: f64,
    pub S_L0: f64,
    pub N: f64,
    pub N0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct FailureRow {
    pub d12_over_lambda: f64,
    pub P_over_gamma: f64,
    pub error: String,
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    to_csv(rows)
}

pub fn failures_csv(rows: &[FailureRow]) -> Result<Vec<u8>> {
    if rows.is_empty() {
        // Header only, so the file is still a valid table.
        return Ok(b"d12_over_lambda,P_over_gamma,error\n".to_vec());
    }
    to_csv(rows)
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    from_csv(&fs::read(path)?)
}

pub fn read_failures(path: &Path) -> Result<Vec<FailureRow>> {
    from_csv(&fs::read(path)?)
}

/// Column header for the free-space concurrence at pump ratio `p`.
pub fn c0_column(p: f64) -> String {
    format!("C0_P_over_gamma_{p}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreespaceRow {
    pub d12_over_lambda: f64,
    pub gamma12_over_gamma0: f64,
    pub g12_over_gamma0: f64,
    pub c0: Vec<f64>,
}

pub fn freespace_csv(pumps: &[f64], rows: &[FreespaceRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["d12_over_lambda".to_string(), "gamma12_over_gamma0".into(), "g12_over_gamma0".into()];
    header.extend(pumps.iter().map(|&p| c0_column(p)));
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.d12_over_lambda.to_string(), r.gamma12_over_gamma0.to_string(), r.g12_over_gamma0.to_string()];
        rec.extend(r.c0.iter().map(|c| c.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn read_freespace(path: &Path) -> Result<(Vec<String>, Vec<FreespaceRow>)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse().map_err(|_| Error::Config(format!("bad number {s:?}"))))
            .collect::<Result<_>>()?;
        if vals.len() < 3 {
            return Err(Error::Config("freespace row too short".into()));
        }
        rows.push(FreespaceRow {
            d12_over_lambda: vals[0],
            gamma12_over_gamma0: vals[1],
            g12_over_gamma0: vals[2],
            c0: vals[3..].to_vec(),
        });
    }
    Ok((header, rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct MemsRow {
    pub r: f64,
    pub C: f64,
    pub S_L: f64,
}

pub fn mems_csv(rows: &[MemsRow]) -> Result<Vec<u8>> {
    to_csv(rows)
}

pub fn read_mems(path: &Path) -> Result<Vec<MemsRow>> {
    from_csv(&fs::read(path)?)
}

/// Files staged in memory and written together once every one is ready.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(&'static str, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &'static str, bytes: Vec<u8>) {
        self.files.push((name, bytes));
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            let tmp = dir.join(format!(".{name}.tmp"));
            fs::write(&tmp, bytes)?;
            fs::rename(&tmp, dir.join(name))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn eps_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut g = PermittivityGrid::centered([3, 4, 5], 0.0625, 9.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for e in g.eps.iter_mut() {
            *e = rng.random_range(1.0..9.0);
        }
        g.eps[0] = 1.0 + f64::EPSILON;
        g.eps[1] = 9.0;
        let meta = DesignMeta::new(&g, Position::on_axis(-0.1), Position::on_axis(0.1), [0.0, 0.0, 1.0]);
        let mut a = Artifacts::default();
        a.add(EPS_FILE, eps_csv(&g).unwrap());
        a.add(META_FILE, serde_json::to_vec_pretty(&meta).unwrap());
        a.write(dir.path()).unwrap();
        let (back, meta_back) = read_design(&dir.path().join(EPS_FILE), &dir.path().join(META_FILE)).unwrap();
        assert_eq!(meta_back, meta);
        for (x, y) in back.eps.iter().zip(&g.eps) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(back.origin, g.origin);
        assert!(!dir.path().join(format!(".{EPS_FILE}.tmp")).exists());
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = format_eps(1.0 / 3.0);
        let mantissa = s.split('e').next().unwrap().replace('.', "");
        assert_eq!(mantissa.len(), 17);
    }

    #[test]
    fn corrupted_eps_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let g = PermittivityGrid::centered([2, 2, 2], 0.1, 4.0).unwrap();
        let meta = DesignMeta::new(&g, Position::on_axis(-0.1), Position::on_axis(0.1), [0.0, 0.0, 1.0]);
        fs::write(dir.path().join(META_FILE), serde_json::to_vec(&meta).unwrap()).unwrap();
        let text = String::from_utf8(eps_csv(&g).unwrap()).unwrap();
        let eps_path = dir.path().join(EPS_FILE);
        fs::write(&eps_path, text.replace("0,0,1,", "0,0,0,")).unwrap();
        assert!(read_design(&eps_path, &dir.path().join(META_FILE)).is_err());
        fs::write(&eps_path, text.replacen("1.0000000000000000e0", "5.0e0", 1)).unwrap();
        assert!(read_design(&eps_path, &dir.path().join(META_FILE)).is_err());
    }

    #[test]
    fn sweep_rows_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let row = SweepRow {
            d12_over_lambda: 0.25,
            P_over_gamma: 5e-3,
            C: 0.0561,
            C0: 0.0030827,
            C_minus_C0: 0.0530173,
            gamma12_over_gamma: 0.81,
            g12_over_gamma: -1.0 / 3.0,
            purcell: 2.2,
            S_L: 0.01,
            S_L0: 0.013,
            N: 1e-300,
            N0: 0.0,
        };
        let path = dir.path().join(SWEEP_FILE);
        fs::write(&path, sweep_csv(std::slice::from_ref(&row)).unwrap()).unwrap();
        assert_eq!(read_sweep(&path).unwrap(), vec![row]);
        let f = FailureRow { d12_over_lambda: 1.0, P_over_gamma: 0.1, error: "x, \"quoted\"".into() };
        let path = dir.path().join(FAILURES_FILE);
        fs::write(&path, failures_csv(std::slice::from_ref(&f)).unwrap()).unwrap();
        assert_eq!(read_failures(&path).unwrap(), vec![f]);
        fs::write(&path, failures_csv(&[]).unwrap()).unwrap();
        assert!(read_failures(&path).unwrap().is_empty());
    }
}
