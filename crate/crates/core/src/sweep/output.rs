use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::SweepConfig;
use super::engine::{CutoffResolution, Diagnostics, SweepResult, SweepRow};
use crate::error::Result;

/// Bumped whenever the CSV columns or manifest layout change.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 10] =
    ["axis1", "axis2", "solver", "family", "N", "M", "sign", "energy_over_omega_m", "fidelity", "xi"];

/// Seventeen significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn record(r: &SweepRow) -> [String; 10] {
    [
        format_number(r.axis1),
        opt(r.axis2),
        r.solver.name().to_string(),
        r.label.family.name().to_string(),
        r.label.n.map(|n| n.to_string()).unwrap_or_default(),
        r.label.m.map(|m| m.to_string()).unwrap_or_default(),
        r.label.sign.map(|s| s.symbol().to_string()).unwrap_or_default(),
        opt(r.energy),
        opt(r.fidelity),
        opt(r.xi),
    ]
}

/// The CSV table as bytes (UTF-8, LF line endings).
pub fn csv_bytes(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(record(r))?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub preset: Option<String>,
    pub config: SweepConfig,
    /// SHA-256 of the compact JSON serialization of `config`.
    pub config_sha256: String,
    pub data_sha256: String,
    pub columns: [&'static str; 10],
    pub cutoffs: Option<CutoffResolution>,
    pub diagnostics: Diagnostics,
    pub wall_time_seconds: f64,
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn new(cfg: &SweepConfig, result: &SweepResult, data: &[u8]) -> Result<Self> {
        let canonical = serde_json::to_vec(cfg)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            tool: "sweep",
            tool_version: env!("CARGO_PKG_VERSION"),
            preset: cfg.name.clone(),
            config: cfg.clone(),
            config_sha256: sha256_hex(&canonical),
            data_sha256: sha256_hex(data),
            columns: CSV_HEADER,
            cutoffs: result.cutoffs.clone(),
            diagnostics: result.diagnostics.clone(),
            wall_time_seconds: result.wall_seconds,
            notes: cfg.notes.clone(),
        })
    }
}

/// Write `data.csv` and `manifest.json` into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, cfg: &SweepConfig, result: &SweepResult) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let data = csv_bytes(&result.rows)?;
    fs::write(dir.join("data.csv"), &data)?;
    let manifest = Manifest::new(cfg, result, &data)?;
    let mut f = fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.5), "-2.5000000000000000e0");
        assert_eq!(0.1f64, format_number(0.1).parse::<f64>().unwrap());
    }

    #[test]
    fn header_only_for_no_rows() {
        let b = csv_bytes(&[]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), CSV_HEADER.join(",") + "\n");
    }
}
