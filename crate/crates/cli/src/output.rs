//! Tables, atomic file output and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> anyhow::Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(|v| sci(*v)))?;
                }
                Ok(w.into_inner().context("flushing CSV")?)
            }
            Format::Json => {
                let mut v = serde_json::to_vec_pretty(self)?;
                v.push(b'\n');
                Ok(v)
            }
        }
    }
}

/// Scientific notation with 12 significant digits; −0 prints as 0.
pub fn sci(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// Writes via a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f =
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub parameter_set: String,
    pub config: serde_json::Value,
    pub tolerances: Tolerances,
    /// run-specific settings (grids, photon numbers, flags)
    pub settings: serde_json::Value,
    pub converged: bool,
    pub convergence: serde_json::Value,
    pub outputs: Vec<String>,
    /// SHA-256 of this record without `hash` and `wall_time_s`
    pub hash: String,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn seal(mut self) -> anyhow::Result<Self> {
        self.hash = String::new();
        let t = self.wall_time_s;
        self.wall_time_s = 0.0;
        let digest = Sha256::digest(serde_json::to_vec(&self)?);
        self.hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.wall_time_s = t;
        Ok(self)
    }
}
