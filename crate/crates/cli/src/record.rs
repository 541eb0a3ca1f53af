//! Result records and CSV side files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What every command writes: the inputs it saw and what it found.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub command: String,
    /// SHA-256 over the input file bytes, in argument order.
    pub inputs_digest: String,
    pub parameters: serde_json::Value,
    pub outputs: serde_json::Value,
    pub warnings: Vec<String>,
    pub timing_ms: f64,
    pub version: &'static str,
}

pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// Serializes rows with a header line.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().context("flushing CSV")?;
    Ok(String::from_utf8(bytes)?)
}

/// `out.json` with kind `jsr` becomes `out.jsr.csv`.
pub fn side_path(out: &Path, kind: &str) -> PathBuf {
    out.with_extension(format!("{kind}.csv"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
