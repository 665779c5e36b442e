//! The JSON envelope shared by every command, and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use symdiv_core::{DEFAULT_DERIVATIVE_TOL, DEFAULT_PSD_TOL};

use crate::format::SCHEMA_VERSION;
use crate::{Error, Result};

/// Overrides the default PSD tolerance when set to a positive real.
pub const TOL_ENV: &str = "SYMDIV_TOL";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub psd: f64,
    pub derivative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd: DEFAULT_PSD_TOL,
            derivative: DEFAULT_DERIVATIVE_TOL,
        }
    }
}

/// PSD tolerance from [`TOL_ENV`], falling back to the library default.
pub fn default_tolerance() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(v) => parse_tolerance(&v).map_err(|e| Error::Usage(format!("{TOL_ENV}: {e}"))),
        Err(_) => Ok(DEFAULT_PSD_TOL),
    }
}

pub fn parse_tolerance(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive real")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    /// Only present when requested, so reports stay byte-identical across runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Value, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs,
            results,
            provenance,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Format(e.to_string()))
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}
