//! On-disk formats: POVM and basis JSON, rate trajectories and time-series CSV.
//!
//! Complex numbers are written as `[re, im]` pairs and matrices as lists of rows.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use symdiv_core::dynamics::{DivisibilityReport, RateTrajectory};
use symdiv_core::measure::{HermitianBasis, SymmetricPovm};
use symdiv_core::{CMatrix, C64};

use crate::report::write_atomic;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Format("matrix rows have different lengths".into()));
    }
    let data = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    Ok(CMatrix::new(r, c, data)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmMetadata {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub t: Option<f64>,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub family: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmFile {
    pub schema_version: u32,
    pub metadata: PovmMetadata,
    /// `operators[α][k]` is `E_{α,k}`.
    pub operators: Vec<Vec<JsonMatrix>>,
}

impl PovmFile {
    pub fn from_povm(p: &SymmetricPovm, family: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            metadata: PovmMetadata {
                d: p.dim(),
                n: p.n(),
                m: p.m(),
                t: p.t(),
                x: p.x(),
                y: p.y(),
                z: p.z(),
                family: family.into(),
            },
            operators: p
                .operators()
                .iter()
                .map(|row| row.iter().map(matrix_to_json).collect())
                .collect(),
        }
    }

    /// Rebuilds and re-verifies the POVM; the stored `x, y, z` are informational.
    pub fn to_povm(&self, tol: f64) -> Result<SymmetricPovm> {
        check_schema(self.schema_version)?;
        let ops = self
            .operators
            .iter()
            .map(|row| row.iter().map(matrix_from_json).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if ops.len() != self.metadata.n || ops.iter().any(|row| row.len() != self.metadata.m) {
            return Err(Error::Format(format!(
                "metadata declares N = {}, M = {} but the file holds a different layout",
                self.metadata.n, self.metadata.m
            )));
        }
        Ok(SymmetricPovm::from_operators(self.metadata.d, ops, self.metadata.t, tol)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub schema_version: u32,
    pub d: usize,
    pub group_size: usize,
    /// Traceless orthonormal elements, grouped consecutively.
    pub elements: Vec<JsonMatrix>,
}

impl BasisFile {
    pub fn from_basis(b: &HermitianBasis) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            d: b.dim(),
            group_size: b.group_size(),
            elements: b.elements().map(matrix_to_json).collect(),
        }
    }

    pub fn to_basis(&self) -> Result<HermitianBasis> {
        check_schema(self.schema_version)?;
        let elements = self.elements.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        Ok(HermitianBasis::from_flat(self.d, elements, self.group_size)?)
    }
}

fn check_schema(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "schema_version {v} is not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Parses a trajectory with header `t,gamma_1,...,gamma_N`.
pub fn parse_trajectory_csv(text: &str) -> Result<RateTrajectory> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.get(0) != Some("t") {
        return Err(Error::Format("trajectory header must start with `t`".into()));
    }
    for (i, h) in headers.iter().enumerate().skip(1) {
        if h != format!("gamma_{i}") {
            return Err(Error::Format(format!("column {} is `{h}`, expected `gamma_{i}`", i + 1)));
        }
    }
    let mut times = Vec::new();
    let mut gammas = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let values = record
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Format(format!("row {}: `{v}` is not a number", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        times.push(values[0]);
        gammas.push(values[1..].to_vec());
    }
    Ok(RateTrajectory::new(times, gammas)?)
}

pub fn read_trajectory_csv(path: &Path) -> Result<RateTrajectory> {
    parse_trajectory_csv(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

/// One row per snapshot, for plotting.
pub fn time_series_csv(report: &DivisibilityReport) -> Result<String> {
    let n = report.snapshots.first().map_or(0, |s| s.gamma.len());
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    for prefix in ["gamma", "xi", "lambda"] {
        header.extend((1..=n).map(|i| format!("{prefix}_{i}")));
    }
    header.extend(
        [
            "min_rate",
            "cp_exact",
            "cp_sufficient",
            "p_necessary",
            "p_sufficient",
            "d_sufficient",
            "trace_norm_violations",
        ]
        .map(String::from),
    );
    writer.write_record(&header).map_err(csv_error)?;
    for s in &report.snapshots {
        let mut row = vec![s.time.to_string()];
        for values in [&s.gamma, &s.xi, &s.lambda] {
            row.extend(values.iter().map(f64::to_string));
        }
        row.push(s.min_kossakowski_eigenvalue.to_string());
        row.push(s.cp_exact.to_string());
        row.push(s.cp_sufficient.holds.to_string());
        row.push(s.p_necessary.to_string());
        row.push(s.p_sufficient.holds.to_string());
        row.push(s.d_sufficient.holds.to_string());
        row.push(s.trace_norm_violations.to_string());
        writer.write_record(&row).map_err(csv_error)?;
    }
    let mut bytes = writer.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    bytes.flush().ok();
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}
