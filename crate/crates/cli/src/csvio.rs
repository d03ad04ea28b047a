//! CSV ingestion and atomic file output.
//!
//! Input datasets are UTF-8, comma-separated, with a mandatory header row.
//! The response column is selected by name; every other column is parsed as
//! a finite f64 predictor. Output files are written to a temporary sibling
//! and renamed into place so failed runs leave no partial files.

use std::fs;
use std::path::{Path, PathBuf};

use fastrcs::numkit::Matrix;
use fastrcs::simgen::GeneratedSample;
use fastrcs::Dataset;

use crate::Failure;

/// Reads `path` into a dataset, returning the predictor column names too.
pub fn read_dataset(path: &Path, response: &str) -> Result<(Dataset, Vec<String>), Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::csv(format!("cannot open {}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Failure::csv(format!("bad header row: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let response_col = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| {
            Failure::csv(format!(
                "no column named '{response}' (available: {})",
                headers.join(", ")
            ))
        })?;
    if headers.len() < 2 {
        return Err(Failure::csv("need at least one predictor column"));
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::csv(format!("row {}: {e}", line + 2)))?;
        if record.len() != headers.len() {
            return Err(Failure::csv(format!(
                "row {}: {} fields, expected {}",
                line + 2,
                record.len(),
                headers.len()
            )));
        }
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (col, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                Failure::csv(format!("row {}, column '{}': '{field}' is not numeric", line + 2, headers[col]))
            })?;
            if !value.is_finite() {
                return Err(Failure::csv(format!(
                    "row {}, column '{}': non-finite value {field}",
                    line + 2,
                    headers[col]
                )));
            }
            if col == response_col {
                y.push(value);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    let matrix = Matrix::from_rows(&rows).map_err(|e| Failure::csv(e.to_string()))?;
    let data = Dataset::new(matrix, y).map_err(|e| Failure::csv(e.to_string()))?;
    let predictors = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != response_col)
        .map(|(_, h)| h.clone())
        .collect();
    Ok((data, predictors))
}

/// Writes `content` to `path` via a temporary sibling plus rename.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), Failure> {
    let tmp = temp_sibling(path);
    fs::write(&tmp, content)
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Failure::io(format!("cannot move report into {}: {e}", path.display()))
    })
}

fn temp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Serializes a generated sample as `x1..x{p-1},y` CSV plus a sidecar
/// `<path>.indices` file listing the ground-truth outlier rows (zero-based,
/// one per line).
pub fn write_sample(path: &Path, sample: &GeneratedSample) -> Result<(), Failure> {
    let p = sample.data.p();
    let mut out = String::new();
    let mut header: Vec<String> = (1..p).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..sample.data.n() {
        let mut fields: Vec<String> = sample
            .data
            .xrow(i)
            .iter()
            .map(|v| format_float(*v))
            .collect();
        fields.push(format_float(sample.data.response()[i]));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())?;

    let sidecar = sidecar_path(path);
    let indices: String = sample
        .outlier_indices
        .iter()
        .map(|i| format!("{i}\n"))
        .collect();
    write_atomic(&sidecar, indices.as_bytes())
}

/// `<path>.indices`, next to the sample CSV.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".indices");
    path.with_file_name(name)
}

/// f64 Display round-trips exactly, so re-ingested samples are bit-equal.
pub fn format_float(v: f64) -> String {
    format!("{v}")
}
