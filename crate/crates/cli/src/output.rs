//! Sorted-key JSON and CSV writers.

use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<S: Serialize>(value: &S) -> Result<String, CliError> {
    // serde_json's map keeps keys ordered
    let v = serde_json::to_value(value).map_err(|e| CliError::Solver(format!("serialization: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Solver(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    std::fs::write(path, to_sorted_json(value)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv<R: AsRef<[String]>>(path: &Path, header: &[&str], rows: &[R]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.as_ref()).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_json<D: serde::de::DeserializeOwned>(path: &Path) -> Result<D, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
