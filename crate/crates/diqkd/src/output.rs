//! CSV emission with a JSON manifest per invocation.
//!
//! Data files carry no timestamps, so re-running a command over the
//! same inputs reproduces every output byte for byte. The manifest
//! documents each column (name, unit, defining formula) and holds the
//! optional generation timestamp, clearly separated from the data.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Nine significant digits; NaN is spelled out (an undefined estimate,
/// not a formatting accident).
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.8e}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub formula: String,
}

impl Column {
    pub fn new(name: &str, unit: &str, formula: &str) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
            formula: formula.into(),
        }
    }
}

/// A named table of float rows with documented columns.
#[derive(Clone, Debug)]
pub struct Table {
    name: String,
    columns: Vec<Column>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Table {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity mismatch in table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct ManifestTable<'a> {
    file: String,
    name: &'a str,
    rows: usize,
    columns: &'a [Column],
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    parameters: serde_json::Value,
    tables: Vec<ManifestTable<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_unix_seconds: Option<u64>,
}

/// Writes every table as `<name>.csv` under `dir` plus a
/// `manifest.json` describing the invocation. Returns the written
/// paths, manifest last.
pub fn write_tables(
    dir: &Path,
    command: &str,
    parameters: serde_json::Value,
    tables: &[Table],
    stamp: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for table in tables {
        let file = format!("{}.csv", table.name);
        let path = dir.join(&file);
        fs::write(&path, table.to_csv_string())?;
        entries.push(ManifestTable {
            file,
            name: &table.name,
            rows: table.rows.len(),
            columns: &table.columns,
        });
        written.push(path);
    }
    let manifest = Manifest {
        command,
        parameters,
        tables: entries,
        generated_at_unix_seconds: stamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }),
    };
    let path = dir.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::InvalidState(format!("manifest serialization: {e}")))?;
    fs::write(&path, body + "\n")?;
    written.push(path);
    Ok(written)
}
