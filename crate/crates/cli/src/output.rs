//! CSV tables with a header row, LF line endings and floats at 17
//! significant digits, which round-trip bit-exactly. A JSON sidecar
//! `<out>.meta.json` records the command, its configuration and a summary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Column `name` parsed as floats.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[j].parse().ok()).collect()
    }
}

/// 17 significant digits in scientific notation.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn int(n: usize) -> String {
    n.to_string()
}

fn write_to<W: Write>(w: W, table: &Table) -> csv::Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(&table.header)?;
    for row in &table.rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, table: &Table) -> CliResult<()> {
    let err = |message: String| CliError::Write { path: path.to_path_buf(), message };
    let file = std::fs::File::create(path).map_err(|e| err(e.to_string()))?;
    write_to(std::io::BufWriter::new(file), table).map_err(|e| err(e.to_string()))
}

pub fn write_csv_stdout(table: &Table) -> CliResult<()> {
    write_to(std::io::stdout().lock(), table)
        .map_err(|e| CliError::Write { path: "<stdout>".into(), message: e.to_string() })
}

pub fn read_csv(path: &Path) -> CliResult<Table> {
    let err = |message: String| CliError::Table { path: path.to_path_buf(), message };
    let mut reader = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let header = reader.headers().map_err(|e| err(e.to_string()))?.iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<csv::Result<_>>()
        .map_err(|e| err(e.to_string()))?;
    Ok(Table { header, rows })
}

/// `<path>` with `suffix` appended to the file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

#[derive(Debug, Serialize)]
pub struct Meta<'a, C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub summary: &'a serde_json::Value,
    pub pass: bool,
}

pub fn write_meta<C: Serialize>(csv_path: &Path, meta: &Meta<'_, C>) -> CliResult<PathBuf> {
    let path = sibling(csv_path, ".meta.json");
    let err = |message: String| CliError::Write { path: path.clone(), message };
    let text = serde_json::to_string_pretty(meta).map_err(|e| err(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| err(e.to_string()))?;
    Ok(path)
}
