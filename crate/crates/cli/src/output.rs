//! Deterministic JSON and CSV writers.

use std::path::Path;

use serde::Serialize;
use sigmalab::Rat;

use crate::{io_error, CliError};

/// Significant digits for decimal CSV columns.
const CSV_DIGITS: usize = 15;

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Decimal rendering with [`CSV_DIGITS`] significant digits.
    pub fn dec(r: &Rat) -> String {
        let v = r.to_f64();
        if v == 0.0 {
            return "0".to_string();
        }
        format!("{:.*e}", CSV_DIGITS - 1, v)
    }

    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    std::fs::write(path, table.render()).map_err(|e| io_error(path, e))
}
