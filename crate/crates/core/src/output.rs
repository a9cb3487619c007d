//! Deterministic CSV emission.
//!
//! Output files carry a `#`-prefixed metadata header (parameter snapshot,
//! engine version, formula variant, seed), a column-name row, and values in
//! scientific notation with 12 significant digits. Identical inputs produce
//! byte-identical files; nothing time- or locale-dependent is written.

use std::io::Write;
use std::path::Path;

use crate::error::{EngineError, Result};

/// A rectangular result table with ordered metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl OutputTable {
    pub fn new(columns: Vec<String>) -> Self {
        OutputTable {
            metadata: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl std::fmt::Display) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(EngineError::invalid(
                "row",
                format!("row has {} values for {} columns", row.len(), self.columns.len()),
            ));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Render the full CSV document ('\n' line endings, UTF-8).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            // Multi-line metadata values (e.g. the config snapshot) get one
            // comment line each.
            for (i, line) in v.lines().enumerate() {
                if i == 0 {
                    out.push_str(&format!("# {k} = {line}\n"));
                } else {
                    out.push_str(&format!("#   {line}\n"));
                }
            }
            if v.is_empty() {
                out.push_str(&format!("# {k} =\n"));
            }
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// Write a table to disk.
pub fn emit_csv(table: &OutputTable, path: &Path) -> Result<()> {
    let io_err = |source| EngineError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(table.to_csv_string().as_bytes()).map_err(io_err)?;
    Ok(())
}
