//! CSV channel files.

use crate::error::{CliError, Result};
use std::path::{Path, PathBuf};

/// Shortest round-trip decimal form. Plain notation in the usual range,
/// exponent notation outside it so tiny and huge values stay short.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One channel group: a `t` column followed by named value columns.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = String>) -> Self {
        let mut header = vec!["t".to_string()];
        header.extend(columns);
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, t: f64, values: impl IntoIterator<Item = f64>) {
        let mut row = vec![t];
        row.extend(values);
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |source: std::io::Error| CliError::Io { path: path.to_path_buf(), source };
        let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
        w.write_record(&self.header).map_err(|e| io(e.into()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| fmt_f64(x))).map_err(|e| io(e.into()))?;
        }
        w.flush().map_err(io)
    }
}

/// `prefix_1, …, prefix_n`.
pub fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |k| format!("{prefix}_{k}"))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    Ok(dir.to_path_buf())
}
