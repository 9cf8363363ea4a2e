//! Deterministic CSV emission: UTF-8, LF line endings, `.` decimal
//! separator, shortest-roundtrip float formatting. Each file is built in
//! memory and written in one shot, so a failing computation never leaves
//! a partial file behind.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

pub struct CsvFile {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvFile {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<S: Into<String>>(&mut self, row: impl IntoIterator<Item = S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        debug_assert_eq!(row.len(), self.header.len(), "ragged CSV row");
        self.rows.push(row);
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Writes `name` under `dir`, creating the directory if needed.
    pub fn write(&self, dir: &Path, name: &str) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, self.to_string())
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Shortest-roundtrip decimal form (Rust's default float Display), which
/// is deterministic and parses back to the identical f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Compact tag for embedding a parameter value in a file name or column
/// header: `.` becomes `p` so the name stays portable.
pub fn name_tag(v: f64) -> String {
    let s = format!("{v}");
    s.replace('.', "p").replace('-', "m")
}
