//! Results tables and run manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

/// One CSV file: a header row and rows of already-formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, command: &str) -> String {
        let mut s = String::new();
        writeln!(s, "# schema={SCHEMA}").unwrap();
        writeln!(s, "# command={command}").unwrap();
        writeln!(s, "{}", self.header.join(",")).unwrap();
        for r in &self.rows {
            writeln!(s, "{}", r.join(",")).unwrap();
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }
}

/// Shortest round-trip decimal form; NaN is left blank and negative zero prints as 0.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub schema: u32,
    pub command: &'a str,
    pub version: &'a str,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub threads: usize,
    pub outputs: Vec<String>,
    /// Numerical guards that tripped; empty on a clean run.
    pub guards: Vec<String>,
    pub diagnostics: BTreeMap<String, String>,
    pub config: &'a RunConfig,
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(path.to_path_buf())
}
