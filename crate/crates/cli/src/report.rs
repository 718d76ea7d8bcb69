//! JSON reports, CSV tables and the timing sidecar.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// A reported number with its error estimate, or marked exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Num {
    Estimate { value: f64, error: f64 },
    Exact { value: f64, exact: bool },
}

impl Num {
    pub fn est(value: f64, error: f64) -> Self {
        Num::Estimate { value, error: error.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Num::Exact { value, exact: true }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Num::Estimate { value, .. } | Num::Exact { value, .. } => value,
        }
    }
}

/// An integer in a report; counts are exact by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Count {
    pub value: u64,
    pub exact: bool,
}

impl From<usize> for Count {
    fn from(n: usize) -> Self {
        Count { value: n as u64, exact: true }
    }
}

impl From<u32> for Count {
    fn from(n: u32) -> Self {
        Count { value: n.into(), exact: true }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, I: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub version: &'a str,
    pub inputs: &'a I,
    pub result: &'a R,
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip formatting, so tables are reproducible to the bit.
pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error("{0} exists; pass --force to overwrite")]
    Exists(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> WriteError + '_ {
    move |source| WriteError::Io { path: path.display().to_string(), source }
}

pub struct Output {
    pub dir: PathBuf,
    pub force: bool,
}

impl Output {
    fn target(&self, file: &str) -> Result<PathBuf, WriteError> {
        let p = self.dir.join(file);
        if p.exists() && !self.force {
            return Err(WriteError::Exists(p.display().to_string()));
        }
        Ok(p)
    }

    /// Writes `<command>.json`, one `<command>_<table>.csv` per table and the
    /// `<command>.timing.json` sidecar. Returns the paths written.
    pub fn write<I: Serialize, R: Serialize>(
        &self,
        command: &str,
        inputs: &I,
        result: &R,
        tables: &[Table],
        elapsed: Duration,
    ) -> Result<Vec<PathBuf>, WriteError> {
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let json = self.target(&format!("{command}.json"))?;
        let csvs = tables
            .iter()
            .map(|t| self.target(&format!("{command}_{}.csv", t.name)))
            .collect::<Result<Vec<_>, _>>()?;
        let timing = self.target(&format!("{command}.timing.json"))?;

        let env = Envelope { schema_version: SCHEMA_VERSION, command, version: env!("CARGO_PKG_VERSION"), inputs, result };
        let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
        text.push('\n');
        fs::write(&json, text).map_err(io(&json))?;
        for (t, path) in tables.iter().zip(&csvs) {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(&t.header)?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            w.flush().map_err(io(path))?;
        }
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let side = serde_json::json!({ "command": command, "elapsed_seconds": elapsed.as_secs_f64(), "finished_unix": stamp });
        fs::write(&timing, format!("{side:#}\n")).map_err(io(&timing))?;

        let mut out = vec![json];
        out.extend(csvs);
        out.push(timing);
        Ok(out)
    }
}
