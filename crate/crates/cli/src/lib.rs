//! Command-line driver: surface catalog, run configuration and reports.

pub mod catalog;
pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use layerspec_core::Error;
use serde::Serialize;

use crate::config::{ConfigError, RunConfig};
use crate::report::{Output, WriteError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Describe,
    Check,
    Totals,
    Certify,
    Spectrum,
    Counterexample,
    Catalog,
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub force: bool,
    /// `describe --defaults`: print the resolved configuration instead of computing
    pub defaults: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    /// one-line summary for stdout
    pub summary: String,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Hypothesis(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Config(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::HypothesisViolation(_) => Failure::Hypothesis(e.to_string()),
            Error::Capability(_) | Error::InvalidInput(_) => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<WriteError> for Failure {
    fn from(e: WriteError) -> Self {
        Failure::Config(e.to_string())
    }
}

const DEFAULT_OUT: &str = "layerspec-out";

pub fn run(inv: &Invocation) -> Result<Outcome, Failure> {
    if inv.command == Command::Catalog {
        return catalog_cmd(inv);
    }
    if inv.command == Command::Describe && inv.defaults {
        let cfg = match &inv.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::defaults_for("hyperbolic-paraboloid")?,
        };
        return Ok(Outcome { summary: cfg.to_toml(), files: vec![] });
    }
    let path = inv.config.as_ref().ok_or_else(|| Failure::Config("--config is required".into()))?;
    let cfg = RunConfig::load(path)?;
    if !cfg.entry().computable() {
        return Err(Error::Capability(format!("{} is documentation only; no subcommand computes it", cfg.surface.name)).into());
    }
    let dir = inv
        .out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let out = Output { dir, force: inv.force };
    match inv.command {
        Command::Describe => commands::describe(&cfg, &out),
        Command::Check => commands::check(&cfg, &out),
        Command::Totals => commands::totals(&cfg, &out),
        Command::Certify => commands::certify_cmd(&cfg, &out),
        Command::Spectrum => commands::spectrum(&cfg, &out),
        Command::Counterexample => commands::counterexample(&cfg, &out),
        Command::Catalog => unreachable!("handled above"),
    }
}

#[derive(Serialize)]
struct CatalogOut {
    entries: Vec<catalog::CatalogEntry>,
}

fn catalog_cmd(inv: &Invocation) -> Result<Outcome, Failure> {
    let entries = catalog::catalog();
    let listing = entries
        .iter()
        .map(|e| {
            let params: Vec<String> = e.parameters.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
            let kind = serde_json::to_value(e.construction).expect("serializes");
            format!("{:<22} {:<9} {}  [{}]", e.name, kind.as_str().unwrap_or(""), e.provenance, params.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n");
    let mut files = Vec::new();
    if let Some(dir) = &inv.out {
        let out = Output { dir: dir.clone(), force: inv.force };
        let mut table = report::Table::new("entries", &["name", "construction", "provenance", "parameters"]);
        for e in &entries {
            let kind = serde_json::to_value(e.construction).expect("serializes");
            let params: Vec<String> = e.parameters.iter().map(|p| format!("{}={}", p.name, report::fmt(p.default))).collect();
            table.push(vec![e.name.into(), kind.as_str().unwrap_or("").into(), e.provenance.into(), params.join(";")]);
        }
        files = out.write("catalog", &serde_json::Value::Null, &CatalogOut { entries }, &[table], std::time::Duration::ZERO)?;
    }
    Ok(Outcome { summary: listing, files })
}
