use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;
use wardlab::density::format_ratio;
use wardlab::{AnalysisConfig, Status, Verdict};

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CommandEcho {
    pub name: &'static str,
    pub args: Vec<String>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfigEcho {
    pub horizon: u64,
    pub epsilon_grid: Vec<f64>,
    pub pass_tolerance: f64,
    pub fail_threshold: f64,
    pub lambda_grid: Vec<f64>,
}

impl From<&AnalysisConfig> for ConfigEcho {
    fn from(c: &AnalysisConfig) -> Self {
        Self {
            horizon: c.horizon,
            epsilon_grid: c.epsilon_grid.clone(),
            pass_tolerance: c.pass_tolerance,
            fail_threshold: c.fail_threshold,
            lambda_grid: c.lambda_grid.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema_version: &'static str,
    pub command: CommandEcho,
    pub config: ConfigEcho,
    pub results: Vec<Value>,
    pub timestamp: String,
}

/// One CSV line.
#[derive(Debug)]
pub struct Row {
    pub class: String,
    pub status: Status,
    pub epsilon: Option<f64>,
    pub final_density: Option<String>,
    pub horizon: u64,
}

/// What a subcommand hands back for rendering.
pub struct Outcome {
    pub results: Vec<Value>,
    /// `None` for commands without verdict rows.
    pub rows: Option<Vec<Row>>,
    pub text: String,
    /// Every verdict decisive and every implication consistent.
    pub settled: bool,
}

/// The verdict itself, then its leaves in descending epsilon order; leaves
/// of a two-sided composite repeat each epsilon once per side.
pub fn verdict_rows(label: &str, v: &Verdict) -> Vec<Row> {
    let row = |v: &Verdict| Row {
        class: label.to_owned(),
        status: v.status,
        epsilon: v.epsilon,
        final_density: v.trace.last().map(|c| format_ratio(c.density())),
        horizon: v.horizon,
    };
    let mut rows = vec![row(v)];
    if !v.parts.is_empty() {
        // A composite summary row carries only the overall status.
        rows[0].epsilon = None;
        rows[0].final_density = None;
        let mut leaves = v.leaves();
        leaves.sort_by(|a, b| b.epsilon.unwrap_or(f64::INFINITY).total_cmp(&a.epsilon.unwrap_or(f64::INFINITY)));
        rows.extend(leaves.into_iter().map(row));
    }
    rows
}

pub fn render(report: &Report, outcome: &Outcome, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let Some(rows) = &outcome.rows else {
                bail!("csv output is only available for classify, limit, density and lattice");
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            // Written explicitly so the header is present even with no rows.
            w.write_record(["class", "status", "epsilon", "finalDensity", "horizon"])?;
            for r in rows {
                w.write_record([
                    r.class.clone(),
                    r.status.to_string(),
                    r.epsilon.map(|e| e.to_string()).unwrap_or_default(),
                    r.final_density.clone().unwrap_or_default(),
                    r.horizon.to_string(),
                ])?;
            }
            Ok(w.into_inner()?)
        }
        Format::Text => Ok(outcome.text.clone().into_bytes()),
    }
}

/// Writes to `DIR/<command>.<ext>` or to stdout.
pub fn emit(bytes: &[u8], command: &str, format: Format, out: Option<&Path>) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let path = dir.join(format!("{command}.{}", format.extension()));
            fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}
