use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use crate::config::{ExperimentConfig, Format, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};

/// A command's result in both shapes: a flat table for CSV and a JSON
/// value for reports.
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// `key=value` lines appended to CSV output as comments.
    pub trailer: Vec<String>,
    pub json: serde_json::Value,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    config: &'a ExperimentConfig,
    result: &'a serde_json::Value,
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn to_json<T: Serialize>(v: &T) -> CliResult<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| CliError::Output(e.to_string()))
}

/// The JSON envelope `{schema_version, config, result}`.
pub fn envelope(cfg: &ExperimentConfig, result: &serde_json::Value) -> CliResult<String> {
    let env = Envelope { schema_version: SCHEMA_VERSION, config: cfg, result };
    serde_json::to_string_pretty(&env).map(|s| s + "\n").map_err(|e| CliError::Output(e.to_string()))
}

fn render_csv(cfg: &ExperimentConfig, report: &Report) -> CliResult<Vec<u8>> {
    let config = serde_json::to_string(cfg).map_err(|e| CliError::Output(e.to_string()))?;
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n# config={config}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&report.columns).map_err(|e| CliError::Output(e.to_string()))?;
        for row in &report.rows {
            w.write_record(row).map_err(|e| CliError::Output(e.to_string()))?;
        }
        w.flush()?;
    }
    for line in &report.trailer {
        out.extend_from_slice(format!("# {line}\n").as_bytes());
    }
    Ok(out)
}

pub fn write(cfg: &ExperimentConfig, report: &Report) -> CliResult<()> {
    let bytes = match cfg.format {
        Format::Csv => render_csv(cfg, report)?,
        Format::Json => envelope(cfg, &report.json)?.into_bytes(),
    };
    match &cfg.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&bytes)?;
            f.flush()?;
        }
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
