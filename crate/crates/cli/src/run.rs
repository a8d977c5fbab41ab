use std::fmt;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

/// Error in the invocation itself (bad flags, missing paths). Exits with 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Everything that determines a run's output; embedded in every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub args: Vec<String>,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("run config serializes")
    }

    pub fn line(&self) -> String {
        serde_json::to_string(self).expect("run config serializes")
    }

    /// Writes `run.json` into an output directory.
    pub fn write_sidecar(&self, dir: &Path, report: &Value) -> Result<()> {
        let doc = json!({ "run": self.to_json(), "report": report });
        let path = dir.join("run.json");
        std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

/// A command's result: a JSON document and the same content as CSV rows.
pub struct Report {
    pub json: Value,
    pub csv: String,
    /// Per-item failures; any makes the exit code 1.
    pub failures: usize,
}

impl Report {
    pub fn table<T: Serialize>(rows: &[T], extra: Value, failures: usize) -> Result<Report> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let csv = String::from_utf8(w.into_inner()?)?;
        let mut json = json!({ "rows": rows });
        if let (Value::Object(m), Value::Object(extra)) = (&mut json, extra) {
            m.extend(extra);
        }
        Ok(Report { json, csv, failures })
    }

    pub fn render(&self, run: &RunConfig, format: Format) -> String {
        match format {
            Format::Json => {
                let doc = json!({ "run": run.to_json(), "result": self.json });
                serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
            }
            Format::Csv => format!("# run: {}\n{}", run.line(), self.csv),
        }
    }

    /// Writes the rendered report to `out`, or stdout.
    pub fn emit(&self, run: &RunConfig, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(run, format);
        match out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
        }
    }
}
