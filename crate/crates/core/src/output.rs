//! Tables and reports as CSV or JSON.
//!
//! A table is written as `<name>.csv` (header row, one row per point) or
//! `<name>.json` (array of objects keyed by column) under the output
//! directory, or to stdout when no directory is given.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::mc::EstimateReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParams(format!(
                "unknown format {other:?}, expected csv or json"
            ))),
        }
    }
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Self {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width in table {}",
            self.name
        );
        self.rows.push(row);
    }

    /// Values of one column as numbers; non-numeric cells are skipped.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().filter_map(|r| r[idx].as_f64()).collect())
    }

    /// Estimate reports as a table with the standard report columns.
    pub fn from_reports(name: &str, reports: &[EstimateReport]) -> Self {
        let mut table = Self::new(name, &["quantity", "value", "se", "target", "z"]);
        for r in reports {
            table.push(vec![
                r.quantity.clone().into(),
                num(r.value),
                num(r.se),
                r.target.map_or(Value::Null, num),
                r.z.map_or(Value::Null, num),
            ]);
        }
        table
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Output(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned())
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// A number cell. Non-finite values become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Output(e.to_string())
}

/// Fails unless `probs` sums to one within `tol`.
pub fn ensure_normalized(table: &str, probs: &[f64], tol: f64) -> Result<()> {
    let deviation = probs.iter().sum::<f64>() - 1.0;
    if deviation.abs() > tol || probs.iter().any(|p| p.is_nan() || *p < -tol) {
        return Err(Error::Normalization {
            table: table.to_string(),
            deviation,
        });
    }
    Ok(())
}

/// Something a command produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Table(Table),
    /// A structured document, written as JSON in either format.
    Document {
        name: String,
        value: Value,
    },
}

impl Artifact {
    pub fn document<T: Serialize>(name: &str, value: &T) -> Result<Self> {
        Ok(Artifact::Document {
            name: name.to_string(),
            value: serde_json::to_value(value).map_err(|e| Error::Output(e.to_string()))?,
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Artifact::Table(t) => &t.name,
            Artifact::Document { name, .. } => name,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match (self, format) {
            (Artifact::Table(t), Format::Csv) => t.to_csv(),
            (Artifact::Table(t), Format::Json) => pretty(&t.to_json()),
            (Artifact::Document { value, .. }, _) => pretty(value),
        }
    }
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub struct Sink {
    pub format: Format,
    pub dir: Option<PathBuf>,
}

impl Sink {
    fn path_for(&self, dir: &Path, artifact: &Artifact) -> PathBuf {
        let ext = match artifact {
            Artifact::Document { .. } => "json",
            Artifact::Table(_) => self.format.extension(),
        };
        dir.join(format!("{}.{ext}", artifact.name()))
    }

    /// Writes every artifact; returns the files written (empty for stdout).
    pub fn write_all(&self, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
        let io = |e: std::io::Error| Error::Output(e.to_string());
        let mut written = Vec::new();
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(io)?;
                for a in artifacts {
                    let path = self.path_for(dir, a);
                    fs::write(&path, a.render(self.format)?).map_err(io)?;
                    written.push(path);
                }
            }
            None => {
                let mut out = std::io::stdout().lock();
                // a closed pipe (`| head`) ends the output quietly
                let io = |e: std::io::Error| match e.kind() {
                    std::io::ErrorKind::BrokenPipe => Error::Output(String::new()),
                    _ => Error::Output(e.to_string()),
                };
                for (idx, a) in artifacts.iter().enumerate() {
                    if artifacts.len() > 1 {
                        if idx > 0 {
                            writeln!(out).map_err(io)?;
                        }
                        writeln!(out, "# {}", a.name()).map_err(io)?;
                    }
                    out.write_all(a.render(self.format)?.as_bytes())
                        .map_err(io)?;
                }
            }
        }
        Ok(written)
    }
}
