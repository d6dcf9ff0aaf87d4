//! Tabular output: CSV with a `#` manifest header, a JSON mirror, and a
//! sidecar manifest that carries the wall-clock timestamp.
//!
//! The data files themselves never contain the timestamp, so identical flags
//! give byte-identical CSV and JSON.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use qclassical_core::SeriesTolerance;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub const SCHEMA: &str = "qclassical-table/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Aligned plain text; criterion only.
    Table,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: &'static str,
    pub schema: &'static str,
    /// Ordered key/value pairs.
    pub parameters: Vec<(String, String)>,
    pub tolerances: SeriesTolerance,
    /// Column or quantity → unit.
    pub units: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str, tolerances: SeriesTolerance) -> Self {
        Self {
            command: command.to_string(),
            tool_version: TOOL_VERSION,
            schema: SCHEMA,
            parameters: Vec::new(),
            tolerances,
            units: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn unit(mut self, what: &str, unit: &str) -> Self {
        self.units.push((what.to_string(), unit.to_string()));
        self
    }

    fn pairs(items: &[(String, String)]) -> String {
        items
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn csv_header(&self) -> String {
        let t = &self.tolerances;
        let mut s = String::new();
        let _ = writeln!(s, "# qclassical {}", self.tool_version);
        let _ = writeln!(s, "# schema: {}", self.schema);
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# parameters: {}", Self::pairs(&self.parameters));
        let _ = writeln!(
            s,
            "# tolerances: rel_eps={:e} max_terms={} tail_ratio_guard={}",
            t.rel_eps, t.max_terms, t.tail_ratio_guard
        );
        let _ = writeln!(s, "# units: {}", Self::pairs(&self.units));
        s
    }

    fn to_json(&self) -> Value {
        let obj = |items: &[(String, String)]| {
            Value::Object(
                items
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect(),
            )
        };
        json!({
            "command": self.command,
            "tool_version": self.tool_version,
            "schema": self.schema,
            "parameters": obj(&self.parameters),
            "tolerances": self.tolerances,
            "units": obj(&self.units),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Shortest round-trip scientific notation; the same bits always print the
/// same way.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub manifest: Manifest,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// `key=value` lines written after the rows.
    pub footer: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(manifest: Manifest, columns: &[&str]) -> Self {
        Self {
            manifest,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.manifest.csv_header();
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        for (k, v) in &self.footer {
            let _ = writeln!(s, "# {k}={v}");
        }
        for note in &self.notes {
            let _ = writeln!(s, "# note: {note}");
        }
        s
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    m.insert(c.clone(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        let summary: Map<String, Value> = self
            .footer
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let doc = json!({
            "manifest": self.manifest.to_json(),
            "columns": self.columns,
            "records": records,
            "summary": summary,
            "notes": self.notes,
        });
        let mut out = serde_json::to_string_pretty(&doc).expect("table serializes");
        out.push('\n');
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
            Format::Table => self.to_text(),
        }
    }

    /// Aligned columns for terminals.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Num(v) => format!("{v:.6e}"),
                        other => other.csv(),
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([self.columns[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut s = line(&self.columns);
        s.push('\n');
        for r in &cells {
            s.push_str(&line(r));
            s.push('\n');
        }
        for (k, v) in &self.footer {
            let _ = writeln!(s, "{k}: {v}");
        }
        for note in &self.notes {
            let _ = writeln!(s, "note: {note}");
        }
        s
    }
}

/// Path of the sidecar manifest for a data file.
pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    data.with_file_name(name)
}

/// Manifest plus the run's timestamp and output files.
pub fn write_sidecar(
    manifest: &Manifest,
    outputs: &[&Path],
    sidecar: &Path,
) -> Result<(), CliError> {
    let mut doc = manifest.to_json();
    doc["timestamp"] = json!(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    doc["outputs"] = json!(outputs
        .iter()
        .map(|p| p
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned())
        .collect::<Vec<_>>());
    let text = serde_json::to_string_pretty(&doc).expect("manifest serializes");
    write_file(sidecar, &(text + "\n"))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes to `out` with a sidecar manifest, or to stdout without one.
pub fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = table.render(format);
    match out {
        Some(path) => {
            write_file(path, &text)?;
            write_sidecar(&table.manifest, &[path], &sidecar_path(path))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
