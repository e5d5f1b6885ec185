//! Tables rendered as CSV, JSON or aligned text.
//!
//! Numbers are rounded to 12 significant digits once, and both CSV and
//! JSON print that same `f64` in shortest round-trip form, so the two
//! formats carry identical values.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

pub const TOOL: &str = "urb";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Rounded to 12 significant digits; `None` renders empty / `null`.
    Num(Option<f64>),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn num(x: f64) -> Cell {
        Cell::Num(Some(x))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(Some(x)) => round12(*x).to_string(),
            Cell::Num(None) => String::new(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(Some(x)) => {
                serde_json::Number::from_f64(round12(*x)).map_or(Value::Null, Value::Number)
            }
            Cell::Num(None) => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Num(Some(x)) if *x == 0.0 || (1e-3..1e6).contains(&x.abs()) => {
                format!("{x:.6}")
            }
            Cell::Num(Some(x)) => format!("{x:.4e}"),
            Cell::Num(None) => "-".into(),
            other => other.csv(),
        }
    }
}

#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// JSON-only annotations per row (provenance notes, error messages).
    pub notes: Vec<Map<String, Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>, notes: Map<String, Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
        self.notes.push(notes);
    }
}

/// A command's table plus the echo of its inputs.
pub struct Document<'a> {
    pub command: &'a str,
    pub input: Vec<(&'static str, String)>,
    pub table: Table,
}

impl Document<'_> {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
            Format::Text => Ok(self.text()),
        }
    }

    fn header_line(&self) -> String {
        let echo: Vec<String> = self.input.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("# {TOOL} {VERSION} {} {}\n", self.command, echo.join(" "))
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let internal = |e: csv::Error| CliError::Internal(format!("csv encoding failed: {e}"));
        writer.write_record(&self.table.columns).map_err(internal)?;
        for row in &self.table.rows {
            writer
                .write_record(row.iter().map(Cell::csv))
                .map_err(internal)?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| CliError::Internal(format!("csv encoding failed: {e}")))?;
        Ok(self.header_line() + &String::from_utf8_lossy(&body))
    }

    fn json(&self) -> String {
        let input: Map<String, Value> = self
            .input
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .zip(&self.table.notes)
            .map(|(row, notes)| {
                let mut obj: Map<String, Value> = self
                    .table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                obj.extend(notes.clone());
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "input": input,
            "rows": rows,
        });
        // Serializing a Value built from finite numbers and strings cannot fail.
        serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n"
    }

    fn text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .table
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::text).collect())
            .collect();
        let widths: Vec<usize> = self
            .table
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).fold(c.len(), usize::max))
            .collect();
        let line = |items: Vec<&str>| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
                + "\n"
        };
        let mut out = line(self.table.columns.clone());
        for row in &cells {
            out += &line(row.iter().map(String::as_str).collect());
        }
        out
    }
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
