//! Table emission. CSV floats use 17 significant digits so identical runs
//! give identical bytes; JSON mirrors the same table.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `key: value` lines for the header.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::Num(v)).collect());
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }
}

fn header_lines(command: &str, cfg: &RunConfig, table: &Table) -> Vec<String> {
    let mut lines = vec![
        format!("bathforge {} {command}", env!("CARGO_PKG_VERSION")),
        format!("config: {}", serde_json::to_string(cfg).expect("config serializes")),
    ];
    lines.extend(table.notes.iter().map(|(k, v)| format!("{k}: {v}")));
    lines
}

pub fn write_csv<W: Write>(out: &mut W, command: &str, cfg: &RunConfig, table: &Table) -> io::Result<()> {
    for line in header_lines(command, cfg, table) {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let fields: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => format_float(*v),
                Cell::Text(s) => s.clone(),
            })
            .collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn to_json(command: &str, cfg: &RunConfig, table: &Table) -> Value {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|c| match c {
                        // non-finite values become null
                        Cell::Num(v) => json!(v),
                        Cell::Text(s) => json!(s),
                    })
                    .collect(),
            )
        })
        .collect();
    let notes: serde_json::Map<String, Value> = table.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "tool": "bathforge",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg,
        "notes": notes,
        "columns": table.columns,
        "rows": rows,
    })
}

/// Writes `table` into `dir` in the configured format and returns the path.
pub fn emit(dir: &Path, command: &str, cfg: &RunConfig, table: &Table) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (ext, bytes) = match cfg.output.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&mut buf, command, cfg, table)?;
            ("csv", buf)
        }
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(&to_json(command, cfg, table)).map_err(io::Error::other)?;
            buf.push(b'\n');
            ("json", buf)
        }
    };
    let path = dir.join(format!("{}.{ext}", table.name));
    fs::write(&path, bytes)?;
    Ok(path)
}
