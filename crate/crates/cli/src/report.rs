use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// Current CSV layout; written as `# schema=1` on the first line.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={SCHEMA}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub checks: Vec<Check>,
    /// Command-specific numbers for the summary.
    pub results: Value,
}

impl Report {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

pub struct Written {
    pub csv: PathBuf,
    pub summary: PathBuf,
}

pub fn summary_json(config: &Value, seed: u64, report: &Report, seconds: f64) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail }))
        .collect();
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": config,
        "status": if report.first_failure().is_none() { "ok" } else { "check_failed" },
        "checks": checks,
        "results": report.results,
        "timing": { "total_seconds": seconds },
    })
}

pub fn write_outputs(dir: &Path, name: &str, report: &Report, summary: &Value) -> io::Result<Written> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    let json_path = dir.join(format!("{name}.summary.json"));
    std::fs::write(&csv, report.table.to_csv())?;
    let mut text = serde_json::to_string_pretty(summary).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(&json_path, text)?;
    Ok(Written {
        csv,
        summary: json_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["k", "x", "ok", "note"]);
        t.push(vec![3usize.into(), 0.1.into(), true.into(), Cell::Empty]);
        assert_eq!(t.to_csv(), "# schema=1\nk,x,ok,note\n3,1.0000000000000001e-1,true,\n");
    }

    #[test]
    fn floats_round_trip() {
        for v in [std::f64::consts::PI, 1e-300, -2.5e17, 0.1 + 0.2] {
            let s = Cell::Float(v).render();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
