//! CSV tables and the JSON manifest written for every experiment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// A CSV table built in memory; numbers use a fixed `{:.12e}` format so
/// repeated runs produce identical bytes.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    header: Vec<String>,
    body: String,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            body: String::new(),
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.header.len());
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        let _ = writeln!(self.body, "{}", line.join(","));
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

pub enum Cell {
    Int(i64),
    Num(f64),
    /// Empty cell for a missing value.
    Missing,
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.12e}"),
            Cell::Missing => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

/// Everything an experiment produces.
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub summary: Value,
}

impl Artifacts {
    pub fn new(summary: impl Serialize) -> Self {
        Self {
            tables: Vec::new(),
            summary: serde_json::to_value(summary).unwrap_or(Value::Null),
        }
    }

    pub fn with(mut self, table: Table) -> Self {
        self.tables.push(table);
        self
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    version: &'a str,
    rng: &'a str,
    parameters: &'a BTreeMap<String, Value>,
    summary: &'a Value,
    files: Vec<String>,
}

/// Writes `<name>.csv` for every table and `<experiment>.json`; returns the
/// manifest path.
pub fn write(
    dir: &Path,
    experiment: &str,
    parameters: &BTreeMap<String, Value>,
    artifacts: &Artifacts,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for t in &artifacts.tables {
        let file = format!("{}.csv", t.name);
        fs::write(dir.join(&file), t.render())?;
        files.push(file);
    }
    let manifest = Manifest {
        experiment,
        version: env!("CARGO_PKG_VERSION"),
        rng: "ChaCha8 (rand_chacha::ChaCha8Rng::seed_from_u64), standard normal draws",
        parameters,
        summary: &artifacts.summary,
        files,
    };
    let path = dir.join(format!("{experiment}.json"));
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.into()))?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_renders_fixed_format() {
        let mut t = Table::new("x", &["k", "v", "w"]);
        t.row(&[Cell::Int(3), 0.5.into(), None.into()]);
        assert_eq!(t.render(), "k,v,w\n3,5.000000000000e-1,\n");
    }
}
