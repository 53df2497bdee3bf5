//! Result tables and their CSV / JSON / matrix-file forms.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Written as an empty CSV field and `null` in JSON.
    Missing,
}

impl Cell {
    /// 17 significant digits, enough for a lossless round trip.
    pub fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON has no NaN or infinity.
            Cell::Num(v) if !v.is_finite() => Value::String(v.to_string()),
            other => serde_json::to_value(other).expect("cell serializes"),
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    fn json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

/// A dense matrix to be written in the plain-text dump format.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDump {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub data: Vec<f64>,
}

impl MatrixDump {
    pub fn from_fn(name: &str, rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        MatrixDump {
            name: name.to_string(),
            rows,
            cols,
            data,
        }
    }

    /// `# rows cols`, then `# config <hash>`, then one line per row.
    pub fn render(&self, hash: &str) -> String {
        let mut s = format!("# {} {}\n# config {hash}\n", self.rows, self.cols);
        for r in self.data.chunks(self.cols.max(1)) {
            let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Everything a command produces.
#[derive(Debug, Clone, Default)]
pub struct ExperimentResult {
    pub tables: Vec<Table>,
    pub matrices: Vec<MatrixDump>,
    /// Scalar results echoed in the manifest.
    pub summary: serde_json::Map<String, Value>,
}

impl ExperimentResult {
    pub fn note(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.to_string(), serde_json::to_value(v).expect("summary value serializes"));
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// CSV text of a table with a trailing `config_hash` column.
pub fn render_csv(table: &Table, hash: &str) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = table.columns.clone();
    header.push("config_hash".into());
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec: Vec<String> = row.iter().map(Cell::csv).collect();
        rec.push(hash.to_string());
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
}

pub fn manifest(cfg: &ExperimentConfig, res: &ExperimentResult, status: &str) -> Value {
    let tables: serde_json::Map<String, Value> = res.tables.iter().map(|t| (t.name.clone(), t.json())).collect();
    let files: Vec<String> = res
        .tables
        .iter()
        .map(|t| format!("{}.csv", t.name))
        .chain(res.matrices.iter().map(|m| format!("{}.txt", m.name)))
        .collect();
    json!({
        "command": cfg.command.name(),
        "status": status,
        "config_hash": cfg.hash(),
        "config": cfg,
        "summary": res.summary,
        "files": files,
        "tables": tables,
    })
}

/// Writes every table, matrix and the manifest into `dir`.
pub fn write_all(dir: &Path, cfg: &ExperimentConfig, res: &ExperimentResult, status: &str) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let hash = cfg.hash();
    let mut written = Vec::new();
    for t in &res.tables {
        let path = dir.join(format!("{}.csv", t.name));
        fs::write(&path, render_csv(t, &hash)?)?;
        written.push(path);
    }
    for m in &res.matrices {
        let path = dir.join(format!("{}.txt", m.name));
        fs::write(&path, m.render(&hash))?;
        written.push(path);
    }
    let path = dir.join("manifest.json");
    let mut f = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, &manifest(cfg, res, status))?;
    f.write_all(b"\n")?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_through_csv() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = Cell::Num(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn matrix_header() {
        let m = MatrixDump::from_fn("m", 2, 3, |i, j| (i * 3 + j) as f64);
        let text = m.render("abc");
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# 2 3"));
        assert_eq!(lines.next(), Some("# config abc"));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn csv_quotes_and_hash_column() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec!["x,y".into(), Cell::Missing]);
        let s = render_csv(&t, "h").unwrap();
        assert_eq!(s, "a,b,config_hash\n\"x,y\",,h\n");
    }
}
