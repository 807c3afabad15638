//! Result documents and their CSV / JSON renderings.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(x) => json!(x),
            Cell::I(i) => json!(i),
            Cell::B(b) => json!(b),
            Cell::S(s) => json!(s),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// One command's output: configuration, metadata and a table.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub config: Value,
    pub metadata: Map<String, Value>,
    pub table: Table,
}

impl Document {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self.table.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        json!({
            "schema": SCHEMA,
            "version": crate::VERSION,
            "config": self.config,
            "metadata": self.metadata,
            "columns": self.table.columns,
            "rows": rows,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = format!("# metacav {}\n# schema: {SCHEMA}\n", crate::VERSION);
                s += &format!("# config: {}\n", self.config);
                s += &format!("# metadata: {}\n", Value::Object(self.metadata.clone()));
                s += &self.table.columns.join(",");
                s.push('\n');
                for r in &self.table.rows {
                    s += &r.iter().map(Cell::csv).collect::<Vec<_>>().join(",");
                    s.push('\n');
                }
                s
            }
        }
    }
}
