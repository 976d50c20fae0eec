use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Empty,
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits, parses back to the same value
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Empty => String::new(),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) => json!(v),
            Cell::Empty => Value::Null,
        }
    }
}

/// Self-describing table: metadata, column names and rows.
pub struct Table {
    pub meta: Vec<(&'static str, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        Self {
            meta: vec![
                ("version", json!(env!("CARGO_PKG_VERSION"))),
                ("command", json!(command)),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &'static str, value: impl Serialize) {
        self.meta.push((key, serde_json::to_value(value).expect("serializable")));
    }

    pub fn write(&self, out: &mut impl Write, format: Format) -> io::Result<()> {
        match format {
            Format::Csv => {
                let header: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={}", flat(v))).collect();
                writeln!(out, "# pfcme {}", header.join(" "))?;
                writeln!(out, "{}", self.columns.join(","))?;
                let mut line = String::new();
                for row in &self.rows {
                    line.clear();
                    for (i, c) in row.iter().enumerate() {
                        if i > 0 {
                            line.push(',');
                        }
                        line.push_str(&c.csv());
                    }
                    writeln!(out, "{line}")?;
                }
            }
            Format::Json => {
                let mut doc: Map<String, Value> =
                    self.meta.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
                doc.insert("columns".into(), json!(self.columns));
                let rows: Vec<Value> =
                    self.rows.iter().map(|r| Value::Array(r.iter().map(|c| c.json()).collect())).collect();
                doc.insert("rows".into(), Value::Array(rows));
                serde_json::to_writer(&mut *out, &doc)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// Header-comment rendering of a metadata value, free of spaces.
fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.replace(' ', "_"),
        Value::Array(items) => items.iter().map(flat).collect::<Vec<_>>().join(","),
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}:{}", flat(v))).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}
