//! Report emission: pretty JSON, CSV or plain text.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use multinorm::{Method, NormResult, Result};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command produced.
pub struct Report {
    pub command: String,
    pub seed: u64,
    /// `closed_form`, `exhaustive`, ... for the headline value.
    pub method: String,
    pub gap: f64,
    pub result: Value,
    pub table: Option<Table>,
    /// `false` when a checked inequality failed.
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, seed: u64, method: impl Into<String>, gap: f64, result: &impl Serialize) -> Self {
        Report {
            command: command.into(),
            seed,
            method: method.into(),
            gap,
            result: serde_json::to_value(result).expect("reports serialize"),
            table: None,
            passed: true,
        }
    }

    pub fn from_norm(command: &str, seed: u64, r: &NormResult) -> Self {
        Report::new(command, seed, method_name(r.method), r.gap, r)
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn passed(mut self, passed: bool) -> Self {
        self.passed = passed;
        self
    }

    fn envelope(&self) -> Value {
        json!({
            "command": self.command,
            "seed": self.seed,
            "method": self.method,
            "gap": self.gap,
            "passed": self.passed,
            "result": self.result,
        })
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.envelope())?;
                s.push('\n');
                s
            }
            Format::Csv => {
                let table = self.table.clone().unwrap_or_else(|| scalar_table(&self.envelope()));
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
                let io = |e: csv::Error| multinorm::Error::Io(std::io::Error::other(e));
                w.write_record(&table.headers).map_err(io)?;
                for row in &table.rows {
                    w.write_record(row).map_err(io)?;
                }
                String::from_utf8(w.into_inner().map_err(|e| multinorm::Error::Io(e.into_error()))?).expect("utf-8 input")
            }
            Format::Text => {
                let mut s = format!("{}: {} (method {}, gap {})\n", self.command, if self.passed { "ok" } else { "FAILED" }, self.method, self.gap);
                if let Value::Object(map) = &self.result {
                    for (k, v) in map {
                        match v {
                            Value::Object(_) | Value::Array(_) => {}
                            Value::String(text) => s.push_str(&format!("  {k}: {text}\n")),
                            other => s.push_str(&format!("  {k}: {other}\n")),
                        }
                    }
                }
                s
            }
        })
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

pub fn method_name(m: Method) -> String {
    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Shortest round-trip form, with an exponent for very small or large values.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// `field,value` rows for the scalar fields of the envelope and result.
fn scalar_table(envelope: &Value) -> Table {
    let mut t = Table::new(&["field", "value"]);
    let mut add = |prefix: &str, map: &serde_json::Map<String, Value>| {
        for (k, v) in map {
            let cell = match v {
                Value::String(s) => s.clone(),
                Value::Number(_) | Value::Bool(_) => v.to_string(),
                _ => continue,
            };
            t.push(vec![format!("{prefix}{k}"), cell]);
        }
    };
    if let Value::Object(map) = envelope {
        add("", map);
        if let Some(Value::Object(result)) = map.get("result") {
            add("result.", result);
        }
    }
    t
}
