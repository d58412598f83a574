//! Report assembly: every report carries its resolved configuration, and
//! renders either as one JSON document or as CSV behind a `# config:` line.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::Format;

#[derive(Clone, Debug, Serialize)]
pub struct CommonConfig {
    pub format: Format,
    pub workers: Option<usize>,
}

/// A finished report plus the exit status to use after emitting it.
pub struct Outcome {
    pub report: Report,
    pub status: u8,
}

impl Outcome {
    pub fn ok(report: Report) -> Self {
        Outcome { report, status: 0 }
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Extra `# key: value` lines after the rows.
    pub footer: Vec<(String, String)>,
}

pub struct Report {
    config: Value,
    body: Map<String, Value>,
    table: Option<Table>,
}

/// Resolved configuration: the command name, its arguments and the global flags.
pub fn config_value<A: Serialize>(command: &str, args: &A, common: &CommonConfig) -> Value {
    let mut config = Map::new();
    config.insert("command".into(), json!(command));
    if let Value::Object(fields) = serde_json::to_value(args).expect("arguments serialize") {
        config.extend(fields);
    }
    config.insert("format".into(), serde_json::to_value(common.format).expect("format serializes"));
    config.insert("workers".into(), json!(common.workers));
    Value::Object(config)
}

impl Report {
    pub fn new(config: Value, body: impl Serialize) -> Self {
        let body = match serde_json::to_value(body).expect("report body serializes") {
            Value::Object(map) => map,
            other => {
                let mut map = Map::new();
                map.insert("result".into(), other);
                map
            }
        };
        Report {
            config,
            body,
            table: None,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    fn json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("config".into(), self.config.clone());
        doc.extend(self.body.clone());
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json renders");
        text.push('\n');
        text
    }

    /// Scalar fields as a single row when no table was attached.
    fn scalar_table(&self) -> anyhow::Result<(Vec<String>, Vec<Vec<String>>)> {
        let mut header = Vec::new();
        let mut row = Vec::new();
        for (key, value) in &self.body {
            let cell = match value {
                Value::Null => String::new(),
                Value::Bool(b) => b.to_string(),
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                Value::Array(_) | Value::Object(_) => continue,
            };
            header.push(key.clone());
            row.push(cell);
        }
        if header.is_empty() {
            bail!("this report has no tabular form; use --format json");
        }
        Ok((header, vec![row]))
    }

    fn csv(&self) -> anyhow::Result<String> {
        let (header, rows, footer) = match &self.table {
            Some(t) => (
                t.header.iter().map(|h| h.to_string()).collect(),
                t.rows.clone(),
                t.footer.clone(),
            ),
            None => {
                let (h, r) = self.scalar_table()?;
                (h, r, Vec::new())
            }
        };
        let mut out = format!("# config: {}\n", serde_json::to_string(&self.config)?);
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&header)?;
        for row in &rows {
            writer.write_record(row)?;
        }
        out.push_str(std::str::from_utf8(&writer.into_inner()?)?);
        for (key, value) in footer {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        Ok(out)
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> anyhow::Result<()> {
        let text = match format {
            Format::Json => self.json(),
            Format::Csv => self.csv()?,
        };
        match path {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                use std::io::Write;
                std::io::stdout().write_all(text.as_bytes()).context("writing to standard output")
            }
        }
    }
}
