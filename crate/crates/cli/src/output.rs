//! Deterministic result emission: a JSON envelope carrying the tool version,
//! the command line and the seed, or a CSV rendering with the same metadata
//! as comment lines.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use ymt_core::error::{Result, YmtError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'a str,
    command: String,
    seed: u64,
    result: T,
}

/// Rows for tabular CSV output: a header and the data lines.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Emitter {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub command: String,
}

impl Emitter {
    fn write_all(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| YmtError::input(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| YmtError::input(format!("stdout: {e}")))
            }
        }
    }

    /// Emit a result; `table` supplies the CSV rendering when the caller has
    /// a natural tabular form, otherwise the JSON is flattened to key,value
    /// rows.
    pub fn emit<T: Serialize>(&self, result: &T, table: Option<Table>) -> Result<()> {
        match self.format {
            Format::Json => {
                let env = Envelope {
                    version: env!("CARGO_PKG_VERSION"),
                    command: self.command.clone(),
                    seed: self.seed,
                    result,
                };
                let text = serde_json::to_string_pretty(&env)
                    .map_err(|e| YmtError::input(format!("serialize: {e}")))?;
                self.write_all(&format!("{text}\n"))
            }
            Format::Csv => {
                let mut text = String::new();
                text.push_str(&format!("# version={}\n", env!("CARGO_PKG_VERSION")));
                text.push_str(&format!("# command={}\n", self.command));
                text.push_str(&format!("# seed={}\n", self.seed));
                match table {
                    Some(t) => {
                        text.push_str(&t.header.join(","));
                        text.push('\n');
                        for row in t.rows {
                            text.push_str(&row.join(","));
                            text.push('\n');
                        }
                    }
                    None => {
                        let value = serde_json::to_value(result)
                            .map_err(|e| YmtError::input(format!("serialize: {e}")))?;
                        text.push_str("key,value\n");
                        let mut rows = Vec::new();
                        flatten("", &value, &mut rows);
                        for (k, v) in rows {
                            text.push_str(&format!("{k},{v}\n"));
                        }
                    }
                }
                self.write_all(&text)
            }
        }
    }
}

fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar_to_string(other))),
    }
}

fn scalar_to_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
