//! The fixed report envelope and its JSON / flattened-CSV renderings.

use gnorm::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::cli::{Format, OutArgs};

/// Every subcommand emits this envelope. Nested maps serialize with sorted
/// keys and all randomness is seed-keyed, so a repeated invocation with the
/// same argument vector produces byte-identical output.
#[derive(Serialize, Debug)]
pub struct Report {
    /// Where the matrix came from (source kind, spec or path, dimensions).
    pub input: Value,
    /// The exponent pair, or null for subcommands that take none.
    pub pq: Value,
    /// Subcommand-specific payload.
    pub results: Value,
    /// The seed that keyed any randomness, or null for deterministic runs.
    pub seed: Option<u64>,
    /// Crate version stamped into every report.
    pub version: &'static str,
}

impl Report {
    pub fn new(input: Value, pq: Value, results: Value, seed: Option<u64>) -> Self {
        Report {
            input,
            pq,
            results,
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(self)
                    .expect("report serialization cannot fail");
                text.push('\n');
                text
            }
            Format::Csv => {
                let value = serde_json::to_value(self).expect("report serialization cannot fail");
                let mut rows = Vec::new();
                flatten("", &value, &mut rows);
                let mut text = String::new();
                for (key, val) in rows {
                    text.push_str(&csv_field(&key));
                    text.push(',');
                    text.push_str(&csv_field(&val));
                    text.push('\n');
                }
                text
            }
        }
    }

    /// Writes the report to `--out` or standard output.
    pub fn emit(&self, out: &OutArgs) -> Result<()> {
        let text = self.render(out.format);
        match &out.out {
            Some(path) => std::fs::write(path, text).map_err(|e| {
                Error::Config(format!("cannot write report to '{}': {e}", path.display()))
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Depth-first flattening: nested keys join with '.', array entries use their
/// index. Leaves become one `key,value` row each.
fn flatten(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&join(k), v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), v, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => rows.push((prefix.to_string(), n.to_string())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
    }
}

fn csv_field(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
