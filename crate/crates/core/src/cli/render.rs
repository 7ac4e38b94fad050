//! JSON and CSV rendering.
//!
//! Both formats come from the same `serde_json::Value`, so every number is
//! printed by the same formatter in either.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn to_value<T: Serialize>(report: &T) -> Result<Value> {
    serde_json::to_value(report).map_err(|e| Error::Internal(format!("report serialization: {e}")))
}

/// Flattens nested objects into dotted keys; arrays become JSON text.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            Value::Null => out.push((prefix.to_string(), String::new())),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

fn csv_rows(rows: &[Vec<(String, String)>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    if let Some(first) = rows.first() {
        w.write_record(first.iter().map(|(k, _)| k)).map_err(csv_err)?;
    }
    for row in rows {
        w.write_record(row.iter().map(|(_, v)| v)).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

/// Renders one record.
pub fn render<T: Serialize>(report: &T, format: Format) -> Result<String> {
    let value = to_value(report)?;
    match format {
        Format::Json => Ok(pretty(&value)),
        Format::Csv => csv_rows(&[flatten(&value)]),
    }
}

/// Renders a table: JSON keeps the envelope, CSV prints one line per row
/// with the envelope's scalar fields repeated.
pub fn render_table<T: Serialize>(report: &T, rows_key: &str, format: Format) -> Result<String> {
    let value = to_value(report)?;
    match format {
        Format::Json => Ok(pretty(&value)),
        Format::Csv => {
            let Value::Object(mut map) = value else {
                return Err(Error::Internal("table report is not an object".into()));
            };
            let rows = match map.remove(rows_key) {
                Some(Value::Array(rows)) => rows,
                _ => return Err(Error::Internal(format!("table report lacks '{rows_key}'"))),
            };
            let envelope = flatten(&Value::Object(map));
            let lines: Vec<Vec<(String, String)>> = rows
                .iter()
                .map(|row| envelope.iter().cloned().chain(flatten(row)).collect())
                .collect();
            csv_rows(&lines)
        }
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values always serialize");
    s.push('\n');
    s
}

/// Removes `key` at any depth, for comparisons that ignore timings.
pub fn without_key(value: &Value, key: &str) -> Value {
    match value {
        Value::Object(map) => Value::Object(
            map.iter()
                .filter(|(k, _)| k.as_str() != key)
                .map(|(k, v)| (k.clone(), without_key(v, key)))
                .collect::<Map<_, _>>(),
        ),
        Value::Array(items) => Value::Array(items.iter().map(|v| without_key(v, key)).collect()),
        other => other.clone(),
    }
}
