//! Rendering of reports as JSON or CSV.
//!
//! Library types serialize rationals as `"n/d"` strings. On the way out
//! every such string becomes `{"exact": "n/d", "decimal": x}` in JSON, and a
//! row with decimal, numerator and denominator columns in CSV.

use std::fmt::Write as _;

use natdensity::Rat;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const SCHEMA_VERSION: u32 = 1;

fn as_rational(s: &str) -> Option<Rat> {
    let (n, d) = s.split_once('/')?;
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !digits(n.strip_prefix('-').unwrap_or(n)) || !digits(d) {
        return None;
    }
    s.parse().ok()
}

pub fn rat_json(r: &Rat) -> Value {
    json!({"exact": r.fraction_string(), "decimal": r.decimal12()})
}

fn expand(v: Value) -> Value {
    match v {
        Value::String(s) => match as_rational(&s) {
            Some(r) => rat_json(&r),
            None => Value::String(s),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(expand).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, expand(v))).collect()),
        other => other,
    }
}

/// `{"schema_version": 1, "command": …, <fields of body>}`
pub fn envelope(command: &str, body: &impl Serialize) -> anyhow::Result<Value> {
    let mut top = Map::new();
    top.insert("schema_version".into(), json!(SCHEMA_VERSION));
    top.insert("command".into(), json!(command));
    match expand(serde_json::to_value(body)?) {
        Value::Object(fields) => top.extend(fields),
        other => {
            top.insert("result".into(), other);
        }
    }
    Ok(Value::Object(top))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) if !(map.contains_key("exact") && map.contains_key("decimal")) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (idx, item) in items.iter().enumerate() {
                flatten(&key(&idx.to_string()), item, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

/// Flattened `field,value,num,den` rows of an enveloped report.
pub fn report_csv(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let mut out = String::from("field,value,num,den\n");
    for (field, value) in rows {
        let cells = match &value {
            Value::Object(r) => {
                let exact = r["exact"].as_str().unwrap_or_default();
                let (n, d) = exact.split_once('/').unwrap_or((exact, "1"));
                [r["decimal"].to_string(), n.to_string(), d.to_string()]
            }
            Value::String(s) => [s.clone(), String::new(), String::new()],
            Value::Null => [String::new(), String::new(), String::new()],
            Value::Array(items) => {
                let joined: Vec<String> = items.iter().map(|i| i.to_string()).collect();
                [joined.join(" "), String::new(), String::new()]
            }
            other => [other.to_string(), String::new(), String::new()],
        };
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&field),
            csv_field(&cells[0]),
            cells[1],
            cells[2]
        );
    }
    out
}

pub fn render(format: Format, command: &str, body: &impl Serialize) -> anyhow::Result<String> {
    let report = envelope(command, body)?;
    Ok(match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
        Format::Csv => report_csv(&report),
    })
}
