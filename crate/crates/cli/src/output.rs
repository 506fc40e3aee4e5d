//! CSV and JSON documents with a provenance header and 15 significant digits.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// What a subcommand produces: one record, or a table with optional
/// summary fields.
pub enum Document {
    Record(Map<String, Value>),
    Table { columns: Vec<String>, rows: Vec<Map<String, Value>>, summary: Map<String, Value> },
}

/// `x` with 15 significant digits, trailing zeros removed.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let fixed = format!("{:.*}", (14 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds every float in `v` to 15 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            sig15(x).parse::<f64>().ok().and_then(Number::from_f64).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => sig15(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => round_floats(other.clone()).to_string(),
    }
}

pub fn render(doc: Document, config: &Value, format: Format) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = Map::new();
            out.insert("config".into(), config.clone());
            match doc {
                Document::Record(fields) => out.extend(fields),
                Document::Table { rows, summary, .. } => {
                    out.extend(summary);
                    out.insert("records".into(), Value::Array(rows.into_iter().map(Value::Object).collect()));
                }
            }
            let mut bytes = serde_json::to_vec_pretty(&round_floats(Value::Object(out)))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let (columns, rows) = match doc {
                Document::Record(fields) => (fields.keys().cloned().collect(), vec![fields]),
                Document::Table { columns, rows, .. } => (columns, rows),
            };
            let mut bytes = format!("# config: {config}\n").into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut bytes);
                w.write_record(&columns)?;
                for row in &rows {
                    w.write_record(columns.iter().map(|c| row.get(c).map_or(String::new(), cell)))?;
                }
                w.flush()?;
            }
            Ok(bytes)
        }
    }
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(0.1 + 0.2), "0.3");
        assert_eq!(sig15(1.0 / 3.0), "0.333333333333333");
        assert_eq!(sig15(2.0), "2");
        assert_eq!(sig15(-1234.5), "-1234.5");
        assert_eq!(sig15(6.02214076e23), "6.02214076e23");
        assert_eq!(sig15(1.5e-7), "1.5e-7");
        assert_eq!(sig15(0.0), "0");
    }

    #[test]
    fn empty_table_is_header_only() {
        let doc = Document::Table { columns: vec!["a".into(), "b".into()], rows: vec![], summary: Map::new() };
        let text = String::from_utf8(render(doc, &Value::Null, Format::Csv).unwrap()).unwrap();
        assert_eq!(text, "# config: null\na,b\n");
    }
}
