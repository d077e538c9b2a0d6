//! JSON and CSV writers. Floats always carry 17 significant digits so that values
//! round-trip exactly; non-finite floats become `null` (JSON) or an empty cell (CSV).

use anyhow::Result;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;
use std::io::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

struct Sig;

impl Formatter for Sig {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(float(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig);
    v.serialize(&mut ser)?;
    Ok(String::from_utf8(buf)?)
}

/// Text of one scalar cell.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Flattens nested objects and arrays into dotted column names.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        _ => out.push((prefix.to_string(), cell(v))),
    }
}

/// Rows of (column, cell) pairs as CSV; the header is the union of columns in order
/// of first appearance.
pub fn rows_to_csv(rows: &[Vec<(String, String)>]) -> Result<String> {
    let mut header: Vec<String> = Vec::new();
    for r in rows {
        for (k, _) in r {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in rows {
        let rec: Vec<&str> = header
            .iter()
            .map(|h| r.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str()))
            .collect();
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// One CSV row per element when `v` is an array, otherwise a single flattened row.
pub fn to_csv<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    let items = match &value {
        Value::Array(a) => a.clone(),
        _ => vec![value],
    };
    let rows: Vec<Vec<(String, String)>> = items
        .iter()
        .map(|x| {
            let mut r = Vec::new();
            flatten("", x, &mut r);
            r
        })
        .collect();
    rows_to_csv(&rows)
}

pub fn render<T: Serialize>(v: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(v)? + "\n"),
        Format::Csv => to_csv(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1.7320508075688772, 6.02e23] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(to_json(&[f64::NAN, 1.0]).unwrap(), "[null,1.0000000000000000e0]");
    }

    #[test]
    fn csv_union_header() {
        let rows = vec![
            vec![("a".to_string(), "1".to_string())],
            vec![("b".to_string(), "2".to_string())],
        ];
        assert_eq!(rows_to_csv(&rows).unwrap(), "a,b\n1,\n,2\n");
    }
}
