//! Deterministic CSV and JSON rendering.

use nalgebra::DMatrix;
use serde_json::{Map, Value};

/// `%.9e` as in C: nine digits after the point, signed two-digit exponent.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.9e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn matrix_value(m: &DMatrix<f64>) -> Value {
    Value::from(
        (0..m.nrows())
            .map(|i| m.row(i).iter().copied().collect::<Vec<f64>>())
            .collect::<Vec<_>>(),
    )
}

/// A tabular result (`vacuum`, `sweep`) or a nested document.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table { columns: Vec<String>, rows: Vec<Vec<Value>> },
    Document(Value),
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => sci(n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "nan".into(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        leaf => out.push((prefix.to_string(), csv_cell(leaf))),
    }
}

impl Output {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        match self {
            Output::Table { columns, rows } => {
                s.push_str(&columns.join(","));
                s.push('\n');
                for row in rows {
                    s.push_str(&row.iter().map(csv_cell).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
            }
            Output::Document(doc) => {
                let mut pairs = Vec::new();
                flatten("", doc, &mut pairs);
                s.push_str("key,value\n");
                for (k, v) in pairs {
                    s.push_str(&format!("{k},{v}\n"));
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let value = match self {
            Output::Table { columns, rows } => Value::Array(
                rows.iter()
                    .map(|row| Value::Object(columns.iter().cloned().zip(row.iter().cloned()).collect::<Map<_, _>>()))
                    .collect(),
            ),
            Output::Document(doc) => doc.clone(),
        };
        let mut s = serde_json::to_string_pretty(&value).expect("values are serializable");
        s.push('\n');
        s
    }
}
