//! JSON mode-spec files.
//!
//! ```json
//! {"n": 3, "eta": 1.0, "x": [1, 0, 0], "w": {"1": 1.0, "2": 10.0}}
//! ```
//!
//! Vectors are dense arrays of length `n` or sparse objects keyed by 1-based
//! site. `y` and `z` default to zero.

use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::modes::{validate_window, WindowFunctions};

const KNOWN_KEYS: [&str; 6] = ["n", "eta", "x", "y", "z", "w"];

/// 1-based line and column of the first occurrence of `"key"`, or (0, 0).
fn locate(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    match text.find(&needle) {
        Some(pos) => {
            let before = &text[..pos];
            let line = before.matches('\n').count() + 1;
            let column = pos - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, column)
        }
        None => (0, 0),
    }
}

fn field_error(text: &str, field: &str, message: impl Into<String>) -> Error {
    let (line, column) = locate(text, field);
    Error::Parse {
        field: field.to_string(),
        line,
        column,
        message: message.into(),
    }
}

fn vector(text: &str, obj: &Map<String, Value>, key: &str, n: usize, required: bool) -> Result<Vec<f64>> {
    let value = match obj.get(key) {
        Some(v) => v,
        None if required => return Err(field_error(text, key, "missing")),
        None => return Ok(vec![0.0; n]),
    };
    let number = |v: &Value, what: &str| {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| field_error(text, key, format!("{what} is not a finite number")))
    };
    match value {
        Value::Array(items) => {
            if items.len() != n {
                return Err(field_error(text, key, format!("has {} entries, expected n = {n}", items.len())));
            }
            items
                .iter()
                .enumerate()
                .map(|(i, v)| number(v, &format!("entry {}", i + 1)))
                .collect()
        }
        Value::Object(entries) => {
            let mut out = vec![0.0; n];
            for (site, v) in entries {
                let idx: usize = site
                    .parse()
                    .ok()
                    .filter(|i| (1..=n).contains(i))
                    .ok_or_else(|| field_error(text, key, format!("site key \"{site}\" is not in 1..={n}")))?;
                out[idx - 1] = number(v, &format!("site {site}"))?;
            }
            Ok(out)
        }
        _ => Err(field_error(text, key, "must be an array or an object of sites")),
    }
}

pub fn parse_mode_spec(text: &str) -> Result<(LatticeSpec, WindowFunctions)> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        field: "<document>".to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| field_error(text, "<document>", "top level must be an object"))?;
    if let Some(unknown) = obj.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(field_error(text, unknown, "unknown field"));
    }
    let n = obj
        .get("n")
        .ok_or_else(|| field_error(text, "n", "missing"))?
        .as_u64()
        .filter(|n| *n >= 2)
        .ok_or_else(|| field_error(text, "n", "must be an integer >= 2"))? as usize;
    let eta = obj
        .get("eta")
        .ok_or_else(|| field_error(text, "eta", "missing"))?
        .as_f64()
        .ok_or_else(|| field_error(text, "eta", "must be a number"))?;
    let spec = LatticeSpec::new(n, eta)?;

    let window = WindowFunctions::new(
        vector(text, obj, "x", n, true)?,
        vector(text, obj, "y", n, false)?,
        vector(text, obj, "z", n, false)?,
        vector(text, obj, "w", n, true)?,
    )?;
    validate_window(&window)?;
    Ok((spec, window))
}

pub fn load_mode_spec(path: &Path) -> Result<(LatticeSpec, WindowFunctions)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid("spec", format!("cannot read {}: {e}", path.display())))?;
    parse_mode_spec(&text)
}
