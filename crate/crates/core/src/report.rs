//! JSON and CSV rendering of results.
//!
//! Rationals are written as `"p/q"` strings and are exact. Reals are written
//! as decimal strings to the digits carried by their precision; the envelope
//! records the working `digits`.

use rug::Rational;
use serde::Serializer;
use serde_json::{Map, Value};

use crate::arith::Real;

pub const SCHEMA: &str = "shimura-vol/1";

/// Decimal digits that a value of `bits` precision carries under the
/// guard-bit convention of [`crate::arith::Context`].
pub fn digits_of_prec(bits: u32) -> u32 {
    let useful = bits.saturating_sub(40).max(10) as f64;
    (useful / std::f64::consts::LOG2_10).floor() as u32
}

pub fn real_string(x: &Real) -> String {
    x.to_string_digits(digits_of_prec(x.prec()))
}

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

pub fn ser_opt_rational<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => ser_rational(q, s),
        None => s.serialize_none(),
    }
}

pub fn ser_rational_vec<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|q| q.to_string()))
}

pub fn ser_real<S: Serializer>(x: &Real, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&real_string(x))
}

pub fn ser_opt_real<S: Serializer>(x: &Option<Real>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => ser_real(x, s),
        None => s.serialize_none(),
    }
}

/// Wraps `body` with the schema tag, the command name and the precision.
pub fn envelope(command: &str, digits: u32, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA.into());
    m.insert("command".into(), command.into());
    m.insert("digits".into(), digits.into());
    match body {
        Value::Object(obj) => m.extend(obj),
        other => {
            m.insert("result".into(), other);
        }
    }
    Value::Object(m)
}

pub fn error_object(err: &crate::error::Error) -> Value {
    let kind = format!("{err:?}");
    let kind = kind.split(['(', ' ']).next().unwrap_or("Error").to_string();
    serde_json::json!({"schema": SCHEMA, "error": kind, "message": err.to_string()})
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), parts.join(" ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Flattens nested objects into dotted column names. An object with a
/// `rows` array becomes one CSV row per entry; anything else is one row.
pub fn to_csv(v: &Value) -> String {
    let rows: Vec<&Value> = match v.get("rows") {
        Some(Value::Array(rows)) => rows.iter().collect(),
        _ => vec![v],
    };
    let flat: Vec<Vec<(String, String)>> = rows
        .iter()
        .map(|r| {
            let mut out = Vec::new();
            flatten("", r, &mut out);
            out
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for row in &flat {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut s = header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",");
    s.push('\n');
    for row in &flat {
        let line: Vec<String> = header
            .iter()
            .map(|h| {
                row.iter()
                    .find(|(k, _)| k == h)
                    .map(|(_, v)| csv_field(v))
                    .unwrap_or_default()
            })
            .collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}
