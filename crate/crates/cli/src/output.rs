//! JSON rendering with reals in 17 significant digits, so every value
//! re-parses to the same `f64`.

use std::fmt::Write;

use gibbs_rigidity::{Matrix, Potential, TransitionMatrix, Word};
use serde_json::{json, Value};

/// Two-space indented JSON; arrays of scalars stay on one line and every
/// `f64` is written as `{:.16e}`.
pub fn to_string(value: &Value) -> String {
    let mut out = String::new();
    render(value, 0, &mut out);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn render(value: &Value, depth: usize, out: &mut String) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => write!(out, "{b}").unwrap(),
        Value::Number(n) => match (n.is_f64(), n.as_f64()) {
            (true, Some(x)) => write!(out, "{x:.16e}").unwrap(),
            _ => write!(out, "{n}").unwrap(),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                render(item, depth, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                render(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, depth + 1);
                write!(out, "{}: ", Value::String(key.clone())).unwrap();
                render(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

pub fn word(w: &Word) -> Value {
    Value::String(w.to_string())
}

pub fn edge((i, j): (usize, usize)) -> Value {
    word(&Word(vec![i, j]))
}

pub fn one_based(symbols: &[usize]) -> Value {
    json!(symbols.iter().map(|s| s + 1).collect::<Vec<_>>())
}

pub fn transition_matrix(a: &TransitionMatrix) -> Value {
    json!({ "n": a.size(), "rows": a.rows() })
}

/// Rows of `m` with `null` off the edges of `a`.
pub fn edge_matrix(a: &TransitionMatrix, m: &Matrix) -> Value {
    let n = a.size();
    json!((0..n)
        .map(|i| (0..n)
            .map(|j| a.edge(i, j).then(|| m[(i, j)]))
            .collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn potential(f: &Potential) -> Value {
    json!(f.values())
}
