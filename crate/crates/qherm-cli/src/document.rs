//! Result documents: JSON with a fixed key order and floats printed at 17
//! significant digits, so identical inputs produce byte-identical output and
//! every double round-trips losslessly. The only run-dependent field is the
//! timestamp, which consumers strip before comparing documents.

use qherm_core::Complex64;
use serde_json::{Map, Value};

/// A result document under construction. Keys render in insertion order.
pub struct ResultDocument {
    root: Map<String, Value>,
}

impl ResultDocument {
    /// Starts a document for the given command; `command` and `timestamp`
    /// are always the first two keys.
    pub fn new(command: &str) -> Self {
        let mut root = Map::new();
        root.insert("command".into(), Value::String(command.into()));
        let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true);
        root.insert("timestamp".into(), Value::String(now));
        ResultDocument { root }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.root.insert(key.into(), value);
    }

    /// Renders with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        write_value(&Value::Object(self.root.clone()), 0, &mut out);
        out.push('\n');
        out
    }
}

/// A float as a JSON value that will be printed at full precision.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// A complex scalar as the `[re, im]` wire form.
pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

/// A list of complex scalars, each as `[re, im]`.
pub fn complex_list(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|z| complex(*z)).collect())
}

pub fn float_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| float(*x)).collect())
}

fn write_indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_number(n: &serde_json::Number, out: &mut String) {
    if let Some(i) = n.as_i64() {
        out.push_str(&i.to_string());
    } else if let Some(u) = n.as_u64() {
        out.push_str(&u.to_string());
    } else {
        // 16 digits after the point = 17 significant digits: enough to
        // reproduce any f64 exactly on re-parse.
        let x = n.as_f64().expect("finite double");
        out.push_str(&format!("{:.16e}", x));
    }
}

fn is_scalar(v: &Value) -> bool {
    matches!(v, Value::Null | Value::Bool(_) | Value::Number(_) | Value::String(_))
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(n, out),
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string encodes"))
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.len() <= 4 && items.iter().all(is_scalar) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(item, depth, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    write_indent(depth + 1, out);
                    write_value(item, depth + 1, out);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                write_indent(depth, out);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (key, val)) in map.iter().enumerate() {
                write_indent(depth + 1, out);
                out.push_str(&serde_json::to_string(key).expect("key encodes"));
                out.push_str(": ");
                write_value(val, depth + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            write_indent(depth, out);
            out.push('}');
        }
    }
}
