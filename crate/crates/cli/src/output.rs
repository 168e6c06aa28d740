//! Canonical JSON and CSV rendering.
//!
//! JSON objects are emitted with sorted keys, no whitespace and every
//! non-integer number as `{:.16e}` (17 significant digits), so parsing and
//! re-rendering an envelope reproduces it byte for byte.

use betawl::density::format_rational;
use betawl::Scalar;
use serde_json::{json, Value};

pub const PRECISION_ENV: &str = "BETAWL_FLOAT_BITS";

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

/// A finite f64 as a JSON number; NaN and infinities become strings.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(v.to_string())
    }
}

/// Exact values as `p/q`; float values as 17-digit decimals, or `exp(ln)`
/// when outside the binary64 range.
pub fn scalar_text<F: Scalar>(v: &F) -> String {
    if let Some(q) = v.to_rational() {
        return format_rational(&q);
    }
    let f = v.to_f64();
    if f.is_finite() && (f != 0.0 || v.is_zero()) {
        float(f)
    } else {
        format!("exp({})", float(v.ln()))
    }
}

pub struct Envelope {
    pub command: &'static str,
    pub params: Value,
    pub precision_mode: String,
    pub payload: Value,
}

impl Envelope {
    pub fn render(&self) -> String {
        let v = json!({
            "command": self.command,
            "params": self.params,
            "precision_mode": self.precision_mode,
            "payload": self.payload,
            "version": env!("CARGO_PKG_VERSION"),
        });
        let mut s = canonical(&v);
        s.push('\n');
        s
    }
}

/// Rows joined as CSV with a header line.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
