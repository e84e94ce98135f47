//! Canonical JSON: sorted keys, no whitespace, floats with 17 significant
//! digits in exponent form, integers verbatim.

use serde_json::{Map, Value};

/// Formats a float with 17 significant digits; non-finite values become `null`.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn to_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => write_object(map, out),
    }
}

fn write_object(map: &Map<String, Value>, out: &mut String) {
    let mut keys: Vec<&String> = map.keys().collect();
    keys.sort();
    out.push('{');
    for (i, k) in keys.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&Value::String(k.clone()).to_string());
        out.push(':');
        write_value(&map[k], out);
    }
    out.push('}');
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_compact_seventeen_digits() {
        let v = json!({"b": 1.5, "a": [1, 0.1, null], "c": {"z": true, "y": "s"}});
        assert_eq!(
            to_string(&v),
            r#"{"a":[1,1.0000000000000001e-1,null],"b":1.5000000000000000e0,"c":{"y":"s","z":true}}"#
        );
    }

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, 1e-300, -2.5e17, 4.0 / 3.0] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let parsed: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(parsed.as_f64().unwrap(), x);
        }
    }
}
