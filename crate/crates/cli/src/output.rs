//! Tables with a metadata header, rendered as CSV or JSON.

use serde_json::{json, Map, Value};

/// Significant digits for every printed float.
pub const SIG_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A float rounded to [`SIG_DIGITS`] significant digits, printed in the
/// shortest form that round-trips that rounded value.
pub fn sig(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("float");
    if rounded == 0.0 {
        return "0".into();
    }
    format!("{rounded}")
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let r: f64 = sig(x).parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn cell(v: &Value) -> String {
    let text = match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (_, Some(i)) => i.to_string(),
            _ => sig(n.as_f64().expect("number")),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub metadata: Map<String, Value>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Self {
        let mut metadata = Map::new();
        metadata.insert("tool".into(), json!("guesswork"));
        metadata.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        metadata.insert("command".into(), json!(command));
        Table {
            columns,
            rows: Vec::new(),
            metadata,
        }
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.metadata.insert(key.into(), value);
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        let metadata = round_value(Value::Object(self.metadata.clone()));
        match format {
            Format::Csv => {
                let mut out = format!("# {metadata}\n{}\n", self.columns.join(","));
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(cell).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), round_value(v.clone())))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "metadata": metadata, "records": records });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1.125), "1.125");
        assert_eq!(sig(0.321_928_094_887_362_3), "0.321928095");
        assert_eq!(sig(1.0), "1");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(123_456_789_012.0), "123456789000");
        assert_eq!(sig(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", vec!["a", "b"]);
        t.push(vec![json!("x,y"), json!(0.1 + 0.2)]);
        let text = t.render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "\"x,y\",0.3");
    }
}
