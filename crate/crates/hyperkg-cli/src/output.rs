use serde_json::{Map, Value};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Numeric rows plus scalar metadata. Rows are emitted in the order given.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.to_string(), value.into());
    }
}

pub enum Output {
    Table(Table),
    /// Structured report: JSON as is, CSV as flattened `key,value` rows.
    Report(Value),
}

/// `f64` to JSON, with non-finite values as `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn csv_real(x: f64) -> String {
    // 17 significant digits
    format!("{x:.16e}")
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => csv_real(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        x => out.push((prefix.to_string(), csv_field(x))),
    }
}

pub fn table_json(t: &Table) -> Value {
    let rows = t.rows.iter().map(|r| Value::Array(r.iter().map(|&x| num(x)).collect())).collect();
    let mut m = Map::new();
    m.insert("columns".into(), Value::Array(t.columns.iter().map(|c| Value::String(c.to_string())).collect()));
    m.insert("rows".into(), Value::Array(rows));
    m.insert("meta".into(), Value::Object(t.meta.clone()));
    Value::Object(m)
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializing a Value cannot fail");
    s.push('\n');
    s
}

/// Renders the main output; table metadata in CSV mode is returned separately for stderr.
pub fn render(out: &Output, format: Format) -> (String, Option<String>) {
    match (out, format) {
        (Output::Table(t), Format::Json) => (json_text(&table_json(t)), None),
        (Output::Table(t), Format::Csv) => {
            let mut s = t.columns.join(",");
            s.push('\n');
            for r in &t.rows {
                s.push_str(&r.iter().map(|&x| csv_real(x)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            let meta = (!t.meta.is_empty()).then(|| {
                let mut pairs = Vec::new();
                flatten("", &Value::Object(t.meta.clone()), &mut pairs);
                pairs.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
            });
            (s, meta)
        }
        (Output::Report(v), Format::Json) => (json_text(v), None),
        (Output::Report(v), Format::Csv) => {
            let mut pairs = Vec::new();
            flatten("", v, &mut pairs);
            let mut s = String::from("key,value\n");
            for (k, x) in pairs {
                s.push_str(&format!("{k},{x}\n"));
            }
            (s, None)
        }
    }
}

pub fn write(text: &str, path: Option<&std::path::Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
