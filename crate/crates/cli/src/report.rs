use std::fmt::Write as _;

use serde_json::{Map, Value};

pub const SCHEMA: &str = "alpha-forge/1";

/// Keys removed from reproducible reports.
const TIMING_KEYS: [&str; 2] = ["seconds", "runtime_seconds"];

/// The outcome of one subcommand before formatting.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    /// Rows for CSV output; defaults to the flattened result.
    pub table: Option<Vec<Value>>,
    /// Single value printed by the text format instead of the full result.
    pub headline: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunMeta {
    pub workers: usize,
    pub seconds: f64,
}

impl Report {
    pub fn new(command: &'static str, config: Value, result: Value) -> Self {
        Report {
            command,
            config,
            result,
            table: None,
            headline: None,
        }
    }

    pub fn with_table(mut self, rows: Vec<Value>) -> Self {
        self.table = Some(rows);
        self
    }

    pub fn with_headline(mut self, h: impl Into<String>) -> Self {
        self.headline = Some(h.into());
        self
    }

    pub fn to_json(&self, meta: Option<&RunMeta>) -> String {
        let mut doc = Map::new();
        doc.insert("schema".into(), SCHEMA.into());
        doc.insert("command".into(), self.command.into());
        doc.insert("config".into(), self.config.clone());
        let mut result = self.result.clone();
        match meta {
            Some(m) => {
                let mut run = Map::new();
                run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
                run.insert("workers".into(), m.workers.into());
                run.insert("seconds".into(), m.seconds.into());
                doc.insert("result".into(), result);
                doc.insert("run".into(), Value::Object(run));
            }
            None => {
                strip_timing(&mut result);
                doc.insert("result".into(), result);
            }
        }
        let mut out = String::new();
        write_json(&Value::Object(doc), &mut out);
        out.push('\n');
        out
    }

    pub fn rows(&self, reproducible: bool) -> Vec<Map<String, Value>> {
        let rows = match &self.table {
            Some(rows) => rows.clone(),
            None => vec![self.result.clone()],
        };
        rows.into_iter()
            .map(|mut r| {
                if reproducible {
                    strip_timing(&mut r);
                }
                let mut flat = Map::new();
                flatten("", &r, &mut flat);
                flat
            })
            .collect()
    }

    pub fn to_csv(&self, reproducible: bool) -> String {
        let rows = self.rows(reproducible);
        let mut headers: Vec<String> = Vec::new();
        for r in &rows {
            for k in r.keys() {
                if !headers.contains(k) {
                    headers.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&headers).expect("in-memory write");
        for r in &rows {
            let rec: Vec<String> = headers
                .iter()
                .map(|h| r.get(h).map_or_else(String::new, scalar_csv))
                .collect();
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_text(&self, reproducible: bool) -> String {
        if let Some(h) = &self.headline {
            return format!("{h}\n");
        }
        let mut r = self.result.clone();
        if reproducible {
            strip_timing(&mut r);
        }
        let mut flat = Map::new();
        flatten("", &r, &mut flat);
        let width = flat.keys().map(|k| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &flat {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map_or(n.to_string(), |f| f.to_string()),
                other => other.to_string(),
            };
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for k in TIMING_KEYS {
                m.remove(k);
            }
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined = a.iter().map(scalar_csv).collect::<Vec<_>>().join(";");
            out.insert(prefix.to_string(), Value::String(joined));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn scalar_csv(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap()),
        other => other.to_string(),
    }
}

/// A finite float with 17 significant digits; non-finite values become `null`.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).expect("exponent");
    if (-5..17).contains(&exp) {
        format!("{x:.prec$}", prec = (16 - exp) as usize)
    } else {
        sci
    }
}

fn write_json(v: &Value, out: &mut String) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => out.push_str(&fmt_f64(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            out.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_json(x, out);
            }
            out.push('}');
        }
    }
}
