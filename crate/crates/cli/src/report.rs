//! Output documents and their JSON, CSV and text renderings.

use std::str::FromStr;

use anyhow::{bail, Result};
use gcalc::integrator::WeightEstimate;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => bail!("unknown format `{}` (json, csv, text)", other),
        }
    }
}

/// One output document: top-level fields, an optional table of rows, and for
/// verification commands the verdict.
#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    fields: Map<String, Value>,
    rows: Vec<Map<String, Value>>,
    passed: Option<bool>,
}

pub type Row = Map<String, Value>;

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), fields: Map::new(), rows: Vec::new(), passed: None }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.to_string(), value.into());
    }

    pub fn estimate(&mut self, e: &WeightEstimate) {
        put_estimate(&mut self.fields, e);
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn verdict(&mut self, passed: bool) {
        self.passed = Some(passed);
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn failed(&self) -> bool {
        self.passed == Some(false)
    }

    fn document(&self) -> Map<String, Value> {
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.clone()));
        if let Some(p) = self.passed {
            doc.insert("passed".into(), Value::Bool(p));
        }
        for (k, v) in &self.fields {
            doc.insert(k.clone(), v.clone());
        }
        if !self.rows.is_empty() {
            doc.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
        }
        doc
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&Value::Object(self.document()))? + "\n"),
            Format::Csv => self.render_csv(),
            Format::Text => Ok(self.render_text()),
        }
    }

    /// Rows when there are any, otherwise the top-level fields as a single row.
    fn render_csv(&self) -> Result<String> {
        let records: Vec<Map<String, Value>> = if self.rows.is_empty() {
            let mut d = self.document();
            d.remove("rows");
            vec![d]
        } else {
            self.rows.clone()
        };
        let mut header: Vec<String> = Vec::new();
        for r in &records {
            for k in r.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)?;
        for r in &records {
            w.write_record(header.iter().map(|k| r.get(k).map(scalar).unwrap_or_default()))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let mut d = self.document();
        d.remove("rows");
        for (k, v) in &d {
            out.push_str(&format!("{}: {}\n", k, scalar(v)));
        }
        if let Some(first) = self.rows.first() {
            let keys: Vec<&String> = first.keys().collect();
            out.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join("\t"));
            out.push('\n');
            for r in &self.rows {
                let cells: Vec<String> = keys.iter().map(|k| r.get(*k).map(scalar).unwrap_or_default()).collect();
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// A Monte Carlo or analytic value always travels with its error bar and provenance.
pub fn put_estimate(m: &mut Row, e: &WeightEstimate) {
    m.insert("value_re".into(), e.value.re.into());
    m.insert("value_im".into(), e.value.im.into());
    m.insert("std_error".into(), e.std_error.into());
    m.insert("std_error_re".into(), e.std_error_re.into());
    m.insert("std_error_im".into(), e.std_error_im.into());
    m.insert("method".into(), serde_json::to_value(e.method).unwrap_or(Value::Null));
    m.insert("samples".into(), e.samples.into());
    m.insert("shards".into(), e.shards.into());
    m.insert("seed".into(), e.seed.into());
    m.insert("rejected".into(), e.rejected.into());
}
