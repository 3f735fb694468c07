//! Reports and tables, rendered as `#`-commented CSV or JSON.
//!
//! Numbers are written in shortest round-trip form, so the CSV and JSON
//! renderings of one report parse back to identical `f64` values.

use serde_json::{Map, Number, Value as Json};

use crate::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    List(Vec<String>),
    NumList(Vec<f64>),
    Empty,
}

impl Value {
    pub fn to_cell(&self) -> String {
        match self {
            Value::Num(v) => num(*v),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::List(l) => l.join(";"),
            Value::NumList(l) => l.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";"),
            Value::Empty => String::new(),
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Num(v) => json_num(*v),
            Value::Int(v) => Json::from(*v),
            Value::Bool(v) => Json::Bool(*v),
            Value::Text(s) => Json::String(s.clone()),
            Value::List(l) => Json::Array(l.iter().map(|s| Json::String(s.clone())).collect()),
            Value::NumList(l) => Json::Array(l.iter().map(|v| json_num(*v)).collect()),
            Value::Empty => Json::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn json_num(v: f64) -> Json {
    Number::from_f64(v)
        .map(Json::Number)
        .unwrap_or_else(|| Json::String(num(v)))
}

fn csv_bytes(comment: &str, header: &[String], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = format!("# {comment}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(header).expect("in-memory write");
        for r in rows {
            w.write_record(r).expect("in-memory write");
        }
        w.flush().expect("in-memory write");
    }
    out
}

fn unit_comment<'a>(cols: impl Iterator<Item = (&'a str, &'a str)>) -> String {
    cols.map(|(k, u)| {
        if u.is_empty() {
            k.to_string()
        } else {
            format!("{k} [{u}]")
        }
    })
    .collect::<Vec<_>>()
    .join(", ")
}

fn pretty(v: &Json) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s.into_bytes()
}

/// One named record of scalar results.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub fields: Vec<(String, String, Value)>,
}

impl Report {
    pub fn push(&mut self, key: &str, unit: &str, value: Value) {
        self.fields.push((key.to_string(), unit.to_string(), value));
    }

    pub fn num(&mut self, key: &str, unit: &str, v: f64) {
        self.push(key, unit, Value::Num(v));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, _, v)| v)
    }

    pub fn to_json(&self) -> Json {
        let mut m = Map::new();
        for (k, _, v) in &self.fields {
            m.insert(k.clone(), v.to_json());
        }
        let units: Map<String, Json> = self
            .fields
            .iter()
            .filter(|(_, u, _)| !u.is_empty())
            .map(|(k, u, _)| (k.clone(), Json::String(u.clone())))
            .collect();
        m.insert("units".into(), Json::Object(units));
        Json::Object(m)
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let comment = unit_comment(self.fields.iter().map(|(k, u, _)| (k.as_str(), u.as_str())));
        let header: Vec<String> = self.fields.iter().map(|(k, _, _)| k.clone()).collect();
        let row: Vec<String> = self.fields.iter().map(|(_, _, v)| v.to_cell()).collect();
        csv_bytes(&comment, &header, &[row])
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json()),
        }
    }
}

/// Named columns with units and rows of values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Table {
            columns: columns
                .iter()
                .map(|(k, u)| (k.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let comment = unit_comment(self.columns.iter().map(|(k, u)| (k.as_str(), u.as_str())));
        let header: Vec<String> = self.columns.iter().map(|(k, _)| k.clone()).collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Value::to_cell).collect())
            .collect();
        csv_bytes(&comment, &header, &rows)
    }

    pub fn to_json(&self) -> Json {
        let units: Map<String, Json> = self
            .columns
            .iter()
            .filter(|(_, u)| !u.is_empty())
            .map(|(k, u)| (k.clone(), Json::String(u.clone())))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                Json::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|((k, _), v)| (k.clone(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({ "units": units, "rows": rows })
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json()),
        }
    }
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

pub fn json_bytes(v: &Json) -> Vec<u8> {
    pretty(v)
}
