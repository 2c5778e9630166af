//! Run reports: a TOML document for machines and an aligned table for people.

use std::fmt::{self, Write};

/// One reported value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Integer(i64),
    Text(String),
    Flag(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x:.6e}"),
            Value::Integer(i) => write!(f, "{i}"),
            Value::Text(s) => f.write_str(s),
            Value::Flag(b) => f.write_str(if *b { "yes" } else { "no" }),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Number(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Integer(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Flag(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// A named pass/fail statement attached to a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub title: String,
    pub entries: Vec<(String, Value)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Self { title: title.to_string(), ..Self::default() }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            Value::Number(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_toml(&self) -> String {
        let mut values = toml::Table::new();
        for (k, v) in &self.entries {
            let item = match v {
                Value::Number(x) => toml::Value::Float(*x),
                Value::Integer(i) => toml::Value::Integer(*i),
                Value::Text(s) => toml::Value::String(s.clone()),
                Value::Flag(b) => toml::Value::Boolean(*b),
            };
            values.insert(k.clone(), item);
        }
        let mut doc = toml::Table::new();
        doc.insert("title".into(), toml::Value::String(self.title.clone()));
        doc.insert("values".into(), toml::Value::Table(values));
        if !self.checks.is_empty() {
            let mut checks = toml::Table::new();
            for c in &self.checks {
                let mut t = toml::Table::new();
                t.insert("passed".into(), toml::Value::Boolean(c.passed));
                t.insert("detail".into(), toml::Value::String(c.detail.clone()));
                checks.insert(c.name.clone(), toml::Value::Table(t));
            }
            doc.insert("checks".into(), toml::Value::Table(checks));
        }
        toml::to_string(&doc).expect("report tables always serialize")
    }

    pub fn table(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|(k, _)| k.len())
            .chain(self.checks.iter().map(|c| c.name.len()))
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        for (k, v) in &self.entries {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  {:<width$}  {verdict}  {}", c.name, c.detail);
        }
        out
    }
}
