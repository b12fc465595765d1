//! Report assembly and rendering.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

/// Version stamped into every JSON report.
pub const REPORT_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

/// A command's findings: text lines for humans, fields for JSON, and an
/// optional graph for DOT.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    lines: Vec<String>,
    fields: Map<String, Value>,
    dot: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            passed: true,
            lines: Vec::new(),
            fields: Map::new(),
            dot: None,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn field(&mut self, key: &str, v: impl Into<Value>) {
        self.fields.insert(key.to_string(), v.into());
    }

    pub fn set_dot(&mut self, dot: String) {
        self.dot = Some(dot);
    }

    pub fn has_dot(&self) -> bool {
        self.dot.is_some()
    }

    /// Marks the report as a semantic failure.
    pub fn fail(&mut self) {
        self.passed = false;
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("report_v".into(), json!(REPORT_VERSION));
        obj.insert("command".into(), json!(self.command));
        obj.insert(
            "status".into(),
            json!(if self.passed { "pass" } else { "fail" }),
        );
        for (k, v) in &self.fields {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }

    /// Rendering for `format`; `None` when the report has no such form.
    pub fn render(&self, format: Format) -> Option<String> {
        match format {
            Format::Text => {
                let mut s = self.lines.join("\n");
                s.push('\n');
                Some(s)
            }
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
                s.push('\n');
                Some(s)
            }
            Format::Dot => self.dot.clone(),
        }
    }
}
