use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub value: Value,
    pub expected: Value,
    pub pass: bool,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, value: impl Serialize, expected: impl Serialize, pass: bool) -> Self {
        CheckLine { name: name.into(), value: json!(value), expected: json!(expected), pass }
    }

    /// `|value/target − 1| ≤ rel`.
    pub fn rel(name: impl Into<String>, value: f64, target: f64, rel: f64) -> Self {
        let pass = ((value / target) - 1.0).abs() <= rel;
        Self::new(name, value, json!({ "target": target, "rel_tol": rel }), pass)
    }

    /// `|value − target| ≤ abs`.
    pub fn abs(name: impl Into<String>, value: f64, target: f64, abs: f64) -> Self {
        let pass = (value - target).abs() <= abs;
        Self::new(name, value, json!({ "target": target, "abs_tol": abs }), pass)
    }

    pub fn eq<T: Serialize + PartialEq>(name: impl Into<String>, value: T, expected: T) -> Self {
        let pass = value == expected;
        Self::new(name, value, expected, pass)
    }

    /// Failure of a computation that was supposed to produce a value.
    pub fn error(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::new(name, json!({ "error": err.to_string() }), Value::Null, false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub checks: Vec<CheckLine>,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl Report {
    pub fn new(command: &str, inputs: Value, outputs: Value, checks: Vec<CheckLine>, wall_time_s: f64) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report { command: command.into(), inputs, outputs, checks, pass, wall_time_s }
    }

    pub fn write(&self, as_json: bool, w: &mut dyn Write) -> std::io::Result<()> {
        if as_json {
            return writeln!(w, "{}", serde_json::to_string(self).expect("report serializes"));
        }
        writeln!(w, "{}", self.command)?;
        if let Value::Object(m) = &self.outputs {
            for (k, v) in m {
                writeln!(w, "  {k}: {}", render(v))?;
            }
        }
        for c in &self.checks {
            writeln!(w, "  {} {}: {} (expected {})", if c.pass { "PASS" } else { "FAIL" }, c.name, render(&c.value), render(&c.expected))?;
        }
        writeln!(w, "  {} in {:.2} s", if self.pass { "ok" } else { "FAILED" }, self.wall_time_s)
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
