//! Deterministic JSON and CSV rendering of command results.

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use twistalg::spectral::Verdict;

pub const SCHEMA: &str = "twistalg.report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 12 significant digits. Non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("NaN".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "Infinity" } else { "-Infinity" }.into());
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    // normalize -0
    json!(if rounded == 0.0 { 0.0 } else { rounded })
}

pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn spectrum(v: &[Complex64]) -> Value {
    let mut v = v.to_vec();
    twistalg::linalg::sort_spectrum(&mut v);
    Value::Array(v.into_iter().map(complex).collect())
}

pub fn verdict(v: &Verdict) -> Value {
    json!({
        "name": v.name,
        "passed": v.passed,
        "value": num(v.value),
        "tolerance": num(v.tolerance),
    })
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A scalar table for CSV output.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    /// The flags as given, plus the resolved values actually used.
    pub flags: Map<String, Value>,
    pub digest: Option<String>,
    pub truncation: Map<String, Value>,
    pub results: Map<String, Value>,
    pub verdicts: Vec<Verdict>,
    /// Overall outcome; `None` for purely informational commands.
    pub passed: Option<bool>,
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            flags: Map::new(),
            digest: None,
            truncation: Map::new(),
            results: Map::new(),
            verdicts: Vec::new(),
            passed: None,
            table: None,
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.into(), v.into());
    }

    pub fn truncate(&mut self, key: &str, v: impl Into<Value>) {
        self.truncation.insert(key.into(), v.into());
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed.unwrap_or(true) {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "tool": { "name": "twistalg", "version": VERSION },
            "command": { "name": self.command, "flags": self.flags },
            "input": { "digest": self.digest },
            "truncation": self.truncation,
            "results": self.results,
            "verdicts": self.verdicts.iter().map(verdict).collect::<Vec<_>>(),
            "passed": self.passed,
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_csv(&self) -> Option<String> {
        let t = self.table.as_ref()?;
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&t.columns).ok()?;
        for row in &t.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect();
            w.write_record(&cells).ok()?;
        }
        String::from_utf8(w.into_inner().ok()?).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(std::f64::consts::PI), json!(3.14159265359));
        assert_eq!(num(-0.0), json!(0.0));
        assert_eq!(num(2.0f64.sqrt() * 1e-20), json!(1.41421356237e-20));
        assert_eq!(num(f64::INFINITY), json!("Infinity"));
    }

    #[test]
    fn spectra_are_sorted() {
        let v = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)];
        assert_eq!(spectrum(&v), json!([[-1.0, -2.0], [-1.0, 2.0], [1.0, 0.0]]));
    }
}
