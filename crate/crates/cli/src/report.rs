//! JSON reports.
//!
//! Schema (version 1):
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "command": "verify-sec4",
//!   "seed": 0,
//!   "depth": 5,
//!   "records": [
//!     {
//!       "name": "cusp_area",            // stable identifier of the check
//!       "provenance": "cusp_sector_area_bound",
//!       "depth": 5,                     // word length the values come from
//!       "status": "pass" | "fail" | "diagnostic" | "skipped",
//!       "bound": 0.288,                 // compared quantity, if any
//!       "values": { ... },              // free-form numbers
//!       "message": "..."                // optional explanation
//!     }
//!   ],
//!   "truncation": { "depth": 5, "budget_exceeded": false, "flags": [] },
//!   "exit_code": 0
//! }
//! ```
//!
//! Reports contain no timings, so identical inputs give identical bytes.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Diagnostic,
    Skipped,
}

impl Status {
    pub fn from_check(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    pub provenance: String,
    pub depth: Option<usize>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub values: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Record {
    pub fn new(name: &str, provenance: &str, depth: Option<usize>, status: Status) -> Self {
        Self {
            name: name.into(),
            provenance: provenance.into(),
            depth,
            status,
            bound: None,
            values: Map::new(),
            message: None,
        }
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(key.into(), to_value(v));
        self
    }

    pub fn bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn message(mut self, m: impl Into<String>) -> Self {
        self.message = Some(m.into());
        self
    }
}

/// Serializes a value. Non-finite floats become `null`; pass them through
/// [`num`] to keep them.
pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(&v).unwrap_or(Value::Null)
}

/// JSON number for finite values, a string otherwise.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(x.to_string())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Truncation {
    pub depth: Option<usize>,
    pub budget_exceeded: bool,
    /// Reasons the run's depth may be too shallow.
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub depth: Option<usize>,
    pub records: Vec<Record>,
    pub truncation: Truncation,
    pub exit_code: i32,
}

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_TRUNCATED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

impl Report {
    pub fn new(command: &str, seed: u64, depth: Option<usize>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            seed,
            depth,
            records: Vec::new(),
            truncation: Truncation {
                depth,
                ..Truncation::default()
            },
            exit_code: EXIT_OK,
        }
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn flag(&mut self, reason: impl Into<String>) {
        self.truncation.flags.push(reason.into());
    }

    /// A failed check wins over truncation flags.
    pub fn finish(&mut self) {
        self.exit_code = if self.records.iter().any(|r| r.status == Status::Fail) {
            EXIT_FAILED
        } else if self.truncation.budget_exceeded || !self.truncation.flags.is_empty() {
            EXIT_TRUNCATED
        } else {
            EXIT_OK
        };
    }

    pub fn passed(&self, name: &str) -> Option<bool> {
        self.records
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.status != Status::Fail)
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} (depth {})\n",
            self.command,
            self.depth.map_or("-".into(), |d| d.to_string())
        );
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Diagnostic => "DIAG",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!("  [{status}] {}", r.name));
            if let Some(b) = r.bound {
                out.push_str(&format!(" bound={b:.6e}"));
            }
            for (k, v) in &r.values {
                if v.is_number() || v.is_boolean() || v.is_string() {
                    out.push_str(&format!(" {k}={v}"));
                }
            }
            if let Some(m) = &r.message {
                out.push_str(&format!(" ({m})"));
            }
            out.push('\n');
        }
        if self.truncation.budget_exceeded {
            out.push_str("  truncation: enumeration budget exceeded\n");
        }
        for f in &self.truncation.flags {
            out.push_str(&format!("  truncation: {f}\n"));
        }
        out.push_str(&format!("exit code {}\n", self.exit_code));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_records() {
        let mut r = Report::new("x", 0, Some(3));
        r.push(Record::new("a", "p", Some(3), Status::Pass));
        r.finish();
        assert_eq!(r.exit_code, EXIT_OK);
        r.flag("shallow");
        r.finish();
        assert_eq!(r.exit_code, EXIT_TRUNCATED);
        r.push(Record::new("b", "p", Some(3), Status::Fail));
        r.finish();
        assert_eq!(r.exit_code, EXIT_FAILED);
    }

    #[test]
    fn non_finite_numbers_survive() {
        let r = Record::new("a", "p", None, Status::Diagnostic).value("x", num(f64::INFINITY));
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"inf\""));
    }
}
