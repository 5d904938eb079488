use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Structured comparison of two numerically computed sides of an identity or inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    /// `(T or sigma, value)` pairs recorded along the way.
    pub trace: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn abs_rel_err(lhs: f64, rhs: f64) -> (f64, f64) {
    let abs = (lhs - rhs).abs();
    (abs, abs / lhs.abs().max(rhs.abs()).max(1e-300))
}

impl CheckReport {
    /// A report with the error fields filled in and a failing verdict until one is set.
    pub fn new(check: &str, lhs: f64, rhs: f64) -> Self {
        let (abs_err, rel_err) = abs_rel_err(lhs, rhs);
        Self {
            check: check.to_string(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tolerance: 0.0,
            params: BTreeMap::new(),
            verdict: Verdict::Fail,
            trace: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_trace(mut self, trace: Vec<(f64, f64)>) -> Self {
        self.trace = trace;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn judge(mut self, tolerance: f64, ok: bool) -> Self {
        self.tolerance = tolerance;
        self.verdict = Verdict::from_bool(ok);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}
