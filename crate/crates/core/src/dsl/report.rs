use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::oracle::ZeroVerdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Zero,
    #[serde(rename = "nonzero")]
    NonZero,
    Indeterminate,
    NotFound,
    Derived,
    Error,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Zero => "zero",
            Verdict::NonZero => "nonzero",
            Verdict::Indeterminate => "indeterminate",
            Verdict::NotFound => "not-found",
            Verdict::Derived => "derived",
            Verdict::Error => "error",
        }
    }
}

impl From<&ZeroVerdict> for Verdict {
    fn from(v: &ZeroVerdict) -> Self {
        match v {
            ZeroVerdict::Zero(_) => Verdict::Zero,
            ZeroVerdict::NonZero(_) => Verdict::NonZero,
            ZeroVerdict::Indeterminate => Verdict::Indeterminate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// Outcome of one directive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub line: usize,
    pub directive: String,
    pub verdict: Verdict,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Entry {
    pub fn error(line: usize, directive: String, message: String) -> Entry {
        Entry {
            line,
            directive,
            verdict: Verdict::Error,
            status: Status::Error,
            classification: None,
            residual: None,
            details: BTreeMap::new(),
            message: Some(message),
            timing_ms: None,
        }
    }
}

/// Per-directive results of a run, in directive order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn count(&self, s: Status) -> usize {
        self.entries.iter().filter(|e| e.status == s).count()
    }

    /// 0 when every directive passed, 2 on any structural error, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.count(Status::Error) > 0 {
            2
        } else if self.count(Status::Fail) > 0 {
            1
        } else {
            0
        }
    }

    /// JSON with sorted keys.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        let summary = serde_json::json!({
            "pass": self.count(Status::Pass),
            "fail": self.count(Status::Fail),
            "error": self.count(Status::Error),
        });
        v.as_object_mut().expect("object").insert("summary".into(), summary);
        v
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{:>4}  {:<6} {:<13} {}", e.line, e.status.as_str(), e.verdict.as_str(), e.directive);
            if let Some(c) = &e.classification {
                let _ = writeln!(out, "      classification: {c}");
            }
            if let Some(r) = &e.residual {
                let _ = writeln!(out, "      residual: {r}");
            }
            for (k, v) in &e.details {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let _ = writeln!(out, "      {k}: {shown}");
            }
            if let Some(m) = &e.message {
                let _ = writeln!(out, "      error: {m}");
            }
            if let Some(t) = e.timing_ms {
                let _ = writeln!(out, "      time: {t:.1} ms");
            }
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} errors",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error)
        );
        out
    }
}
