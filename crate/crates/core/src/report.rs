//! Check reports, rendered as text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::window::Window;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        }
    }
}

/// A failing input tuple together with its nonzero residual.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub label: String,
    pub inputs: Vec<String>,
    pub residual: String,
}

/// Supporting evidence: a membership certificate, a kernel vector, a
/// closure dimension, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub label: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub window: Vec<String>,
    pub dpow_bound: Option<u32>,
    pub lossy: bool,
    pub status: Status,
    pub verdict: String,
    /// Outcome the algebra's known theory predicts, when there is one.
    pub expected: Option<Status>,
    pub failures: Vec<Failure>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(check: impl Into<String>, window: &Window) -> Self {
        Report {
            check: check.into(),
            params: BTreeMap::new(),
            window: window.labels(),
            dpow_bound: None,
            lossy: false,
            status: Status::Pass,
            verdict: String::new(),
            expected: None,
            failures: Vec::new(),
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// True unless an expectation exists and the status disagrees with it.
    pub fn as_expected(&self) -> bool {
        self.expected.is_none_or(|e| e == self.status)
    }

    pub(crate) fn fail(&mut self, label: impl Into<String>, inputs: Vec<String>, residual: impl ToString) {
        self.failures.push(Failure { label: label.into(), inputs, residual: residual.to_string() });
        self.status = Status::Fail;
    }

    pub(crate) fn witness(&mut self, label: impl Into<String>, detail: impl Into<String>) {
        self.witnesses.push(Witness { label: label.into(), detail: detail.into() });
    }

    pub(crate) fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Status follows the failure list; the verdict gets a default wording.
    pub(crate) fn finish(mut self, checked: usize, unit: &str) -> Self {
        self.status = Status::from_ok(self.failures.is_empty());
        if self.verdict.is_empty() {
            self.verdict = if self.failures.is_empty() {
                format!("all {checked} {unit} satisfy the identity")
            } else {
                format!("{} of {checked} {unit} fail", self.failures.len())
            };
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "check: {}", self.check);
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "params: {}", p.join(" "));
        }
        let _ = writeln!(s, "window ({} indices): {}", self.window.len(), self.window.join(", "));
        if let Some(d) = self.dpow_bound {
            let _ = writeln!(s, "dpow_bound: {d}");
        }
        let _ = writeln!(s, "status: {}", self.status.as_str().to_uppercase());
        if let Some(e) = self.expected {
            let _ = writeln!(s, "expected: {}", e.as_str().to_uppercase());
        }
        let _ = writeln!(s, "lossy: {}", self.lossy);
        let _ = writeln!(s, "verdict: {}", self.verdict);
        if !self.failures.is_empty() {
            let _ = writeln!(s, "failures:");
            for f in &self.failures {
                let _ = writeln!(s, "  [{}] ({}) residual: {}", f.label, f.inputs.join(", "), f.residual);
            }
        }
        if !self.witnesses.is_empty() {
            let _ = writeln!(s, "witnesses:");
            for w in &self.witnesses {
                let _ = writeln!(s, "  {}: {}", w.label, w.detail);
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}
