//! Report entries and their two renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub verdict: Verdict,
    /// Short human summary.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub summary: String,
    /// A witness or counterexample, re-checked before it is attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<String>,
}

impl Entry {
    pub fn new(name: &str, verdict: Verdict, summary: impl Into<String>) -> Entry {
        Entry {
            name: name.to_string(),
            verdict,
            summary: summary.into(),
            certificate: None,
            residuals: Vec::new(),
        }
    }

    pub fn pass(name: &str, summary: impl Into<String>) -> Entry {
        Entry::new(name, Verdict::Pass, summary)
    }

    pub fn fail(name: &str, summary: impl Into<String>) -> Entry {
        Entry::new(name, Verdict::Fail, summary)
    }

    pub fn unknown(name: &str, summary: impl Into<String>) -> Entry {
        Entry::new(name, Verdict::Unknown, summary)
    }

    pub fn with_certificate(mut self, c: Value) -> Entry {
        self.certificate = Some(c);
        self
    }

    pub fn with_residuals(mut self, r: Vec<String>) -> Entry {
        self.residuals = r;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub entries: Vec<Entry>,
}

impl Report {
    /// 0 when every entry passes, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.entries.iter().all(|e| e.verdict == Verdict::Pass) {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{} {}\n", self.command, self.input);
        for e in &self.entries {
            let tag = match e.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::Unknown => "unknown",
            };
            let _ = write!(out, "  [{tag}] {}", e.name);
            if !e.summary.is_empty() {
                let _ = write!(out, ": {}", e.summary);
            }
            out.push('\n');
            for r in &e.residuals {
                let _ = writeln!(out, "      residual {r}");
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_exit_codes() {
        let r = Report {
            command: "check-algebroid".into(),
            input: "a.json".into(),
            entries: vec![
                Entry::pass("antisymmetry", ""),
                Entry::fail("jacobi", "1 failure")
                    .with_residuals(vec!["-1".into()])
                    .with_certificate(serde_json::json!({"indices": [1, 2, 3, 3]})),
            ],
        };
        let back: Report = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.exit_code(), 1);
        assert!(r.render_text().contains("[FAIL] jacobi: 1 failure"));
        let ok = Report { entries: vec![Entry::pass("x", "")], ..r };
        assert_eq!(ok.exit_code(), 0);
    }
}
