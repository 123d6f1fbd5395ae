//! Text and JSON reports.

use std::fmt::Write as _;

use jetcurv_core::oracle::{IdentityCheck, MatrixCheckReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub spec_hash: String,
    pub seed: String,
    pub command: String,
    pub results: Vec<Row>,
    #[serde(skip)]
    text: String,
}

pub fn spec_hash(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Report {
    pub fn new(command: &str, spec_bytes: &[u8], seed: u64) -> Self {
        Report {
            spec_hash: spec_hash(spec_bytes),
            seed: format!("{seed:#x}"),
            command: command.to_string(),
            results: Vec::new(),
            text: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.text, "{}", s.as_ref());
    }

    /// A reported value with no assertion attached.
    pub fn info(&mut self, name: impl Into<String>, value: impl Into<String>) {
        let name = name.into();
        let value = value.into();
        self.line(format!("  {name} = {value}"));
        self.results.push(Row {
            name,
            status: Status::Info,
            value: Some(serde_json::Value::String(value)),
            tolerance: None,
            residual: None,
        });
    }

    /// A zero test reported as `name = 0` or `name != 0`.
    pub fn zero_info(&mut self, name: &str, check: &IdentityCheck) {
        let value = if check.passed { "0" } else { "nonzero" };
        let shown = if check.passed {
            format!("{name} = 0")
        } else {
            format!("{name} != 0")
        };
        self.line(format!("  {shown}"));
        self.results.push(Row {
            name: name.to_string(),
            status: Status::Info,
            value: Some(serde_json::Value::String(value.into())),
            tolerance: Some(check.tolerance),
            residual: finite(check.max_residual),
        });
    }

    pub fn assert(&mut self, name: impl Into<String>, passed: bool, detail: &str) {
        let name = name.into();
        let status = if passed { Status::Pass } else { Status::Fail };
        self.line(format!("  {} {name}{}", tag(status), suffix(detail)));
        self.results.push(Row {
            name,
            status,
            value: None,
            tolerance: None,
            residual: None,
        });
    }

    pub fn check(&mut self, prefix: &str, check: &IdentityCheck) {
        let name = format!("{prefix}{}", check.name);
        let status = if check.passed { Status::Pass } else { Status::Fail };
        let method = format!("{:?}", check.method).to_lowercase();
        let mut detail = format!(
            "{method}, residual {:.1e}, tol {:.0e}",
            check.max_residual, check.tolerance
        );
        if !check.failures.is_empty() {
            let _ = write!(detail, "; fails at {}", check.failures.join(", "));
        }
        if let Some(e) = &check.error {
            let _ = write!(detail, "; {e}");
        }
        self.line(format!("  {} {name} ({detail})", tag(status)));
        self.results.push(Row {
            name,
            status,
            value: None,
            tolerance: Some(check.tolerance),
            residual: finite(check.max_residual),
        });
    }

    pub fn matrix(&mut self, prefix: &str, report: &MatrixCheckReport) {
        let status = if report.passed() { Status::Pass } else { Status::Fail };
        let summary: Vec<String> = report
            .checks
            .iter()
            .map(|c| format!("{}={}", c.name, fmt_num(c.value)))
            .collect();
        self.line(format!("  {} {prefix} ({})", tag(status), summary.join(", ")));
        for c in &report.checks {
            self.results.push(Row {
                name: format!("{prefix}: {}", c.name),
                status: if c.passed { Status::Pass } else { Status::Fail },
                value: serde_json::Number::from_f64(c.value).map(serde_json::Value::Number),
                tolerance: Some(c.tolerance),
                residual: finite((c.value - c.expected).abs()),
            });
        }
    }

    pub fn summary(&mut self) {
        let pass = self.results.iter().filter(|r| r.status == Status::Pass).count();
        let fail = self.results.iter().filter(|r| r.status == Status::Fail).count();
        self.line(format!("summary: {pass} passed, {fail} failed"));
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }
}

fn tag(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Info => "INFO",
    }
}

fn suffix(detail: &str) -> String {
    if detail.is_empty() {
        String::new()
    } else {
        format!(" ({detail})")
    }
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e9 {
        format!("{x:.0}")
    } else {
        format!("{x:.2e}")
    }
}
