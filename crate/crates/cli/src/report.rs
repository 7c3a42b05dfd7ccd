use std::collections::BTreeMap;

use dioph_core::{Budget, Equation};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Verdict {
    pub fn check(name: impl Into<String>, ok: bool, reason: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            reason: Some(reason.into()),
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            status: Status::Skipped,
            reason: Some(reason.into()),
        }
    }
}

/// Structured result of one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equation: Option<Equation>,
    pub budgets: Budget,
    pub parallelism: usize,
    pub results: serde_json::Value,
    pub verdicts: Vec<Verdict>,
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, budgets: Budget, parallelism: usize) -> Self {
        RunReport {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            equation: None,
            budgets,
            parallelism,
            results: serde_json::Value::Null,
            verdicts: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn any_failed(&self) -> bool {
        self.verdicts.iter().any(|v| v.status == Status::Fail)
    }
}
