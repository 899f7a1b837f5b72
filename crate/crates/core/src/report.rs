//! Structured pass/fail records shared by every suite.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub at: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    pub params: BTreeMap<String, String>,
    pub counts: BTreeMap<String, u64>,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// Failures kept in full; the rest are only counted.
pub const FAILURE_CAP: usize = 50;

impl Report {
    pub fn new(suite: &str, kind: &str) -> Self {
        Report {
            suite: suite.into(),
            kind: kind.into(),
            seed: None,
            window: None,
            params: BTreeMap::new(),
            counts: BTreeMap::new(),
            failures: Vec::new(),
            notes: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.count("failed") == 0
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn bump(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.into()).or_insert(0) += by;
    }

    pub fn count_check(&mut self) {
        self.bump("checks", 1);
    }

    pub fn fail(&mut self, at: String, lhs: String, rhs: String) {
        self.bump("failed", 1);
        if self.failures.len() < FAILURE_CAP {
            self.failures.push(Failure { at, lhs, rhs });
        }
    }

    pub fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    /// Folds another report's counts, failures and notes into this one.
    pub fn absorb(&mut self, other: Report) {
        for (k, v) in other.counts {
            self.bump(&k, v);
        }
        for f in other.failures {
            if self.failures.len() < FAILURE_CAP {
                self.failures.push(f);
            }
        }
        self.notes.extend(other.notes);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
