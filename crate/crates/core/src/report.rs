//! Check reports shared by the verification suites and the CLI.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub instances: u64,
    /// Instances that could not be evaluated inside a file algebra's cutoff.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub skipped: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

fn is_zero(n: &u64) -> bool {
    *n == 0
}

impl CheckRecord {
    pub fn new(name: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            instances: 0,
            skipped: 0,
            status: Status::Pass,
            counterexample: None,
            value: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Record a failure, keeping the first counterexample.
    pub fn fail(&mut self, why: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::Fail;
            self.counterexample = Some(why.into());
        }
    }

    pub fn with_value(mut self, v: impl Into<String>) -> Self {
        self.value = Some(v.into());
        self
    }

    /// Fold another tally of the same check into this one.
    pub fn merge(&mut self, other: CheckRecord) {
        self.instances += other.instances;
        self.skipped += other.skipped;
        if let Some(c) = other.counterexample {
            self.fail(c);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed() { "pass" } else { "FAIL" };
            write!(f, "  {:<width$}  {status}  {:>7} instances", c.name, c.instances)?;
            if c.skipped > 0 {
                write!(f, " ({} skipped)", c.skipped)?;
            }
            if let Some(v) = &c.value {
                write!(f, "  value={v}")?;
            }
            writeln!(f)?;
            if let Some(ce) = &c.counterexample {
                writeln!(f, "      counterexample: {ce}")?;
            }
        }
        if let Some(ms) = self.elapsed_ms {
            writeln!(f, "  ({ms} ms)")?;
        }
        Ok(())
    }
}
