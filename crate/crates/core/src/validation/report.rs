use serde::{Deserialize, Serialize};

/// One numeric comparison inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: String,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=".into(),
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=".into(),
            threshold,
            passed: value >= threshold,
        }
    }

    /// Exact predicate, recorded as `1 >= 1` or `0 >= 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    /// Set when the suite could not run to completion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    /// One-line summary.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{status} {:<20} {:>8.2}s  {} checks",
            self.suite,
            self.seconds,
            self.checks.len()
        );
        if let Some(e) = &self.error {
            line.push_str(&format!("  error: {e}"));
        }
        if !failed.is_empty() {
            line.push_str(&format!("  failed: {}", failed.join(", ")));
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}
