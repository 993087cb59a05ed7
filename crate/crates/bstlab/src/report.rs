//! Machine-readable verification reports.
//!
//! Serialization is deterministic: struct field order is fixed, maps are
//! ordered, and no timestamps or timings are embedded, so identical runs
//! produce identical bytes.

use serde::Serialize;

use bstlab_core::stats::TestReport;

/// One elementary check inside a criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    /// The measured quantity the check gates on.
    pub statistic: f64,
    /// The gate: statistic is compared against this (direction depends on
    /// the check kind, recorded in `detail`).
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl CheckReport {
    /// Goodness-of-fit check: passes when `p > alpha`.
    pub fn from_test(name: impl Into<String>, t: TestReport, alpha: f64) -> Self {
        CheckReport {
            name: name.into(),
            pass: t.p_value > alpha,
            statistic: t.statistic,
            threshold: alpha,
            p_value: Some(t.p_value),
            sample_size: Some(t.sample_size),
            detail: String::from("pass iff p_value > threshold"),
        }
    }

    /// Magnitude check: passes when `statistic <= bound`.
    pub fn stat_at_most(name: impl Into<String>, statistic: f64, bound: f64) -> Self {
        CheckReport {
            name: name.into(),
            pass: statistic <= bound,
            statistic,
            threshold: bound,
            p_value: None,
            sample_size: None,
            detail: String::from("pass iff statistic <= threshold"),
        }
    }

    /// Exact check: passes when the flag is true; statistic is 0/1.
    pub fn exact(name: impl Into<String>, ok: bool) -> Self {
        CheckReport {
            name: name.into(),
            pass: ok,
            statistic: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            p_value: None,
            sample_size: None,
            detail: String::from("exact identity"),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Verification outcome of one acceptance criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
}

impl CriterionReport {
    pub fn new(id: u32, name: impl Into<String>, checks: Vec<CheckReport>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        CriterionReport {
            id,
            name: name.into(),
            pass,
            checks,
        }
    }

    /// The fixed-width console line for this criterion.
    pub fn console_line(&self) -> String {
        format!(
            "{} [{:>2}] {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name
        )
    }
}

/// A whole suite run, serializable as the machine-readable report.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, seed: u64, criteria: Vec<CriterionReport>) -> Self {
        let pass = criteria.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.into(),
            seed,
            pass,
            criteria,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
