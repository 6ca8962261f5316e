//! Pass/fail reporting for the built-in verification suites.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> SuiteReport {
        SuiteReport { suite: suite.into(), entries: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, cases: usize, failures: usize) {
        self.entries.push(SuiteEntry { name: name.into(), cases, failures, detail: None });
    }

    pub fn push_detail(
        &mut self,
        name: impl Into<String>,
        cases: usize,
        failures: usize,
        detail: impl Into<String>,
    ) {
        self.entries.push(SuiteEntry {
            name: name.into(),
            cases,
            failures,
            detail: Some(detail.into()),
        });
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.failures == 0)
    }

    pub fn total_cases(&self) -> usize {
        self.entries.iter().map(|e| e.cases).sum()
    }
}
