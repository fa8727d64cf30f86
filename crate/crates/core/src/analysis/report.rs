//! Machine-readable check results.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

/// One named check. `worst_defect` is a slack: the check passes iff
/// `worst_defect >= -tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub worst_defect: f64,
    pub tolerance: f64,
    pub replicas: usize,
    pub seed: u64,
    /// The mathematical statement the check exercises.
    pub anchor: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub defects: Vec<f64>,
}

impl CheckResult {
    pub fn from_slack(name: &str, anchor: &str, worst_defect: f64, tolerance: f64) -> Self {
        let pass = worst_defect >= -tolerance;
        Self {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            worst_defect,
            tolerance,
            replicas: 1,
            seed: 0,
            anchor: anchor.into(),
            defects: Vec::new(),
        }
    }

    /// A boolean outcome; `worst_defect` carries the supplied margin.
    pub fn from_outcome(name: &str, anchor: &str, pass: bool, margin: f64, tolerance: f64) -> Self {
        let mut r = Self::from_slack(name, anchor, margin, tolerance);
        r.status = if pass { Status::Pass } else { Status::Fail };
        r
    }

    pub fn with_sampling(mut self, replicas: usize, seed: u64) -> Self {
        self.replicas = replicas;
        self.seed = seed;
        self
    }

    pub fn with_defects(mut self, defects: Vec<f64>) -> Self {
        self.defects = defects;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Self {
            suite: suite.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Long-format `check,index,defect` table of every recorded defect.
    pub fn write_defects_csv(&self, path: &Path) -> Result<()> {
        let mut out = fs::File::create(path)?;
        writeln!(out, "check,index,defect")?;
        for c in &self.checks {
            for (i, d) in c.defects.iter().enumerate() {
                writeln!(out, "{},{i},{d:e}", c.name)?;
            }
        }
        Ok(())
    }
}
