use std::fs;
use std::path::{Path, PathBuf};

use busemann::{Error, Result, RunConfig};
use serde::{Deserialize, Serialize};

/// Checks a manifest can request. Trajectory checks run under `run`,
/// ensemble checks under `mc`; each command skips the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    PerStepDescent,
    ErgodicJensen,
    StrongConvexityGap,
    RunningMinBound,
    Supermartingale,
}

impl CheckId {
    pub fn name(self) -> &'static str {
        match self {
            CheckId::PerStepDescent => "per_step_descent",
            CheckId::ErgodicJensen => "ergodic_jensen",
            CheckId::StrongConvexityGap => "strong_convexity_gap",
            CheckId::RunningMinBound => "running_min_bound",
            CheckId::Supermartingale => "supermartingale",
        }
    }

    pub fn is_ensemble(self) -> bool {
        matches!(self, CheckId::RunningMinBound | CheckId::Supermartingale)
    }
}

fn one() -> usize {
    1
}

fn here() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub name: String,
    pub run_config: RunConfig,
    #[serde(default)]
    pub checks: Vec<CheckId>,
    #[serde(default = "one")]
    pub replicas: usize,
    #[serde(default = "here")]
    pub output_dir: PathBuf,
}

impl ExperimentManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes =
            fs::read(path).map_err(|e| Error::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
        let m: Self = serde_json::from_slice(&bytes)?;
        if m.replicas == 0 {
            return Err(Error::Usage("replicas must be at least 1".into()));
        }
        if m.name.is_empty() {
            return Err(Error::Usage("manifest name must not be empty".into()));
        }
        Ok(m)
    }

    /// Creates the output directory and returns the path of `file` inside it.
    pub fn output(&self, file: &str) -> Result<PathBuf> {
        prepare_dir(&self.output_dir)?;
        Ok(self.output_dir.join(file))
    }
}

pub fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Usage(format!("output directory {} is not writable: {e}", dir.display())))
}
