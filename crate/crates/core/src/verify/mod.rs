//! Property suites run by `busemann verify`.

mod fejer;
mod geometry;
mod integrands;
mod rates;

use std::fmt;
use std::str::FromStr;

use crate::analysis::report::{CheckResult, Report};
use crate::error::{Error, Result};
use crate::experiments::{self, Experiment, Model};
use crate::geometry::{ConvexSet, Point, Space};
use crate::integrands::{Atom, IntegrandKind, ObjectiveSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Integrands,
    Fejer,
    Rates,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["geometry", "integrands", "fejer", "rates", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "geometry" => Suite::Geometry,
            "integrands" => Suite::Integrands,
            "fejer" => Suite::Fejer,
            "rates" => Suite::Rates,
            "all" => Suite::All,
            other => {
                return Err(Error::Usage(format!(
                    "unknown suite {other:?}, expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random quadruples per space for the geometric checks.
    pub quadruples: usize,
    /// Random states per experiment for pointwise checks.
    pub states: usize,
    /// Replicas for ensemble-based checks.
    pub replicas: usize,
    /// Replace the oracle by one reporting speed `L + 1`.
    pub inject_speed_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 2024,
            quadruples: 10_000,
            states: 1_000,
            replicas: 1_000,
            inject_speed_fault: false,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<Report> {
    let mut report = Report::new(&suite.to_string());
    let parts: &[Suite] = match suite {
        Suite::All => &[Suite::Geometry, Suite::Integrands, Suite::Fejer, Suite::Rates],
        _ => std::slice::from_ref(&suite),
    };
    for part in parts {
        let checks = match part {
            Suite::Geometry => geometry::run(opts)?,
            Suite::Integrands => integrands::run(opts)?,
            Suite::Fejer => fejer::run(opts)?,
            Suite::Rates => rates::run(opts)?,
            Suite::All => unreachable!("expanded above"),
        };
        for c in checks {
            report.push(c);
        }
    }
    Ok(report)
}

/// Running minimum of slacks for one check.
#[derive(Debug, Clone)]
struct Slack {
    worst: f64,
    keep: bool,
    all: Vec<f64>,
}

impl Slack {
    fn new() -> Self {
        Slack {
            worst: f64::INFINITY,
            keep: false,
            all: Vec::new(),
        }
    }

    fn recording() -> Self {
        Slack {
            keep: true,
            ..Slack::new()
        }
    }

    fn push(&mut self, v: f64) {
        // NaN must fail
        self.worst = if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.worst.min(v)
        };
        if self.keep {
            self.all.push(v);
        }
    }

    fn extend(&mut self, vs: impl IntoIterator<Item = f64>) {
        for v in vs {
            self.push(v);
        }
    }

    fn check(self, name: &str, anchor: &str, tolerance: f64) -> CheckResult {
        CheckResult::from_slack(name, anchor, self.worst, tolerance).with_defects(self.all)
    }
}

fn atom(kind: IntegrandKind, w: f64) -> Atom {
    Atom { kind, w }
}

/// An objective exercising every integrand kind in the unit ball of `model`.
fn kinds_experiment(model: Model) -> Result<Experiment> {
    let space = model.space();
    let (a, b, eta) = match model {
        Model::StarTree => (
            space.star_point(0, 0.4)?,
            space.star_point(1, 0.6)?,
            space.star_direction(2)?,
        ),
        Model::Hyperbolic => (
            space.hyperbolic_point(&[0.4, 0.1])?,
            space.hyperbolic_point(&[-0.3, 0.5])?,
            space.direction(&[0.6, -0.8])?,
        ),
        Model::Euclidean => (
            space.point(&[0.4, 0.1])?,
            space.point(&[-0.3, 0.5])?,
            space.direction(&[0.6, -0.8])?,
        ),
    };
    let atoms = vec![
        atom(IntegrandKind::DistTo { a: a.clone() }, 0.25),
        atom(IntegrandKind::HalfSqDist { a: b.clone() }, 0.25),
        atom(IntegrandKind::BusemannLinear { eta, s0: 0.5 }, 0.2),
        atom(
            IntegrandKind::FiniteMax {
                members: vec![IntegrandKind::DistTo { a }, IntegrandKind::HalfSqDist { a: b }],
            },
            0.3,
        ),
    ];
    let mut e = experiments::mixture(model, experiments::Mixture::HalfSq, 100, 0);
    e.name = format!("{}_all_kinds", model.name());
    e.config.objective = ObjectiveSpec::Atoms(atoms);
    Ok(e)
}

/// Random points of `C`.
fn points_in(space: &Space, c: &ConvexSet, count: usize, rng: &mut impl rand::Rng) -> Result<Vec<Point>> {
    crate::integrands::probes(space, c, count, crate::integrands::DEFAULT_PROBE_WINDOW, rng)
}
