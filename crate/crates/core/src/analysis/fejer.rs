//! Conditional quasi-Fejér inequality
//!
//! ```text
//! E_n[d^2(x_{n+1}, y)] <= d^2(x_n, y) - 2 t_n (F(x_n) - F(y)) + L^2 t_n^2
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::integrands::{Estimate, SubgradientOracle};
use crate::rng::{self, Purpose};
use crate::solver::{Moments, Problem, DEFAULT_EVAL_SAMPLES};

/// Exact conditional expectation over the atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FejerExact {
    pub lhs: f64,
    pub rhs: f64,
}

impl FejerExact {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

fn fejer_rhs(problem: &Problem, x: &Point, y: &Point, t: f64) -> Result<f64> {
    let space = &problem.space;
    let obj = &problem.objective;
    let l = obj.lipschitz_l();
    let fx = obj.mean_objective(space, x, DEFAULT_EVAL_SAMPLES)?.value;
    let fy = obj.mean_objective(space, y, DEFAULT_EVAL_SAMPLES)?.value;
    Ok(space.distance(x, y)?.powi(2) - 2.0 * t * (fx - fy) + l * l * t * t)
}

/// Enumerates the atoms of a finite objective to evaluate both sides.
pub fn fejer_exact(
    problem: &Problem,
    oracle: &dyn SubgradientOracle,
    x: &Point,
    y: &Point,
    t: f64,
) -> Result<FejerExact> {
    let atoms = problem
        .objective
        .atoms()
        .ok_or_else(|| Error::usage("exact conditional expectations need a finite sample space"))?;
    let mut lhs = 0.0;
    for atom in atoms {
        let step = problem.sb_step(oracle, x, &atom.kind, t)?;
        lhs += atom.w * problem.space.distance(&step.next, y)?.powi(2);
    }
    Ok(FejerExact {
        lhs,
        rhs: fejer_rhs(problem, x, y, t)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FejerMc {
    pub lhs: Estimate,
    pub rhs: f64,
    /// `lhs <= rhs + 3 stderr`.
    pub pass: bool,
}

/// Monte Carlo estimate of the conditional expectation from `replicas`
/// independent atoms.
pub fn fejer_mc_check(
    problem: &Problem,
    oracle: &dyn SubgradientOracle,
    x: &Point,
    y: &Point,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<FejerMc> {
    if replicas < 100 {
        return Err(Error::usage(format!(
            "fejer_mc_check needs at least 100 replicas, got {replicas}"
        )));
    }
    let mut m = Moments::default();
    for r in 0..replicas {
        let mut rng = rng::stream(seed, Purpose::Conditional, r as u64, 0);
        let atom = problem.objective.sample_with(&problem.space, &mut rng)?;
        let step = problem.sb_step(oracle, x, problem.objective.kind_of(&atom), t)?;
        m.push(problem.space.distance(&step.next, y)?.powi(2));
    }
    let lhs = Estimate {
        value: m.mean,
        stderr: m.stderr(),
    };
    let rhs = fejer_rhs(problem, x, y, t)?;
    Ok(FejerMc {
        lhs,
        rhs,
        pass: lhs.value <= rhs + 3.0 * lhs.stderr,
    })
}
