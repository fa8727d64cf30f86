//! The stochastic Busemann subgradient iteration
//!
//! ```text
//! x_{n+1} = P_C( r_{x_n, xi_n}(s_n t_n) ),   [xi_n, s_n] = oracle(e_{n+1}, x_n)
//! ```
//!
//! with step-size schedules, geodesic ergodic averages and trajectory
//! recording.

mod ensemble;
mod schedule;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Assumption, Error, Result};
use crate::geometry::{ConeElement, ConvexSet, Point, Space};
use crate::integrands::{
    Estimate, ExactOracle, IntegrandKind, ObjectiveSpec, SampledAtom, StochasticObjective, SubgradientOracle,
};

pub use ensemble::{reduce_replicas, Moments, Series};
pub use schedule::StepSchedule;

/// Feasibility tolerance for iterates and starting points.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Default Monte Carlo sample size for `F` on parametric objectives.
pub const DEFAULT_EVAL_SAMPLES: usize = 10_000;

fn default_stride() -> usize {
    1
}

fn default_eval_samples() -> usize {
    DEFAULT_EVAL_SAMPLES
}

/// Everything that determines a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub space: Space,
    #[serde(alias = "C", default = "whole_space")]
    pub constraint: ConvexSet,
    pub objective: ObjectiveSpec,
    pub schedule: StepSchedule,
    pub x0: Point,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default)]
    pub record_ergodic: bool,
    /// Record every `stride`-th step (plus the last one).
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default = "default_eval_samples")]
    pub eval_samples: usize,
    /// Known minimizer, used for the distance columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_star: Option<Point>,
}

fn whole_space() -> ConvexSet {
    ConvexSet::WholeSpace
}

impl RunConfig {
    /// Validates the configuration and resolves the objective.
    pub fn problem(&self) -> Result<Problem> {
        if self.iterations == 0 {
            return Err(Error::usage("iterations must be at least 1"));
        }
        if self.stride == 0 {
            return Err(Error::usage("stride must be at least 1"));
        }
        if let Some(max) = self.schedule.max_steps() {
            if self.iterations > max {
                return Err(Error::config(
                    Assumption::Par,
                    format!(
                        "explicit schedule with a declared tail covers {max} steps, run asks for {}",
                        self.iterations
                    ),
                ));
            }
        }
        if let Some(x) = &self.x_star {
            self.space.validate_point(x)?;
        }
        Problem::new(
            self.space.clone(),
            self.constraint.clone(),
            &self.objective,
            self.schedule.clone(),
            self.x0.clone(),
        )
    }
}

/// A validated instance of the constrained stochastic problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub space: Space,
    pub constraint: ConvexSet,
    pub objective: StochasticObjective,
    pub schedule: StepSchedule,
    pub x0: Point,
}

impl Problem {
    pub fn new(
        space: Space,
        constraint: ConvexSet,
        objective: &ObjectiveSpec,
        schedule: StepSchedule,
        x0: Point,
    ) -> Result<Self> {
        if let ConvexSet::Ball { center, radius } = &constraint {
            space.validate_point(center)?;
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Error::config(Assumption::Feasibility, format!("ball radius {radius}")));
            }
        }
        space.validate_point(&x0)?;
        if !constraint.contains(&space, &x0, FEASIBILITY_TOL)? {
            return Err(Error::config(Assumption::Feasibility, "x0 does not lie in C"));
        }
        schedule.validate()?;
        let objective = StochasticObjective::resolve(objective, &space, &constraint)?;
        Ok(Problem {
            space,
            constraint,
            objective,
            schedule,
            x0,
        })
    }

    /// The transitions of replica `replica` under seed `seed`.
    pub fn transitions<'a>(
        &'a self,
        oracle: &'a dyn SubgradientOracle,
        seed: u64,
        replica: u64,
        iterations: usize,
    ) -> Transitions<'a> {
        Transitions {
            problem: self,
            oracle,
            seed,
            replica,
            iterations,
            n: 0,
            x: self.x0.clone(),
        }
    }

    pub fn sb_step(&self, oracle: &dyn SubgradientOracle, x: &Point, kind: &IntegrandKind, t: f64) -> Result<Step> {
        sb_step(&self.space, &self.constraint, oracle, x, kind, t)
    }
}

/// Outcome of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub next: Point,
    pub g: ConeElement,
}

/// One iteration of the method. A zero subgradient leaves the point in place.
pub fn sb_step(
    space: &Space,
    constraint: &ConvexSet,
    oracle: &dyn SubgradientOracle,
    x: &Point,
    kind: &IntegrandKind,
    t: f64,
) -> Result<Step> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::usage(format!("step size must be positive, got {t}")));
    }
    let g = oracle.subgradient(space, kind, x)?;
    let next = match &g {
        ConeElement::Zero => x.clone(),
        ConeElement::Ray { direction, speed } => {
            let y = space.ray_point(x, direction, speed * t)?;
            constraint.project(space, &y)?
        }
    };
    Ok(Step { next, g })
}

/// `x_n -> x_{n+1}` together with the step data.
#[derive(Debug, Clone)]
pub struct Transition {
    pub n: usize,
    pub t: f64,
    pub x: Point,
    pub atom: SampledAtom,
    pub g: ConeElement,
    pub next: Point,
}

pub struct Transitions<'a> {
    problem: &'a Problem,
    oracle: &'a dyn SubgradientOracle,
    seed: u64,
    replica: u64,
    iterations: usize,
    n: usize,
    x: Point,
}

impl Transitions<'_> {
    fn advance(&mut self) -> Result<Transition> {
        let p = self.problem;
        let atom = p.objective.sample(&p.space, self.seed, self.replica, self.n as u64)?;
        let t = p.schedule.step(self.n);
        let Step { next, g } = p.sb_step(self.oracle, &self.x, p.objective.kind_of(&atom), t)?;
        let x = std::mem::replace(&mut self.x, next.clone());
        let tr = Transition {
            n: self.n,
            t,
            x,
            atom,
            g,
            next,
        };
        self.n += 1;
        Ok(tr)
    }
}

impl Iterator for Transitions<'_> {
    type Item = Result<Transition>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.n >= self.iterations {
            return None;
        }
        let r = self.advance();
        if r.is_err() {
            self.iterations = self.n;
        }
        Some(r)
    }
}

/// `(x̄_{n+1}, t̄_{n+1})` from `(x̄_n, t̄_n)` and `(x_{n+1}, t_{n+1})`.
pub fn ergodic_update(space: &Space, avg: &Point, weight: f64, x_next: &Point, t_next: f64) -> Result<(Point, f64)> {
    if !(weight > 0.0 && t_next > 0.0) {
        return Err(Error::usage(format!(
            "ergodic weights must be positive, got {weight} and {t_next}"
        )));
    }
    let total = weight + t_next;
    Ok((space.combine(avg, x_next, t_next / total)?, total))
}

/// `2 (1 + ln 3) m L D / sqrt(n + 2)`.
pub fn running_min_bound(m: usize, l: f64, d: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::usage(format!("the running-minimum bound needs n >= 2, got {n}")));
    }
    Ok(2.0 * (1.0 + 3f64.ln()) * m as f64 * l * d / ((n + 2) as f64).sqrt())
}

/// One recorded step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub n: usize,
    pub x: Point,
    pub t: f64,
    /// Atom drawn at this step; absent on the final record.
    pub atom: Option<SampledAtom>,
    pub g: Option<ConeElement>,
    pub f: Estimate,
    pub dist_to_opt: Option<f64>,
    /// `(x̄_n, t̄_n)`.
    pub ergodic: Option<(Point, f64)>,
    pub erg_f: Option<Estimate>,
    pub erg_dist: Option<f64>,
    pub run_min_f: f64,
}

/// A recorded run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub stride: usize,
    pub x_star: Option<Point>,
}

pub const CSV_HEADER: &str = "n,t_n,F,dist_to_opt,erg_F,erg_dist,run_min_F";

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.n,
                r.t,
                r.f.value,
                opt(r.dist_to_opt),
                opt(r.erg_f.map(|e| e.value)),
                opt(r.erg_dist),
                r.run_min_f
            )?;
        }
        Ok(())
    }

    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("trajectories are never empty")
    }

    /// Consecutive recorded pairs `(x_n, x_{n+1})`; requires stride 1.
    pub fn consecutive(&self) -> Result<impl Iterator<Item = (&StepRecord, &StepRecord)>> {
        if self.stride != 1 {
            return Err(Error::usage("per-step checks need a trajectory recorded with stride 1"));
        }
        Ok(self.records.iter().zip(self.records.iter().skip(1)))
    }
}

/// Runs the method with the exact oracle.
pub fn run(cfg: &RunConfig) -> Result<Trajectory> {
    run_with(cfg, &ExactOracle, 0)
}

/// Runs replica `replica` of a configuration with a given oracle.
pub fn run_with(cfg: &RunConfig, oracle: &dyn SubgradientOracle, replica: u64) -> Result<Trajectory> {
    let problem = cfg.problem()?;
    let space = &problem.space;
    let objective = &problem.objective;
    let x_star = cfg.x_star.clone();
    let eval = |x: &Point| objective.mean_objective(space, x, cfg.eval_samples);
    let dist = |x: &Point| -> Result<Option<f64>> { x_star.as_ref().map(|s| space.distance(x, s)).transpose() };

    let mut records = Vec::with_capacity(cfg.iterations / cfg.stride + 2);
    let mut run_min = f64::INFINITY;
    let mut ergodic: Option<(Point, f64)> = None;

    let mut record = |n: usize,
                      x: &Point,
                      atom: Option<SampledAtom>,
                      g: Option<ConeElement>,
                      ergodic: &Option<(Point, f64)>|
     -> Result<()> {
        let f = eval(x)?;
        run_min = run_min.min(f.value);
        if n.is_multiple_of(cfg.stride) || n == cfg.iterations {
            let (erg_f, erg_dist) = match ergodic {
                Some((avg, _)) => (Some(eval(avg)?), dist(avg)?),
                None => (None, None),
            };
            records.push(StepRecord {
                n,
                x: x.clone(),
                t: problem.schedule.step(n),
                atom,
                g,
                f,
                dist_to_opt: dist(x)?,
                ergodic: ergodic.clone(),
                erg_f,
                erg_dist,
                run_min_f: run_min,
            });
        }
        Ok(())
    };

    if cfg.record_ergodic {
        ergodic = Some((problem.x0.clone(), problem.schedule.step(0)));
    }
    let mut last = problem.x0.clone();
    for tr in problem.transitions(oracle, cfg.seed, replica, cfg.iterations) {
        let tr = tr?;
        record(tr.n, &tr.x, Some(tr.atom), Some(tr.g), &ergodic)?;
        if let Some((avg, w)) = &ergodic {
            ergodic = Some(ergodic_update(
                space,
                avg,
                *w,
                &tr.next,
                problem.schedule.step(tr.n + 1),
            )?);
        }
        last = tr.next;
    }
    record(cfg.iterations, &last, None, None, &ergodic)?;
    Ok(Trajectory {
        records,
        stride: cfg.stride,
        x_star,
    })
}
