//! Ensembles of independent runs reduced to per-step statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::integrands::SubgradientOracle;
use crate::solver::{ergodic_update, reduce_replicas, Moments, Problem, Series};

/// Per-step quantities tracked across replicas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `d^2(x_n, x*)`.
    DistSq,
    /// `F(x_n) - min F`.
    Gap,
    /// `min_{i <= n} F(x_i) - min F`.
    RunMinGap,
    /// `F(x̄_n) - min F`.
    ErgodicGap,
    /// `d(x̄_n, x*)`.
    ErgodicDist,
    /// `X_n = d^2(x_n, x*) + L^2 sum_{m >= n} t_m^2`.
    Martingale,
}

const METRICS: usize = 6;

impl Metric {
    fn slot(self) -> usize {
        self as usize
    }
}

/// Counts replicas with `max_{start <= m <= horizon} metric_m >= level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exceedance {
    pub metric: Metric,
    pub start: usize,
    pub level: f64,
}

#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub replicas: usize,
    pub horizon: usize,
    pub seed: u64,
    pub x_star: Point,
    /// `min F`; objective metrics are skipped without it.
    pub min_f: Option<f64>,
    pub track_ergodic: bool,
    pub exceedances: Vec<Exceedance>,
    /// Replicas on which `E_n[X_{n+1}] <= X_n` is evaluated exactly by
    /// enumerating the atoms at every step.
    pub exact_conditional_replicas: usize,
}

#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub replicas: usize,
    pub horizon: usize,
    pub series: Series,
    pub exceedances: Vec<Exceedance>,
    pub exceed_counts: Vec<u64>,
    /// `d(x_H, x*)` per replica, in replica order.
    pub final_dist: Vec<f64>,
    /// `d(x̄_H, x*)` per replica when ergodic averages are tracked.
    pub final_erg_dist: Vec<f64>,
    /// Largest `E_n[X_{n+1}] - X_n` seen on the exactly enumerated replicas.
    pub exact_conditional_worst: Option<f64>,
}

struct Acc {
    series: Series,
    counts: Vec<u64>,
    final_dist: Vec<f64>,
    final_erg_dist: Vec<f64>,
    exact_worst: Option<f64>,
}

impl EnsembleStats {
    pub fn moments(&self, metric: Metric, n: usize) -> &Moments {
        self.series.get(n, metric.slot())
    }

    pub fn mean(&self, metric: Metric, n: usize) -> f64 {
        self.moments(metric, n).mean
    }

    pub fn stderr(&self, metric: Metric, n: usize) -> f64 {
        self.moments(metric, n).stderr()
    }

    pub fn exceedance_frequency(&self, i: usize) -> f64 {
        self.exceed_counts[i] as f64 / self.replicas as f64
    }
}

/// Simulates `spec.replicas` independent runs of `problem` in parallel.
pub fn simulate(problem: &Problem, oracle: &dyn SubgradientOracle, spec: &EnsembleSpec) -> Result<EnsembleStats> {
    if spec.replicas == 0 || spec.horizon == 0 {
        return Err(Error::usage("ensembles need at least one replica and one step"));
    }
    let space = &problem.space;
    let obj = &problem.objective;
    let schedule = &problem.schedule;
    let steps = spec.horizon + 1;
    let l2 = obj.lipschitz_l().powi(2);
    let tails: Option<Vec<f64>> = (0..=steps).map(|n| schedule.sq_tail(n)).collect();
    let finite = obj.atoms().is_some();
    let f_of = |x: &Point| {
        obj.mean_objective(space, x, crate::solver::DEFAULT_EVAL_SAMPLES)
            .map(|e| e.value)
    };

    let init = || Acc {
        series: Series::new(steps, METRICS),
        counts: vec![0; spec.exceedances.len()],
        final_dist: Vec::new(),
        final_erg_dist: Vec::new(),
        exact_worst: None,
    };

    let per_replica = |replica: u64, acc: &mut Acc| -> Result<()> {
        let mut hit = vec![false; spec.exceedances.len()];
        let mut run_min = f64::INFINITY;
        let mut erg: Option<(Point, f64)> = spec.track_ergodic.then(|| (problem.x0.clone(), schedule.step(0)));
        let exact = finite && tails.is_some() && (replica as usize) < spec.exact_conditional_replicas;

        let mut observe = |n: usize, x: &Point, erg: &Option<(Point, f64)>, acc: &mut Acc| -> Result<()> {
            let d2 = space.distance(x, &spec.x_star)?.powi(2);
            let mut vals = [f64::NAN; METRICS];
            vals[Metric::DistSq.slot()] = d2;
            if let Some(tails) = &tails {
                vals[Metric::Martingale.slot()] = d2 + l2 * tails[n];
            }
            if let Some(min_f) = spec.min_f {
                let gap = f_of(x)? - min_f;
                run_min = run_min.min(gap);
                vals[Metric::Gap.slot()] = gap;
                vals[Metric::RunMinGap.slot()] = run_min;
                if let Some((avg, _)) = erg {
                    vals[Metric::ErgodicGap.slot()] = f_of(avg)? - min_f;
                }
            }
            if let Some((avg, _)) = erg {
                vals[Metric::ErgodicDist.slot()] = space.distance(avg, &spec.x_star)?;
            }
            for (slot, v) in vals.iter().enumerate() {
                if !v.is_nan() {
                    acc.series.push(n, slot, *v);
                }
            }
            for (h, e) in hit.iter_mut().zip(&spec.exceedances) {
                if n >= e.start && vals[e.metric.slot()] >= e.level {
                    *h = true;
                }
            }
            Ok(())
        };

        let mut last = problem.x0.clone();
        for tr in problem.transitions(oracle, spec.seed, replica, spec.horizon) {
            let tr = tr?;
            observe(tr.n, &tr.x, &erg, acc)?;
            if exact {
                let tails = tails.as_ref().expect("checked above");
                let atoms = obj.atoms().expect("checked above");
                let mut next_mean = 0.0;
                for atom in atoms {
                    let step = problem.sb_step(oracle, &tr.x, &atom.kind, tr.t)?;
                    next_mean += atom.w * space.distance(&step.next, &spec.x_star)?.powi(2);
                }
                let x_n = space.distance(&tr.x, &spec.x_star)?.powi(2) + l2 * tails[tr.n];
                let x_next = next_mean + l2 * tails[tr.n + 1];
                let inc = x_next - x_n;
                acc.exact_worst = Some(acc.exact_worst.map_or(inc, |w| w.max(inc)));
            }
            if let Some((avg, w)) = &erg {
                erg = Some(ergodic_update(space, avg, *w, &tr.next, schedule.step(tr.n + 1))?);
            }
            last = tr.next;
        }
        observe(spec.horizon, &last, &erg, acc)?;
        for (c, h) in acc.counts.iter_mut().zip(&hit) {
            *c += u64::from(*h);
        }
        acc.final_dist.push(space.distance(&last, &spec.x_star)?);
        if let Some((avg, _)) = &erg {
            acc.final_erg_dist.push(space.distance(avg, &spec.x_star)?);
        }
        Ok(())
    };

    let merge = |a: &mut Acc, b: Acc| {
        a.series.merge(&b.series);
        for (x, y) in a.counts.iter_mut().zip(&b.counts) {
            *x += y;
        }
        a.final_dist.extend(b.final_dist);
        a.final_erg_dist.extend(b.final_erg_dist);
        a.exact_worst = match (a.exact_worst, b.exact_worst) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
    };

    let acc = reduce_replicas(spec.replicas, init, per_replica, merge)?;
    Ok(EnsembleStats {
        replicas: spec.replicas,
        horizon: spec.horizon,
        series: acc.series,
        exceedances: spec.exceedances.clone(),
        exceed_counts: acc.counts,
        final_dist: acc.final_dist,
        final_erg_dist: acc.final_erg_dist,
        exact_conditional_worst: acc.exact_worst,
    })
}

/// Binomial standard error of a frequency estimated from `n` trials.
pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / n as f64).sqrt()
}
