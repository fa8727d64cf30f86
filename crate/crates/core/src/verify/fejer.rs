use rand::Rng;

use super::{points_in, Slack};
use crate::analysis::ergodic::{jensen_defects, shifted_contraction};
use crate::analysis::fejer::{fejer_exact, fejer_mc_check};
use crate::analysis::martingale::{supermartingale_series, ville_requests};
use crate::analysis::monte_carlo::{simulate, EnsembleSpec, Metric};
use crate::analysis::per_step::per_step_inequality;
use crate::analysis::reference::reference_minimizer;
use crate::analysis::report::CheckResult;
use crate::analysis::sequences::{qihou_check, QihouInstance};
use crate::analysis::strong_convexity_gap;
use crate::error::Result;
use crate::experiments::{self, Mixture, Model};
use crate::integrands::{tolerance_for, ExactOracle};
use crate::rng::{self, Purpose};
use crate::solver;

/// Iterations of the recorded trajectories.
const TRAJECTORY_STEPS: usize = 2_000;
/// Seeds per experiment for trajectory checks.
const TRAJECTORY_SEEDS: u64 = 2;
/// Exact Fejér slack allowed for rounding.
const EXACT_TOL: f64 = 1e-12;
/// Replicas per state of the Monte Carlo Fejér check.
const MC_REPLICAS: usize = 1_000;

pub(super) fn run(opts: &super::VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for e in experiments::mixture_suite(TRAJECTORY_STEPS, opts.seed) {
        let problem = e.config.problem()?;
        let space = &problem.space;
        let tol = tolerance_for(space);
        let reference = reference_minimizer(&problem)?;
        let name = |check: &str| format!("fejer/{}/{check}", e.name);

        let mut descent = Slack::recording();
        let mut jensen = Slack::new();
        let mut gap = Slack::new();
        let mut contraction = Slack::new();
        for s in 0..TRAJECTORY_SEEDS {
            let mut cfg = e.config.clone();
            cfg.seed = opts.seed + s;
            cfg.x_star = Some(reference.x_star.clone());
            let traj = solver::run(&cfg)?;
            descent.extend(per_step_inequality(&problem, &traj, &reference.x_star)?);
            if cfg.record_ergodic {
                jensen.extend(jensen_defects(&traj, reference.min_f)?);
                let xs: Vec<_> = traj.records.iter().map(|r| r.x.clone()).collect();
                let m_max = if space.base().coords().is_none() { 10 } else { 50 };
                contraction.push(shifted_contraction(space, &xs, &problem.schedule, 3, m_max)?.worst_defect);
            } else {
                let alpha = problem.objective.strong_convexity();
                gap.extend(strong_convexity_gap(
                    space,
                    &traj,
                    &reference.x_star,
                    reference.min_f,
                    alpha,
                )?);
            }
        }
        out.push(descent.check(
            &name("per_step_descent"),
            "sample-wise descent inequality of one step",
            tol,
        ));
        if jensen.worst.is_finite() {
            out.push(jensen.check(
                &name("ergodic_jensen"),
                "Jensen bound for geodesic ergodic averages",
                tol,
            ));
            out.push(contraction.check(
                &name("shifted_contraction"),
                "contraction of shifted ergodic averages",
                tol,
            ));
        }
        if gap.worst.is_finite() {
            out.push(gap.check(
                &name("strong_convexity_gap"),
                "quadratic growth of F around its minimizer",
                tol,
            ));
        }

        let mut rng = rng::stream(opts.seed, Purpose::Probe, 200, 0);
        let xs = points_in(space, &problem.constraint, opts.states, &mut rng)?;
        let ys = points_in(space, &problem.constraint, opts.states, &mut rng)?;
        let mut exact = Slack::new();
        for (x, y) in xs.iter().zip(&ys) {
            let t = rng.random_range(1e-3..1.0);
            exact.push(fejer_exact(&problem, &ExactOracle, x, y, t)?.slack());
        }
        out.push(exact.check(
            &name("fejer_exact"),
            "conditional quasi-Fejér inequality by atom enumeration",
            EXACT_TOL,
        ));

        let mut mc = Slack::new();
        for (i, x) in xs.iter().take(10).enumerate() {
            let r = fejer_mc_check(
                &problem,
                &ExactOracle,
                x,
                &reference.x_star,
                0.5,
                MC_REPLICAS,
                opts.seed + i as u64,
            )?;
            mc.push(r.rhs + 3.0 * r.lhs.stderr - r.lhs.value);
        }
        out.push(
            mc.check(
                &name("fejer_monte_carlo"),
                "conditional quasi-Fejér inequality, sampled",
                0.0,
            )
            .with_sampling(MC_REPLICAS, opts.seed),
        );
    }
    out.extend(martingale_checks(opts)?);
    for c in &mut out {
        c.seed = opts.seed;
    }
    Ok(out)
}

/// Supermartingale, Ville and the trajectory-induced sequence lemma on the
/// strongly convex Euclidean mixture.
fn martingale_checks(opts: &super::VerifyOptions) -> Result<Vec<CheckResult>> {
    let horizon = 200;
    let e = experiments::mixture(Model::Euclidean, Mixture::HalfSq, horizon, opts.seed);
    let problem = e.config.problem()?;
    let reference = reference_minimizer(&problem)?;
    let l2 = problem.objective.lipschitz_l().powi(2);
    let tail0 = problem.schedule.sq_tail(0).expect("inv_linear tails are known");
    let x0 = problem.space.distance(&problem.x0, &reference.x_star)?.powi(2) + l2 * tail0;
    let mut exceedances = ville_requests(&[0, 10, 50], 2.0 * x0);
    exceedances.extend(ville_requests(&[0, 10, 50], 0.5 * x0));
    let spec = EnsembleSpec {
        replicas: opts.replicas,
        horizon,
        seed: opts.seed,
        x_star: reference.x_star.clone(),
        min_f: Some(reference.min_f),
        track_ergodic: false,
        exceedances,
        exact_conditional_replicas: 5,
    };
    let stats = simulate(&problem, &ExactOracle, &spec)?;
    let report = supermartingale_series(&stats)?;
    let mut out = vec![
        CheckResult::from_slack(
            "fejer/supermartingale/ensemble_mean",
            "E[X_n] is nonincreasing",
            -report.worst_increase,
            0.0,
        ),
        CheckResult::from_slack(
            "fejer/supermartingale/exact_conditional",
            "E_n[X_(n+1)] <= X_n by atom enumeration",
            -report.exact_conditional_worst.unwrap_or(f64::NEG_INFINITY),
            1e-9,
        ),
    ];
    let mut ville = Slack::new();
    for row in &report.ville {
        ville.push(row.bound + 2.0 * row.binomial_stderr - row.frequency);
    }
    out.push(ville.check("fejer/supermartingale/ville", "Ville's maximal inequality", 0.0));

    // x_n = E d^2, beta_n = 2 t_n E[F(x_n) - min F], gamma_n = L^2 t_n^2
    let n = horizon;
    let dist: Vec<f64> = (0..=n).map(|i| stats.mean(Metric::DistSq, i)).collect();
    let se = (0..=n).map(|i| stats.stderr(Metric::DistSq, i)).fold(0.0, f64::max);
    let gap_se = (0..n).map(|i| stats.stderr(Metric::Gap, i)).fold(0.0, f64::max);
    let beta: Vec<f64> = (0..n)
        .map(|i| 2.0 * problem.schedule.step(i) * stats.mean(Metric::Gap, i).max(0.0))
        .collect();
    let gamma: Vec<f64> = (0..n).map(|i| l2 * problem.schedule.step(i).powi(2)).collect();
    let inst = QihouInstance {
        k: dist[0] * (1.0 + 1e-9) + 1e-12,
        l: 1.0 + 1e-9,
        m: gamma.iter().sum::<f64>() * (1.0 + 1e-9),
        x: dist,
        alpha: vec![0.0; n],
        beta,
        gamma,
    };
    // the recurrence holds for the true means; estimates carry sampling error
    let slack = 3.0 * (2.0 * se + 2.0 * gap_se);
    let outcome = qihou_check(&inst, slack)?;
    out.push(CheckResult::from_outcome(
        "fejer/supermartingale/sequence_lemma",
        "summability bound for almost-supermartingale sequences",
        outcome.holds,
        outcome.bound - outcome.sum_beta,
        0.0,
    ));
    for c in &mut out {
        c.replicas = opts.replicas;
    }
    Ok(out)
}
