use super::Slack;
use crate::analysis::monte_carlo::{simulate, EnsembleSpec, Metric};
use crate::analysis::rates::{chi, rho, rho_prime, theta, RateInputs};
use crate::analysis::reference::reference_minimizer;
use crate::analysis::report::CheckResult;
use crate::analysis::sequences::{liminf_locator, locate_below, qihou_check, random_qihou_instance, sumconv_window};
use crate::error::Result;
use crate::experiments::{self, Model};
use crate::integrands::{Estimate, ExactOracle};
use crate::rng::{self, Purpose};
use crate::solver::StepSchedule;

/// Terms summed explicitly in the independent `chi` check.
const CHI_TERMS: u64 = 1_000_000;

const SEQUENCE_INSTANCES: usize = 1_000;

fn schedules() -> Vec<StepSchedule> {
    vec![
        StepSchedule::InvLinear { c: 0.5 },
        StepSchedule::InvLinear { c: 1.0 },
        StepSchedule::InvLinear { c: 2.0 },
    ]
}

/// `sum_{n >= N} t_n^2`, bounded from above by summing `CHI_TERMS` terms from
/// the smallest one and adding `c^2 / end` for the rest.
fn inv_linear_tail_upper(c: f64, from: u64) -> f64 {
    let end = from + CHI_TERMS;
    let head: f64 = (from..end).rev().map(|n| (c / (n + 1) as f64).powi(2)).sum();
    head + c * c / end as f64
}

pub(super) fn run(opts: &super::VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    let mut chi_slack = Slack::new();
    let mut theta_slack = Slack::new();
    for s in schedules() {
        let StepSchedule::InvLinear { c } = s else {
            unreachable!()
        };
        for eps in [1.0, 0.1, 0.01, 1e-3] {
            let n = chi(&s, eps)?;
            chi_slack.push(eps - inv_linear_tail_upper(c, n));
        }
    }
    let sqrt = StepSchedule::InvSqrt { d: 2.0, m: 3, l: 1.0 };
    for s in schedules().into_iter().chain([sqrt]) {
        for k in [0u64, 5, 50] {
            for bnd in [0.1, 1.0, 3.0, 6.0] {
                let w = theta(&s, k, bnd)?;
                // forward summation, independent of the witness logic
                let sum: f64 = (k..=w).map(|n| s.step(n as usize)).sum();
                theta_slack.push(sum - bnd);
            }
        }
    }
    out.push(chi_slack.check("rates/chi_witness", "tail of sum t_n^2 below eps from chi(eps) on", 0.0));
    out.push(theta_slack.check("rates/theta_witness", "partial sums of t_n reach b by theta(k, b)", 0.0));

    let inputs = RateInputs {
        l: 0.16,
        t: 1.645,
        b: 0.0084,
        alpha: 1.0,
        schedule: StepSchedule::InvLinear { c: 1.0 },
    };
    let grid = [1.0, 0.5, 0.2, 0.1, 0.07, 0.05];
    let mut mono = Slack::new();
    let values: Vec<u64> = grid.iter().map(|&e| rho(&inputs, e)).collect::<Result<_>>()?;
    for w in values.windows(2) {
        mono.push(w[1] as f64 - w[0] as f64);
    }
    out.push(mono.check("rates/rho_monotone", "rho grows as eps shrinks", 0.0));
    let mut ident = Slack::new();
    for lambda in [0.1, 0.5, 1.0] {
        for eps in [1.0, 0.5] {
            ident.push(-(rho_prime(&inputs, lambda, eps)? as f64 - rho(&inputs, lambda * eps)? as f64).abs());
        }
    }
    out.push(ident.check("rates/rho_prime_identity", "rho'(lambda, eps) = rho(lambda eps)", 0.0));

    let mut rng = rng::stream(opts.seed, Purpose::Probe, 300, 0);
    let mut seq = Slack::new();
    for i in 0..SEQUENCE_INSTANCES {
        let inst = random_qihou_instance(&mut rng, 20 + i % 80);
        let o = qihou_check(&inst, 1e-12)?;
        seq.push(o.bound - o.sum_beta);
    }
    out.push(
        seq.check(
            "rates/sequence_lemma",
            "summability bound for almost-supermartingale sequences",
            0.0,
        )
        .with_sampling(SEQUENCE_INSTANCES, opts.seed),
    );

    // v_n = 1/(n+1) against t_n = 1/(n+1): sum t_n v_n = pi^2/6 < 2
    let schedule = StepSchedule::InvLinear { c: 1.0 };
    let v: Vec<f64> = (0..100_000).map(|n| 1.0 / (n + 1) as f64).collect();
    let mut scan = Slack::new();
    for eps in [0.5, 0.2, 0.1] {
        for n in [0u64, 5, 20] {
            let (lo, hi) = sumconv_window(&schedule, n, 2.0, eps)?;
            scan.push(if locate_below(&v, lo as usize, hi as usize, eps).is_some() {
                0.0
            } else {
                -1.0
            });
        }
    }
    out.push(scan.check(
        "rates/sumconv_window",
        "a small term occurs within the theta window",
        0.0,
    ));

    out.push(locator(opts)?);
    for c in &mut out {
        c.seed = opts.seed;
    }
    Ok(out)
}

fn locator(opts: &super::VerifyOptions) -> Result<CheckResult> {
    let horizon = 400;
    let e = experiments::rate_certificate(Model::Euclidean, horizon, opts.seed)?;
    let problem = e.config.problem()?;
    let reference = reference_minimizer(&problem)?;
    let spec = EnsembleSpec {
        replicas: opts.replicas,
        horizon,
        seed: opts.seed,
        x_star: reference.x_star.clone(),
        min_f: Some(reference.min_f),
        track_ergodic: false,
        exceedances: Vec::new(),
        exact_conditional_replicas: 0,
    };
    let stats = simulate(&problem, &ExactOracle, &spec)?;
    let gaps: Vec<Estimate> = (0..=horizon)
        .map(|n| Estimate {
            value: stats.mean(Metric::Gap, n),
            stderr: stats.stderr(Metric::Gap, n),
        })
        .collect();
    let l = problem.objective.lipschitz_l();
    let b = problem.space.distance(&problem.x0, &reference.x_star)?.powi(2) * 1.01;
    let t = problem.schedule.sq_total().expect("inv_linear") * 1.001;
    let mut worst = f64::INFINITY;
    for eps in [0.1, 0.01] {
        let o = liminf_locator(&gaps, &problem.schedule, l, b, t, eps, 0)?;
        let ok = o.found.is_some_and(|i| i as u64 <= o.window.1);
        worst = worst.min(if ok { 0.0 } else { -1.0 });
    }
    Ok(CheckResult::from_slack(
        "rates/liminf_locator",
        "small expected gap inside the theta window",
        worst,
        0.0,
    )
    .with_sampling(opts.replicas, opts.seed))
}
