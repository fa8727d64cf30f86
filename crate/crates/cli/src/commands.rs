use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use busemann::analysis::ergodic::jensen_defects;
use busemann::analysis::martingale::supermartingale_series;
use busemann::analysis::monte_carlo::{simulate, EnsembleSpec, EnsembleStats, Metric};
use busemann::analysis::per_step::per_step_inequality;
use busemann::analysis::rates::{rate_table, RateInputs};
use busemann::analysis::reference::{reference_minimizer, ReferenceMethod};
use busemann::analysis::report::{CheckResult, Report};
use busemann::analysis::strong_convexity_gap;
use busemann::integrands::tolerance_for;
use busemann::solver::{self, running_min_bound};
use busemann::verify::{run_suite, Suite, VerifyOptions};
use busemann::{Error, ExactOracle, Point, Problem, Result, RunConfig, StepSchedule, Trajectory};
use serde::Serialize;

use crate::manifest::{prepare_dir, CheckId, ExperimentManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn of(checks: &[CheckResult]) -> Self {
        if checks.iter().all(CheckResult::passed) {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Minimizer and minimum value used by the distance and gap columns.
#[derive(Debug, Clone, Serialize)]
struct Target {
    x_star: Point,
    min_f: f64,
    /// `manifest` or the reference method.
    source: Source,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum Source {
    Manifest(&'static str),
    Reference(ReferenceMethod),
}

fn target(problem: &Problem, cfg: &RunConfig) -> Result<Target> {
    if let Some(x) = &cfg.x_star {
        let min_f = problem
            .objective
            .mean_objective(&problem.space, x, cfg.eval_samples)?
            .value;
        return Ok(Target {
            x_star: x.clone(),
            min_f,
            source: Source::Manifest("manifest"),
        });
    }
    let r = reference_minimizer(problem)?;
    Ok(Target {
        x_star: r.x_star,
        min_f: r.min_f,
        source: Source::Reference(r.method),
    })
}

fn print_checks(checks: &[CheckResult]) {
    for c in checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {} worst_defect={:e} tolerance={:e}",
            c.name, c.worst_defect, c.tolerance
        );
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct RunSummary<'a> {
    name: &'a str,
    seed: u64,
    iterations: usize,
    stride: usize,
    /// Derived from `trajectory.csv` alone.
    trajectory: TrajectoryDigest,
    target: Option<&'a Target>,
    checks: &'a [CheckResult],
    skipped_checks: Vec<&'static str>,
}

/// Numbers recomputable from the trajectory CSV: the last row, the row
/// count, and the minimum of the `F` column.
#[derive(Serialize)]
struct TrajectoryDigest {
    rows: usize,
    final_n: usize,
    final_f: f64,
    final_dist_to_opt: Option<f64>,
    final_erg_f: Option<f64>,
    final_erg_dist: Option<f64>,
    run_min_f: f64,
    min_recorded_f: f64,
}

fn digest(traj: &Trajectory) -> TrajectoryDigest {
    let last = traj.last();
    TrajectoryDigest {
        rows: traj.records.len(),
        final_n: last.n,
        final_f: last.f.value,
        final_dist_to_opt: last.dist_to_opt,
        final_erg_f: last.erg_f.map(|e| e.value),
        final_erg_dist: last.erg_dist,
        run_min_f: last.run_min_f,
        min_recorded_f: traj.records.iter().map(|r| r.f.value).fold(f64::INFINITY, f64::min),
    }
}

fn trajectory_check(id: CheckId, problem: &Problem, traj: &Trajectory, target: &Target) -> Result<CheckResult> {
    let tol = tolerance_for(&problem.space);
    let (anchor, defects) = match id {
        CheckId::PerStepDescent => (
            "sample-wise descent inequality",
            per_step_inequality(problem, traj, &target.x_star)?,
        ),
        CheckId::ErgodicJensen => (
            "geodesic Jensen bound for ergodic averages",
            jensen_defects(traj, target.min_f)?,
        ),
        CheckId::StrongConvexityGap => {
            let alpha = problem.objective.strong_convexity();
            if alpha <= 0.0 {
                return Err(Error::Usage(
                    "strong_convexity_gap needs a strongly convex objective".into(),
                ));
            }
            (
                "quadratic growth under strong convexity",
                strong_convexity_gap(&problem.space, traj, &target.x_star, target.min_f, alpha)?,
            )
        }
        CheckId::RunningMinBound | CheckId::Supermartingale => unreachable!("ensemble checks run under mc"),
    };
    let worst = defects.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CheckResult::from_slack(id.name(), anchor, worst, tol))
}

/// Single trajectory: `trajectory.csv` and `summary.json`.
pub fn run(m: &ExperimentManifest) -> Result<Outcome> {
    let mut cfg = m.run_config.clone();
    let problem = cfg.problem()?;
    let wanted: Vec<CheckId> = m.checks.iter().copied().filter(|c| !c.is_ensemble()).collect();
    let target = match target(&problem, &cfg) {
        Ok(t) => Some(t),
        Err(e) if wanted.is_empty() => {
            eprintln!("note: no reference minimizer, distance columns left empty ({e})");
            None
        }
        Err(e) => return Err(e),
    };
    if cfg.x_star.is_none() {
        cfg.x_star = target.as_ref().map(|t| t.x_star.clone());
    }
    let csv_path = m.output("trajectory.csv")?;
    let traj = solver::run(&cfg)?;

    let mut checks = Vec::new();
    if let Some(t) = &target {
        for &id in &wanted {
            checks.push(trajectory_check(id, &problem, &traj, t)?.with_sampling(1, cfg.seed));
        }
    }

    let mut out = BufWriter::new(fs::File::create(&csv_path)?);
    traj.write_csv(&mut out)?;
    out.flush()?;
    let summary = RunSummary {
        name: &m.name,
        seed: cfg.seed,
        iterations: cfg.iterations,
        stride: cfg.stride,
        trajectory: digest(&traj),
        target: target.as_ref(),
        checks: &checks,
        skipped_checks: m.checks.iter().filter(|c| c.is_ensemble()).map(|c| c.name()).collect(),
    };
    let summary_path = m.output("summary.json")?;
    write_json(&summary_path, &summary)?;
    print_checks(&checks);
    println!("wrote {} and {}", csv_path.display(), summary_path.display());
    Ok(Outcome::of(&checks))
}

const MC_METRICS: [(Metric, &str); 4] = [
    (Metric::DistSq, "dist_sq"),
    (Metric::Gap, "gap"),
    (Metric::ErgodicGap, "erg_gap"),
    (Metric::RunMinGap, "run_min_gap"),
];

/// `running_min_bound` for a finite sum in the units of the weight-normalized
/// objective, i.e. divided by the number of atoms.
fn normalized_bound(schedule: &StepSchedule, n: usize) -> Result<Option<f64>> {
    match schedule {
        StepSchedule::InvSqrt { d, m, l } if n >= 2 => Ok(Some(running_min_bound(*m as usize, *l, *d, n)? / *m as f64)),
        _ => Ok(None),
    }
}

fn ensemble_csv(stats: &EnsembleStats, schedule: &StepSchedule, stride: usize) -> Result<String> {
    let with_bound = matches!(schedule, StepSchedule::InvSqrt { .. });
    let mut s = String::from("n");
    for (_, name) in MC_METRICS {
        write!(s, ",{name}_mean,{name}_stderr").expect("writing to a string");
    }
    if with_bound {
        s.push_str(",running_min_bound");
    }
    s.push('\n');
    for n in 0..=stats.horizon {
        if n % stride != 0 && n != stats.horizon {
            continue;
        }
        write!(s, "{n}").expect("writing to a string");
        for (metric, _) in MC_METRICS {
            let mo = stats.moments(metric, n);
            if mo.count == 0 {
                s.push_str(",,");
            } else {
                write!(s, ",{},{}", mo.mean, mo.stderr()).expect("writing to a string");
            }
        }
        if with_bound {
            s.push(',');
            if let Some(b) = normalized_bound(schedule, n)? {
                write!(s, "{b}").expect("writing to a string");
            }
        }
        s.push('\n');
    }
    Ok(s)
}

fn ensemble_check(id: CheckId, problem: &Problem, stats: &EnsembleStats) -> Result<CheckResult> {
    match id {
        CheckId::RunningMinBound => {
            if !matches!(problem.schedule, StepSchedule::InvSqrt { .. }) {
                return Err(Error::Usage("running_min_bound needs an inv_sqrt schedule".into()));
            }
            let mut worst = f64::INFINITY;
            for n in 2..=stats.horizon {
                let bound = normalized_bound(&problem.schedule, n)?.expect("n >= 2");
                let mo = stats.moments(Metric::RunMinGap, n);
                worst = worst.min(bound + 2.0 * mo.stderr() - mo.mean);
            }
            Ok(
                CheckResult::from_slack(id.name(), "expected running-minimum bound for finite sums", worst, 0.0)
                    .with_sampling(stats.replicas, 0),
            )
        }
        CheckId::Supermartingale => {
            let rep = supermartingale_series(stats)?;
            Ok(CheckResult::from_slack(
                id.name(),
                "supermartingale property of the Lyapunov sequence",
                -rep.worst_increase,
                0.0,
            )
            .with_sampling(stats.replicas, 0))
        }
        _ => unreachable!("trajectory checks run under run"),
    }
}

#[derive(Serialize)]
struct McSummary<'a> {
    name: &'a str,
    seed: u64,
    replicas: usize,
    horizon: usize,
    target: &'a Target,
    checks: &'a [CheckResult],
    skipped_checks: Vec<&'static str>,
}

/// Ensemble of `replicas` runs: `ensemble.csv` and `ensemble_summary.json`.
pub fn mc(m: &ExperimentManifest) -> Result<Outcome> {
    if m.replicas < 2 {
        return Err(Error::Usage(format!(
            "mc needs at least 2 replicas, got {}",
            m.replicas
        )));
    }
    let cfg = &m.run_config;
    let problem = cfg.problem()?;
    let target = target(&problem, cfg)?;
    let csv_path = m.output("ensemble.csv")?;
    let spec = EnsembleSpec {
        replicas: m.replicas,
        horizon: cfg.iterations,
        seed: cfg.seed,
        x_star: target.x_star.clone(),
        min_f: Some(target.min_f),
        track_ergodic: cfg.record_ergodic,
        exceedances: Vec::new(),
        exact_conditional_replicas: 0,
    };
    let stats = simulate(&problem, &ExactOracle, &spec)?;
    let checks = m
        .checks
        .iter()
        .filter(|c| c.is_ensemble())
        .map(|&id| ensemble_check(id, &problem, &stats).map(|c| c.with_sampling(m.replicas, cfg.seed)))
        .collect::<Result<Vec<_>>>()?;
    fs::write(&csv_path, ensemble_csv(&stats, &problem.schedule, cfg.stride)?)?;
    let summary = McSummary {
        name: &m.name,
        seed: cfg.seed,
        replicas: m.replicas,
        horizon: cfg.iterations,
        target: &target,
        checks: &checks,
        skipped_checks: m.checks.iter().filter(|c| !c.is_ensemble()).map(|c| c.name()).collect(),
    };
    let summary_path = m.output("ensemble_summary.json")?;
    write_json(&summary_path, &summary)?;
    print_checks(&checks);
    println!("wrote {} and {}", csv_path.display(), summary_path.display());
    Ok(Outcome::of(&checks))
}

/// Runs a verification suite and writes `verify_<suite>.json` plus
/// `verify_<suite>_defects.csv`.
pub fn verify(suite: Suite, opts: &VerifyOptions, out: &Path) -> Result<Outcome> {
    prepare_dir(out)?;
    let report: Report = run_suite(suite, opts)?;
    let json = out.join(format!("verify_{suite}.json"));
    let csv = out.join(format!("verify_{suite}_defects.csv"));
    report.write_json(&json)?;
    report.write_defects_csv(&csv)?;
    print_checks(&report.checks);
    let failed = report.failures().count();
    println!(
        "{} checks, {failed} failed; wrote {}",
        report.checks.len(),
        json.display()
    );
    Ok(Outcome::of(&report.checks))
}

fn cell(v: Option<u64>) -> String {
    v.map_or_else(|| "overflow".into(), |v| v.to_string())
}

/// Prints the rate table; optionally writes it as JSON.
pub fn rates(inputs_path: &Path, eps: &[f64], lambdas: &[f64], out: Option<PathBuf>) -> Result<Outcome> {
    let bytes = fs::read(inputs_path)
        .map_err(|e| Error::Usage(format!("cannot read rate inputs {}: {e}", inputs_path.display())))?;
    let inputs: RateInputs = serde_json::from_slice(&bytes)?;
    let (rows, primes) = rate_table(&inputs, eps, lambdas)?;
    println!("{:>12} {:>16} {:>24} {:>16}", "eps", "chi", "theta_argument", "rho");
    for r in &rows {
        println!(
            "{:>12} {:>16} {:>24} {:>16}",
            r.eps,
            cell(r.chi),
            r.theta_argument,
            cell(r.rho)
        );
    }
    println!();
    println!(
        "{:>12} {:>12} {:>16} {:>16}",
        "lambda", "eps", "rho_prime", "rho(lambda*eps)"
    );
    for p in &primes {
        println!(
            "{:>12} {:>12} {:>16} {:>16}",
            p.lambda,
            p.eps,
            cell(p.rho_prime),
            cell(p.rho_of_product)
        );
    }
    if let Some(dir) = out {
        prepare_dir(&dir)?;
        #[derive(Serialize)]
        struct Table<'a> {
            inputs: &'a RateInputs,
            rho: &'a [busemann::analysis::rates::RateRow],
            rho_prime: &'a [busemann::analysis::rates::PrimeRow],
        }
        write_json(
            &dir.join("rates.json"),
            &Table {
                inputs: &inputs,
                rho: &rows,
                rho_prime: &primes,
            },
        )?;
    }
    Ok(Outcome::Pass)
}
