use rand::Rng;

use super::{kinds_experiment, points_in, Slack};
use crate::analysis::report::CheckResult;
use crate::error::Result;
use crate::experiments::{self, Experiment, Model};
use crate::integrands::{subgradient_certificate, tolerance_for, ExactOracle, FixedSpeedOracle, SubgradientOracle};
use crate::rng::{self, Purpose};

const PROBES: usize = 100;

fn catalogue() -> Result<Vec<Experiment>> {
    let mut all = experiments::mixture_suite(100, 0);
    all.push(experiments::finite_sum(100, 0));
    for m in [Model::Euclidean, Model::StarTree] {
        all.push(experiments::rate_certificate(m, 100, 0)?);
    }
    for m in Model::ALL {
        all.push(kinds_experiment(m)?);
    }
    Ok(all)
}

pub(super) fn run(opts: &super::VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (ei, e) in catalogue()?.into_iter().enumerate() {
        let problem = e.config.problem()?;
        let space = &problem.space;
        let c = &problem.constraint;
        let obj = &problem.objective;
        let l = obj.lipschitz_l();
        let tol = tolerance_for(space);
        let atoms = obj.atoms().expect("catalogue objectives are finite");
        let faulty = FixedSpeedOracle { speed: l + 1.0 };
        let oracle: &dyn SubgradientOracle = if opts.inject_speed_fault { &faulty } else { &ExactOracle };
        let name = |check: &str| format!("integrands/{}/{check}", e.name);

        let mut rng = rng::stream(opts.seed, Purpose::Probe, 100 + ei as u64, 0);
        let states = points_in(space, c, opts.states, &mut rng)?;
        let probes = points_in(space, c, PROBES, &mut rng)?;

        let mut cert = Slack::new();
        let mut speed = Slack::new();
        for x in &states {
            for a in atoms {
                let g = a.kind.busemann_subgradient(space, x)?;
                cert.push(-subgradient_certificate(space, &a.kind, x, &g, &probes)?);
                speed.push(l - oracle.subgradient(space, &a.kind, x)?.speed());
            }
        }
        out.push(cert.check(&name("subgradient_certificate"), "Busemann subgradient inequality", tol));
        out.push(speed.check(
            &name("speed_bound"),
            "(A2) uniform bound L on the subgradient speed",
            tol,
        ));

        let mut lip = Slack::new();
        let mut conv = Slack::new();
        let mut strong = Slack::new();
        let mut mean_strong = Slack::new();
        let alpha = obj.strong_convexity();
        for pair in states.chunks_exact(2) {
            let (x, y) = (&pair[0], &pair[1]);
            let d = space.distance(x, y)?;
            let lambda: f64 = rng.random();
            let m = space.combine(x, y, lambda)?;
            let bend = 0.5 * lambda * (1.0 - lambda) * d * d;
            for a in atoms {
                let (fx, fy, fm) = (a.kind.eval(space, x)?, a.kind.eval(space, y)?, a.kind.eval(space, &m)?);
                lip.push(a.kind.speed_bound(space, c)? * d - (fx - fy).abs());
                let chord = (1.0 - lambda) * fx + lambda * fy;
                conv.push(chord - fm);
                let modulus = a.kind.strong_convexity();
                if modulus > 0.0 {
                    strong.push(chord - modulus * bend - fm);
                }
            }
            if alpha > 0.0 {
                let f = |p| obj.mean_objective(space, p, 1).map(|e| e.value);
                mean_strong.push((1.0 - lambda) * f(x)? + lambda * f(y)? - alpha * bend - f(&m)?);
            }
        }
        out.push(lip.check(&name("lipschitz"), "integrands are L-Lipschitz on C", tol));
        out.push(conv.check(&name("convexity"), "integrands are geodesically convex", tol));
        if strong.worst.is_finite() {
            out.push(strong.check(&name("strong_convexity"), "strong convexity with modulus alpha(e)", tol));
        }
        if alpha > 0.0 {
            out.push(mean_strong.check(
                &name("mean_strong_convexity"),
                "F is strongly convex with the mean modulus",
                tol,
            ));
        }
    }
    for c in &mut out {
        c.seed = opts.seed;
    }
    Ok(out)
}
