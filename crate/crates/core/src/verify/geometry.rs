use rand::Rng;

use super::Slack;
use crate::analysis::report::CheckResult;
use crate::error::Result;
use crate::experiments::Model;
use crate::geometry::{Point, Space};
use crate::integrands::tolerance_for;
use crate::rng::{self, Purpose};

/// Radius of the sampling ball around the base point.
fn radius(model: Model) -> f64 {
    match model {
        Model::Hyperbolic => 2.0,
        _ => 3.0,
    }
}

fn point(space: &Space, model: Model, rng: &mut impl Rng) -> Result<Point> {
    space.sample_ball(space.base(), radius(model), rng)
}

pub(super) fn run(opts: &super::VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for (mi, model) in Model::ALL.into_iter().enumerate() {
        let space = model.space();
        let tol = tolerance_for(&space);
        let n = opts.quadruples;
        let stream = |check: u64| rng::stream(opts.seed, Purpose::Probe, mi as u64, check);
        let name = |check: &str| format!("geometry/{}/{check}", model.name());

        let mut rng = stream(0);
        let mut s = Slack::new();
        for _ in 0..n {
            let x = point(&space, model, &mut rng)?;
            let xi = space.random_direction(&x, &mut rng)?;
            let a = rng.random_range(0.0..5.0);
            let b = rng.random_range(0.0..5.0);
            let d = space.distance(&space.ray_point(&x, &xi, a)?, &space.ray_point(&x, &xi, b)?)?;
            s.push(-(d - (a - b).abs()).abs());
        }
        out.push(s.check(&name("ray_isometry"), "geodesic rays are isometric embeddings", tol));

        // d(y, r(T)) - T decreases to b(y); Euclidean truncation error is at most D^2 / (T - D)
        let mut rng = stream(1);
        let mut s = Slack::new();
        let horizons: &[f64] = match model {
            Model::Hyperbolic => &[1.0, 2.0, 4.0, 8.0, 16.0],
            _ => &[1.0, 10.0, 100.0, 1e3, 1e4],
        };
        for _ in 0..n {
            let y = point(&space, model, &mut rng)?;
            let base = space.base();
            let xi = space.random_direction(base, &mut rng)?;
            let b = space.busemann(&xi, &y)?;
            let dy = space.distance(base, &y)?;
            let mut prev = f64::INFINITY;
            for &t in horizons {
                let v = space.distance(&y, &space.ray_point(base, &xi, t)?)? - t;
                s.push(prev - v);
                s.push(v - b);
                prev = v;
            }
            let t = *horizons.last().expect("nonempty");
            s.push(dy * dy / (t - dy) - (prev - b));
        }
        out.push(s.check(
            &name("busemann_limit"),
            "Busemann function as a limit along the ray",
            tol,
        ));

        let mut rng = stream(2);
        let mut conv = Slack::new();
        let mut lip = Slack::new();
        for _ in 0..n {
            let x = point(&space, model, &mut rng)?;
            let y = point(&space, model, &mut rng)?;
            let xi = space.random_direction(space.base(), &mut rng)?;
            let lambda: f64 = rng.random();
            let m = space.combine(&x, &y, lambda)?;
            let (bx, by) = (space.busemann(&xi, &x)?, space.busemann(&xi, &y)?);
            conv.push((1.0 - lambda) * bx + lambda * by - space.busemann(&xi, &m)?);
            lip.push(space.distance(&x, &y)? - (bx - by).abs());
        }
        out.push(conv.check(
            &name("busemann_convexity"),
            "Busemann functions are geodesically convex",
            tol,
        ));
        out.push(lip.check(
            &name("busemann_nonexpansive"),
            "Busemann functions are 1-Lipschitz",
            tol,
        ));

        let mut rng = stream(3);
        let mut cat = Slack::new();
        let mut joint = Slack::new();
        for _ in 0..n {
            let p = point(&space, model, &mut rng)?;
            let q = point(&space, model, &mut rng)?;
            let x = point(&space, model, &mut rng)?;
            let y = point(&space, model, &mut rng)?;
            let t: f64 = rng.random();
            cat.push(space.cat0_defect(&x, (&p, &q), t)?);
            let lhs = space.distance(&space.combine(&p, &q, t)?, &space.combine(&x, &y, t)?)?;
            joint.push((1.0 - t) * space.distance(&p, &x)? + t * space.distance(&q, &y)? - lhs);
        }
        out.push(cat.check(&name("cat0_inequality"), "CAT(0) comparison inequality", tol));
        out.push(joint.check(&name("joint_convexity"), "joint convexity of the metric", tol));

        let mut rng = stream(4);
        let mut failures = 0usize;
        for _ in 0..n {
            let p = point(&space, model, &mut rng)?;
            let q = point(&space, model, &mut rng)?;
            let mut x = point(&space, model, &mut rng)?;
            let mut y = point(&space, model, &mut rng)?;
            // pull toward p so that most quadruples are not vacuous
            for z in [&mut x, &mut y] {
                if space.distance(&p, z)? > space.distance(z, &q)? {
                    *z = space.combine(z, &p, rng.random_range(0.5..1.0))?;
                }
            }
            if !space.q4bar_check(&p, &q, &x, &y, 16)? {
                failures += 1;
            }
        }
        out.push(CheckResult::from_outcome(
            &name("q4bar"),
            "closed half-space condition: {z : d(p,z) <= d(z,q)} is convex",
            failures == 0,
            -(failures as f64),
            0.0,
        ));
    }
    for c in &mut out {
        c.seed = opts.seed;
    }
    Ok(out)
}
