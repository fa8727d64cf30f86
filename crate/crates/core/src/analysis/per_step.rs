//! Sample-wise descent inequality
//!
//! ```text
//! d^2(x+, y) <= d^2(x, y) - 2 t (f(x) - f(y)) + s^2 t^2
//! ```
//!
//! for one step `x -> x+` of the method driven by the integrand `f`.

use crate::error::Result;
use crate::geometry::{ConeElement, Point, Space};
use crate::integrands::IntegrandKind;
use crate::solver::{Problem, Trajectory};

/// Right-hand side minus left-hand side for one step.
pub fn step_defect(
    space: &Space,
    kind: &IntegrandKind,
    x: &Point,
    next: &Point,
    g: &ConeElement,
    t: f64,
    y: &Point,
) -> Result<f64> {
    let s = g.speed();
    let rhs = space.distance(x, y)?.powi(2) - 2.0 * t * (kind.eval(space, x)? - kind.eval(space, y)?) + s * s * t * t;
    Ok(rhs - space.distance(next, y)?.powi(2))
}

/// Defects at every recorded step of a stride-1 trajectory.
pub fn per_step_inequality(problem: &Problem, traj: &Trajectory, y: &Point) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(traj.records.len());
    for (cur, next) in traj.consecutive()? {
        let (Some(atom), Some(g)) = (&cur.atom, &cur.g) else {
            continue;
        };
        let kind = problem.objective.kind_of(atom);
        out.push(step_defect(&problem.space, kind, &cur.x, &next.x, g, cur.t, y)?);
    }
    Ok(out)
}
