use crate::error::{Error, Result};
use crate::geometry::{Point, Space};
use crate::solver::Trajectory;

/// `(F(x_n) - min F) - (alpha / 4) d^2(x_n, x*)` at every record.
pub fn strong_convexity_gap(
    space: &Space,
    traj: &Trajectory,
    x_star: &Point,
    min_f: f64,
    alpha: f64,
) -> Result<Vec<f64>> {
    traj.records
        .iter()
        .map(|r| Ok((r.f.value - min_f) - alpha / 4.0 * space.distance(&r.x, x_star)?.powi(2)))
        .collect()
}

/// Candidate minimizing the finite-window asymptotic radius; first one wins ties.
pub fn asymptotic_center_approx(space: &Space, tail: &[Point], candidates: &[Point]) -> Result<Point> {
    if candidates.is_empty() {
        return Err(Error::usage("asymptotic center needs at least one candidate"));
    }
    let mut best: Option<(f64, &Point)> = None;
    for c in candidates {
        let r = space.asymptotic_radius(tail, c)?;
        if best.is_none_or(|(b, _)| r < b) {
            best = Some((r, c));
        }
    }
    Ok(best.expect("nonempty").1.clone())
}
