//! Diagnostics for geodesic ergodic averages.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, Space};
use crate::solver::{ergodic_update, StepSchedule, Trajectory};

/// Defects of `F(x̄_n) - min F <= sum_{k <= n} t_k (F(x_k) - min F) / t̄_n`
/// at every record, right-hand side minus left-hand side.
pub fn jensen_defects(traj: &Trajectory, min_f: f64) -> Result<Vec<f64>> {
    if traj.stride != 1 {
        return Err(Error::usage("the ergodic bound needs a stride-1 trajectory"));
    }
    let mut weighted = 0.0;
    let mut out = Vec::with_capacity(traj.records.len());
    for r in &traj.records {
        let (Some((_, t_bar)), Some(erg_f)) = (&r.ergodic, &r.erg_f) else {
            return Err(Error::usage("the ergodic bound needs a run with record_ergodic"));
        };
        weighted += r.t * (r.f.value - min_f);
        out.push(weighted / t_bar - (erg_f.value - min_f));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContractionOutcome {
    /// Smallest `bound - d(x̄^i_m, x̄^{i+1}_m)` over the window.
    pub worst_defect: f64,
    pub pairs_checked: usize,
}

/// Averages `x̄^i_m` of the shifted sequence `(x_{i+k})_k` for `m = 0..=m_max`.
fn shifted_averages(
    space: &Space,
    xs: &[Point],
    schedule: &StepSchedule,
    i: usize,
    m_max: usize,
) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(m_max + 1);
    let mut avg = xs[i].clone();
    let mut w = schedule.step(0);
    out.push(avg.clone());
    for m in 0..m_max {
        let (a, nw) = ergodic_update(space, &avg, w, &xs[i + m + 1], schedule.step(m + 1))?;
        avg = a;
        w = nw;
        out.push(avg.clone());
    }
    Ok(out)
}

/// Checks `d(x̄^i_m, x̄^{i+1}_m) <= sum_{k <= m} (t_k / t̄_m) d(x_{i+k}, x_{i+k+1})`
/// for all `i <= i_max`, `m <= m_max`.
pub fn shifted_contraction(
    space: &Space,
    xs: &[Point],
    schedule: &StepSchedule,
    i_max: usize,
    m_max: usize,
) -> Result<ContractionOutcome> {
    if xs.len() < i_max + m_max + 3 {
        return Err(Error::usage(format!(
            "need at least {} points for this window, got {}",
            i_max + m_max + 3,
            xs.len()
        )));
    }
    let mut worst = f64::INFINITY;
    let mut pairs = 0;
    for i in 0..=i_max {
        let a = shifted_averages(space, xs, schedule, i, m_max)?;
        let b = shifted_averages(space, xs, schedule, i + 1, m_max)?;
        let mut weighted = 0.0;
        let mut t_bar = 0.0;
        for m in 0..=m_max {
            let t = schedule.step(m);
            weighted += t * space.distance(&xs[i + m], &xs[i + m + 1])?;
            t_bar += t;
            let defect = weighted / t_bar - space.distance(&a[m], &b[m])?;
            worst = worst.min(defect);
            pairs += 1;
        }
    }
    Ok(ContractionOutcome {
        worst_defect: worst,
        pairs_checked: pairs,
    })
}
