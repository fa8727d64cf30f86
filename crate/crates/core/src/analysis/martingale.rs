//! The process `X_n = d^2(x_n, x*) + L^2 sum_{m >= n} t_m^2` and Ville's
//! maximal inequality `P(exists m >= n: X_m >= a) <= E[X_n] / a`.

use serde::Serialize;

use crate::error::{Error, Result};

use super::monte_carlo::{binomial_stderr, EnsembleStats, Exceedance, Metric};

#[derive(Debug, Clone, Serialize)]
pub struct VilleRow {
    pub start: usize,
    pub level: f64,
    /// `E[X_start] / level`.
    pub bound: f64,
    /// Fraction of replicas with `X_m >= level` for some simulated `m >= start`.
    pub frequency: f64,
    pub binomial_stderr: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MartingaleReport {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `max_n (mean_{n+1} - mean_n - 2 max(se_n, se_{n+1}))`; nonpositive
    /// when the ensemble mean is nonincreasing within two standard errors.
    pub worst_increase: f64,
    /// Largest exact `E_n[X_{n+1}] - X_n` over the enumerated replicas.
    pub exact_conditional_worst: Option<f64>,
    pub ville: Vec<VilleRow>,
}

/// Exceedance requests for Ville checks at the given starts and level.
pub fn ville_requests(starts: &[usize], level: f64) -> Vec<Exceedance> {
    starts
        .iter()
        .map(|&start| Exceedance {
            metric: Metric::Martingale,
            start,
            level,
        })
        .collect()
}

/// Summarizes the martingale columns of an ensemble.
pub fn supermartingale_series(stats: &EnsembleStats) -> Result<MartingaleReport> {
    let steps = stats.horizon + 1;
    if stats.moments(Metric::Martingale, 0).count == 0 {
        return Err(Error::usage(
            "the supermartingale needs a schedule with an analytic bound on sum t_n^2",
        ));
    }
    let mean: Vec<f64> = (0..steps).map(|n| stats.mean(Metric::Martingale, n)).collect();
    let stderr: Vec<f64> = (0..steps).map(|n| stats.stderr(Metric::Martingale, n)).collect();
    let worst_increase = (0..steps - 1)
        .map(|n| mean[n + 1] - mean[n] - 2.0 * stderr[n].max(stderr[n + 1]))
        .fold(f64::NEG_INFINITY, f64::max);
    let ville = stats
        .exceedances
        .iter()
        .enumerate()
        .filter(|(_, e)| e.metric == Metric::Martingale)
        .map(|(i, e)| {
            let bound = mean[e.start] / e.level;
            let frequency = stats.exceedance_frequency(i);
            let se = binomial_stderr(bound, stats.replicas);
            VilleRow {
                start: e.start,
                level: e.level,
                bound,
                frequency,
                binomial_stderr: se,
                pass: frequency <= bound + 2.0 * se,
            }
        })
        .collect();
    Ok(MartingaleReport {
        mean,
        stderr,
        worst_increase,
        exact_conditional_worst: stats.exact_conditional_worst,
        ville,
    })
}
