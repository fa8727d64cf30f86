//! Checks on deterministic nonnegative sequences.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrands::Estimate;
use crate::solver::StepSchedule;

use super::rates;

/// Finite prefix of `x_{n+1} <= (1 + alpha_n) x_n - beta_n + gamma_n` with
/// the bounds `x_0 < K`, `prod (1 + alpha_i) < L`, `sum gamma_i < M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QihouInstance {
    /// `x_0, .., x_n`.
    pub x: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub k: f64,
    pub l: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QihouOutcome {
    pub sum_beta: f64,
    /// `L (K + M)`.
    pub bound: f64,
    pub holds: bool,
}

impl QihouInstance {
    /// Checks the hypotheses. `slack` absorbs rounding in the recurrence.
    pub fn validate(&self, slack: f64) -> Result<()> {
        let n = self.alpha.len();
        if self.x.len() != n + 1 || self.beta.len() != n || self.gamma.len() != n {
            return Err(Error::Input(format!(
                "sequence lengths do not match: x {}, alpha {}, beta {}, gamma {}",
                self.x.len(),
                n,
                self.beta.len(),
                self.gamma.len()
            )));
        }
        let all = self.x.iter().chain(&self.alpha).chain(&self.beta).chain(&self.gamma);
        if let Some(v) = all.into_iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::Input(format!(
                "sequences must be nonnegative and finite, found {v}"
            )));
        }
        if !(self.x[0] < self.k) {
            return Err(Error::Input(format!("x_0 = {} is not below K = {}", self.x[0], self.k)));
        }
        let prod: f64 = self.alpha.iter().map(|a| 1.0 + a).product();
        if !(prod < self.l) {
            return Err(Error::Input(format!(
                "prod (1 + alpha_i) = {prod} is not below L = {}",
                self.l
            )));
        }
        let sum_gamma: f64 = self.gamma.iter().sum();
        if !(sum_gamma < self.m) {
            return Err(Error::Input(format!(
                "sum gamma_i = {sum_gamma} is not below M = {}",
                self.m
            )));
        }
        for i in 0..n {
            let rhs = (1.0 + self.alpha[i]) * self.x[i] - self.beta[i] + self.gamma[i];
            if self.x[i + 1] > rhs + slack {
                return Err(Error::Input(format!(
                    "recurrence fails at n = {i}: x_(n+1) = {} > {rhs}",
                    self.x[i + 1]
                )));
            }
        }
        Ok(())
    }
}

/// Verifies the hypotheses and then `sum beta_i < L (K + M)`.
pub fn qihou_check(inst: &QihouInstance, slack: f64) -> Result<QihouOutcome> {
    inst.validate(slack)?;
    let sum_beta: f64 = inst.beta.iter().sum();
    let bound = inst.l * (inst.k + inst.m);
    Ok(QihouOutcome {
        sum_beta,
        bound,
        holds: sum_beta < bound,
    })
}

/// Random admissible instance of length `len`: `alpha`, `gamma` and the next
/// value are drawn first, then `beta_n` is chosen within the room the
/// recurrence leaves.
pub fn random_qihou_instance<R: Rng + ?Sized>(rng: &mut R, len: usize) -> QihouInstance {
    let mut x = vec![rng.random_range(0.0..5.0)];
    let mut alpha = Vec::with_capacity(len);
    let mut beta = Vec::with_capacity(len);
    let mut gamma = Vec::with_capacity(len);
    for i in 0..len {
        let decay = 1.0 / ((i + 1) as f64).powi(2);
        let a = rng.random_range(0.0..0.5) * decay;
        let g = rng.random_range(0.0..1.0) * decay;
        let room = (1.0 + a) * x[i] + g;
        let next = rng.random_range(0.0..=room);
        let b = rng.random_range(0.0..=1.0) * (room - next);
        alpha.push(a);
        gamma.push(g);
        beta.push(b);
        x.push(next);
    }
    let prod: f64 = alpha.iter().map(|a| 1.0 + a).product();
    let sum_gamma: f64 = gamma.iter().sum();
    QihouInstance {
        k: x[0] * 1.01 + 1e-9,
        l: prod * 1.01 + 1e-9,
        m: sum_gamma * 1.01 + 1e-9,
        x,
        alpha,
        beta,
        gamma,
    }
}

/// First index in `[lo, hi]` with `v_n < eps`.
pub fn locate_below(v: &[f64], lo: usize, hi: usize, eps: f64) -> Option<usize> {
    (lo..=hi.min(v.len().saturating_sub(1))).find(|&n| v[n] < eps)
}

/// Window `[N, theta(N, bound / eps)]` in which some `v_n < eps` must occur
/// whenever `sum t_n v_n < bound`.
pub fn sumconv_window(schedule: &StepSchedule, n: u64, bound: f64, eps: f64) -> Result<(u64, u64)> {
    Ok((n, rates::theta(schedule, n, bound / eps)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct LocatorOutcome {
    pub window: (u64, u64),
    /// First index in the simulated part of the window whose gap estimate
    /// plus two standard errors is below `eps`.
    pub found: Option<usize>,
    /// Whether the simulated horizon covers the whole window.
    pub window_simulated: bool,
}

/// Searches `[N, theta(N, (b + L^2 T) / eps)]` for an index whose estimated
/// `E[F(x_n)] - min F` is confidently below `eps`.
pub fn liminf_locator(
    gaps: &[Estimate],
    schedule: &StepSchedule,
    l: f64,
    b: f64,
    t: f64,
    eps: f64,
    n: u64,
) -> Result<LocatorOutcome> {
    let hi = rates::theta(schedule, n, (b + l * l * t) / eps)?;
    let upper = (hi as usize).min(gaps.len().saturating_sub(1));
    let found = (n as usize..=upper).find(|&i| gaps[i].value + 2.0 * gaps[i].stderr < eps);
    Ok(LocatorOutcome {
        window: (n, hi),
        found,
        window_simulated: (hi as usize) < gaps.len(),
    })
}
