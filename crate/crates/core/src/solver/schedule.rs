use serde::{Deserialize, Serialize};

use crate::error::{Assumption, Error, Result};

/// Step sizes `(t_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    /// `t_n = D / (m L sqrt(n + 1))`.
    InvSqrt {
        #[serde(rename = "D")]
        d: f64,
        m: u32,
        #[serde(rename = "L")]
        l: f64,
    },
    /// `t_n = c / (n + 1)`.
    InvLinear { c: f64 },
    /// Listed steps. Without `tail_sq_bound` the last value is held forever;
    /// with it the list is the whole usable schedule and the bound covers the
    /// sum of squares of everything after it.
    Explicit {
        steps: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_sq_bound: Option<f64>,
    },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::config(Assumption::Par, msg));
        match self {
            StepSchedule::InvSqrt { d, m, l } => {
                if !(*d > 0.0 && *l > 0.0 && *m > 0 && d.is_finite() && l.is_finite()) {
                    return bad(format!("inv_sqrt needs D, m, L > 0, got D={d}, m={m}, L={l}"));
                }
            }
            StepSchedule::InvLinear { c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return bad(format!("inv_linear needs c > 0, got {c}"));
                }
            }
            StepSchedule::Explicit { steps, tail_sq_bound } => {
                if steps.is_empty() {
                    return bad("explicit schedule is empty".into());
                }
                if let Some(t) = steps.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                    return bad(format!("explicit steps must be positive, found {t}"));
                }
                if let Some(b) = tail_sq_bound {
                    if !(*b >= 0.0 && b.is_finite()) {
                        return bad(format!("tail_sq_bound must be finite and >= 0, got {b}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `t_n`.
    pub fn step(&self, n: usize) -> f64 {
        let k = (n + 1) as f64;
        match self {
            StepSchedule::InvSqrt { d, m, l } => d / (*m as f64 * l * k.sqrt()),
            StepSchedule::InvLinear { c } => c / k,
            StepSchedule::Explicit { steps, .. } => steps[n.min(steps.len() - 1)],
        }
    }

    /// Number of steps a run may take, if limited.
    pub fn max_steps(&self) -> Option<usize> {
        match self {
            StepSchedule::Explicit {
                steps,
                tail_sq_bound: Some(_),
            } => Some(steps.len()),
            _ => None,
        }
    }

    /// Whether `sum t_n` diverges.
    pub fn is_divergent(&self) -> bool {
        !matches!(
            self,
            StepSchedule::Explicit {
                tail_sq_bound: Some(_),
                ..
            }
        )
    }

    /// Upper bound on `sum_{k >= n} t_k^2`, or `None` when the series diverges.
    pub fn sq_tail(&self, n: usize) -> Option<f64> {
        match self {
            StepSchedule::InvSqrt { .. } => None,
            StepSchedule::InvLinear { c } => Some(c * c * trigamma((n + 1) as f64)),
            StepSchedule::Explicit { steps, tail_sq_bound } => {
                let bound = (*tail_sq_bound)?;
                let listed: f64 = steps.iter().skip(n).map(|t| t * t).sum();
                Some(listed + bound)
            }
        }
    }

    /// `sum_n t_n^2`, or `None` when it diverges.
    pub fn sq_total(&self) -> Option<f64> {
        self.sq_tail(0)
    }

    /// `t_0 + .. + t_n`.
    pub fn prefix_sum(&self, n: usize) -> f64 {
        (0..=n).map(|k| self.step(k)).sum()
    }
}

/// `psi_1(x) = sum_{k >= 0} 1 / (x + k)^2` for `x >= 1`.
fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x + x2 / 2.0 + (x2 / x) * (1.0 / 6.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 / 30.0)))
}
