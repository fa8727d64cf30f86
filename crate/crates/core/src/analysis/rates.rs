//! Rate functions for the strongly convex case.
//!
//! `chi` controls the tail of `sum t_n^2`, `theta` the growth of partial sums
//! of `t_n`, and
//!
//! ```text
//! rho(eps)          = theta( chi(eps / (2 L^2)), 8 (b + L^2 T) / (eps alpha) )
//! rho'(lambda, eps) = rho(lambda eps)
//! ```
//!
//! Every witness returned here is checked against its defining property
//! before it is handed out.

use serde::{Deserialize, Serialize};

use crate::error::{Assumption, Error, Result};
use crate::solver::StepSchedule;

/// Terms summed explicitly when verifying a `chi` witness.
const CHI_VERIFY_TERMS: u64 = 100_000;

/// Largest index range verified by direct summation in `verify_theta`.
const THETA_DIRECT_LIMIT: u64 = 100_000_000;

/// Constants of the rate theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    #[serde(rename = "L")]
    pub l: f64,
    /// Strict upper bound on `sum t_n^2`.
    #[serde(rename = "T")]
    pub t: f64,
    /// Strict upper bound on `d^2(x_0, x*)`.
    pub b: f64,
    /// Mean strong convexity modulus.
    pub alpha: f64,
    pub schedule: StepSchedule,
}

impl RateInputs {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        for (name, v) in [("L", self.l), ("b", self.b), ("alpha", self.alpha), ("T", self.t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::usage(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.schedule.is_divergent() {
            return Err(Error::config(
                Assumption::Par,
                "the rate needs a schedule with divergent sum t_n",
            ));
        }
        let total = self
            .schedule
            .sq_total()
            .ok_or_else(|| Error::config(Assumption::Par, "the rate needs a schedule with summable t_n^2"))?;
        if self.t <= total {
            return Err(Error::config(
                Assumption::Par,
                format!("T = {} must exceed sum t_n^2 = {total}", self.t),
            ));
        }
        Ok(())
    }

    /// Checks `b > d^2(x_0, x*)` for a known starting distance.
    pub fn check_b(&self, dist_sq: f64) -> Result<()> {
        if self.b <= dist_sq {
            return Err(Error::config(
                Assumption::Feasibility,
                format!("b = {} must exceed d^2(x0, x*) = {dist_sq}", self.b),
            ));
        }
        Ok(())
    }

    /// Second argument passed to `theta` inside `rho(eps)`.
    pub fn theta_argument(&self, eps: f64) -> f64 {
        8.0 * (self.b + self.l * self.l * self.t) / (eps * self.alpha)
    }
}

fn to_index(v: f64, what: &str) -> Result<u64> {
    if !v.is_finite() || v >= 9.0e15 {
        return Err(Error::Degenerate(format!(
            "{what} = {v:e} exceeds the representable index range"
        )));
    }
    Ok(v.max(0.0) as u64)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::usage(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// An index `N` with `sum_{n >= N} t_n^2 < eps`.
pub fn chi(schedule: &StepSchedule, eps: f64) -> Result<u64> {
    check_eps(eps)?;
    let witness = match schedule {
        StepSchedule::InvSqrt { .. } => {
            return Err(Error::usage("chi is undefined: inv_sqrt steps are not square-summable"))
        }
        StepSchedule::Explicit {
            tail_sq_bound: None, ..
        } => {
            return Err(Error::usage(
                "chi is undefined: an explicit schedule without tail_sq_bound is not square-summable",
            ))
        }
        StepSchedule::InvLinear { c } => {
            let c2 = c * c;
            if c2 * std::f64::consts::PI.powi(2) / 6.0 < eps {
                0
            } else {
                to_index((c2 / eps).ceil(), "chi")?
            }
        }
        StepSchedule::Explicit {
            steps,
            tail_sq_bound: Some(bound),
        } => {
            let mut tail = *bound;
            let mut n = steps.len();
            if tail >= eps {
                return Err(Error::usage(format!(
                    "chi undefined: declared tail bound {bound} is not below eps = {eps}"
                )));
            }
            while n > 0 && tail + steps[n - 1] * steps[n - 1] < eps {
                tail += steps[n - 1] * steps[n - 1];
                n -= 1;
            }
            n as u64
        }
    };
    if !verify_chi(schedule, eps, witness)? {
        return Err(Error::Degenerate(format!("chi witness {witness} failed verification")));
    }
    Ok(witness)
}

/// Checks `sum_{n >= N} t_n^2 < eps` by explicit summation plus a rigorous
/// bound on the remainder.
pub fn verify_chi(schedule: &StepSchedule, eps: f64, witness: u64) -> Result<bool> {
    match schedule {
        StepSchedule::InvLinear { c } => {
            let c2 = c * c;
            let start = witness;
            let end = start + CHI_VERIFY_TERMS;
            let partial: f64 = (start..end).map(|n| c2 / ((n + 1) as f64).powi(2)).sum();
            // sum_{n >= end} 1/(n+1)^2 <= 1/end
            let remainder = c2 / end as f64;
            Ok(partial + remainder < eps)
        }
        StepSchedule::Explicit {
            steps,
            tail_sq_bound: Some(bound),
        } => {
            let listed: f64 = steps.iter().skip(witness as usize).map(|t| t * t).sum();
            Ok(listed + bound < eps)
        }
        _ => Err(Error::usage("schedule is not square-summable")),
    }
}

/// An index `M >= k` with `sum_{n = k}^{M} t_n >= bnd`.
pub fn theta(schedule: &StepSchedule, k: u64, bnd: f64) -> Result<u64> {
    if !(bnd > 0.0 && bnd.is_finite()) {
        return Err(Error::usage(format!("theta needs a positive bound, got {bnd}")));
    }
    let witness = match schedule {
        StepSchedule::InvLinear { c } => {
            let v = ((k + 1) as f64 * (bnd / c).exp()).ceil() - 1.0;
            to_index(v, "theta")?.max(k)
        }
        StepSchedule::InvSqrt { d, m, l } => {
            // sum_{n=k}^{M} 1/sqrt(n+1) >= 2 (sqrt(M+2) - sqrt(k+1))
            let a = d / (*m as f64 * l);
            let v = (bnd / (2.0 * a) + ((k + 1) as f64).sqrt()).powi(2).ceil() - 2.0;
            to_index(v, "theta")?.max(k)
        }
        StepSchedule::Explicit { steps, tail_sq_bound } => {
            let mut acc = 0.0;
            let mut n = k as usize;
            while n < steps.len() {
                acc += steps[n];
                if acc >= bnd {
                    break;
                }
                n += 1;
            }
            if acc < bnd {
                if tail_sq_bound.is_some() {
                    return Err(Error::usage(format!(
                        "theta undefined: listed steps from {k} sum to {acc} < {bnd}"
                    )));
                }
                let last = *steps.last().expect("validated nonempty");
                let from = n.max(k as usize) as f64;
                to_index(from + ((bnd - acc) / last).ceil() - 1.0, "theta")?
            } else {
                n as u64
            }
        }
    };
    if !verify_theta(schedule, k, bnd, witness)? {
        return Err(Error::Degenerate(format!(
            "theta witness {witness} failed verification"
        )));
    }
    Ok(witness)
}

/// Checks `sum_{n = k}^{M} t_n >= bnd` by direct summation when the range is
/// moderate, otherwise through a rigorous lower bound on the partial sum.
pub fn verify_theta(schedule: &StepSchedule, k: u64, bnd: f64, witness: u64) -> Result<bool> {
    if witness < k {
        return Ok(false);
    }
    if witness - k <= THETA_DIRECT_LIMIT {
        let sum: f64 = (k..=witness).map(|n| schedule.step(n as usize)).sum();
        return Ok(sum >= bnd);
    }
    let lower = match schedule {
        // sum_{n=k}^{M} 1/(n+1) >= ln((M+2)/(k+1))
        StepSchedule::InvLinear { c } => c * (((witness + 2) as f64) / ((k + 1) as f64)).ln(),
        StepSchedule::InvSqrt { d, m, l } => {
            2.0 * d / (*m as f64 * l) * (((witness + 2) as f64).sqrt() - ((k + 1) as f64).sqrt())
        }
        StepSchedule::Explicit { steps, .. } => {
            let listed: f64 = steps.iter().skip(k as usize).take((witness - k + 1) as usize).sum();
            let last = *steps.last().expect("validated nonempty");
            let held = (witness + 1).saturating_sub(steps.len().max(k as usize) as u64);
            listed + held as f64 * last
        }
    };
    Ok(lower >= bnd)
}

/// `rho(eps)`.
pub fn rho(inputs: &RateInputs, eps: f64) -> Result<u64> {
    check_eps(eps)?;
    inputs.validate()?;
    let k = chi(&inputs.schedule, eps / (2.0 * inputs.l * inputs.l))?;
    theta(&inputs.schedule, k, inputs.theta_argument(eps))
}

/// `rho'(lambda, eps) = rho(lambda eps)`.
pub fn rho_prime(inputs: &RateInputs, lambda: f64, eps: f64) -> Result<u64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::usage(format!("lambda must be positive, got {lambda}")));
    }
    rho(inputs, lambda * eps)
}

/// One row of a rate table. Indices beyond the representable range are `None`.
#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub eps: f64,
    pub chi: Option<u64>,
    pub theta_argument: f64,
    pub rho: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimeRow {
    pub lambda: f64,
    pub eps: f64,
    pub rho_prime: Option<u64>,
    /// `rho(lambda eps)`, printed next to `rho'` for comparison.
    pub rho_of_product: Option<u64>,
}

fn representable(r: Result<u64>) -> Result<Option<u64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Degenerate(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn rate_table(inputs: &RateInputs, eps: &[f64], lambdas: &[f64]) -> Result<(Vec<RateRow>, Vec<PrimeRow>)> {
    inputs.validate()?;
    let mut rows = Vec::new();
    for &e in eps {
        rows.push(RateRow {
            eps: e,
            chi: representable(chi(&inputs.schedule, e / (2.0 * inputs.l * inputs.l)))?,
            theta_argument: inputs.theta_argument(e),
            rho: representable(rho(inputs, e))?,
        });
    }
    let mut primes = Vec::new();
    for &lambda in lambdas {
        for &e in eps {
            primes.push(PrimeRow {
                lambda,
                eps: e,
                rho_prime: representable(rho_prime(inputs, lambda, e))?,
                rho_of_product: representable(rho(inputs, lambda * e))?,
            });
        }
    }
    Ok((rows, primes))
}
