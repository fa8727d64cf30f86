//! Replica-parallel reductions with a fixed merge order.

use rayon::prelude::*;

use crate::error::Result;

/// Replicas handled sequentially by one task. The merge tree depends only on
/// this constant and the replica count, never on the thread count.
const CHUNK: usize = 8;

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    /// Pairwise combination of two partial summaries.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        let wa = self.count as f64 / n;
        let wb = other.count as f64 / n;
        self.mean = wa * self.mean + wb * other.mean;
        self.m2 += other.m2 + delta * delta * self.count as f64 * wb;
        self.count += other.count;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Per-step moments of several metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    steps: usize,
    metrics: usize,
    cells: Vec<Moments>,
}

impl Series {
    pub fn new(steps: usize, metrics: usize) -> Self {
        Series {
            steps,
            metrics,
            cells: vec![Moments::default(); steps * metrics],
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn push(&mut self, step: usize, metric: usize, v: f64) {
        self.cells[step * self.metrics + metric].push(v);
    }

    pub fn get(&self, step: usize, metric: usize) -> &Moments {
        &self.cells[step * self.metrics + metric]
    }

    pub fn merge(&mut self, other: &Series) {
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            a.merge(b);
        }
    }
}

/// Runs `per_replica` for replicas `0..replicas` in parallel and merges the
/// accumulators in a fixed pairwise order, so the result is bitwise
/// reproducible regardless of scheduling.
pub fn reduce_replicas<A, I, F, M>(replicas: usize, init: I, per_replica: F, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(u64, &mut A) -> Result<()> + Sync,
    M: Fn(&mut A, A) + Sync,
{
    let chunks = replicas.div_ceil(CHUNK);
    let mut parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let end = ((c + 1) * CHUNK).min(replicas);
            for r in c * CHUNK..end {
                per_replica(r as u64, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<A>>>()?;
    if parts.is_empty() {
        return Ok(init());
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                merge(&mut a, b);
            }
            next.push(a);
        }
        parts = next;
    }
    Ok(parts.pop().expect("one part remains"))
}
