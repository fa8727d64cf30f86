//! Flat kernels on coordinate slices.

use super::Coords;

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub(crate) fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[inline]
pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub(crate) fn combine(x: &[f64], y: &[f64], lambda: f64) -> Coords {
    x.iter().zip(y).map(|(a, b)| a + lambda * (b - a)).collect()
}

pub(crate) fn ray_point(x: &[f64], u: &[f64], t: f64) -> Coords {
    x.iter().zip(u).map(|(a, b)| a + t * b).collect()
}

/// Unit vector from `x` toward `y`; `None` when the points coincide.
pub(crate) fn direction(x: &[f64], y: &[f64]) -> Option<Coords> {
    let diff: Coords = y.iter().zip(x).map(|(a, b)| a - b).collect();
    let n = norm(&diff);
    if n == 0.0 {
        return None;
    }
    Some(diff.iter().map(|v| v / n).collect())
}

/// `-<y - base, u>`.
pub(crate) fn busemann(u: &[f64], base: &[f64], y: &[f64]) -> f64 {
    -y.iter().zip(base).zip(u).map(|((a, b), c)| (a - b) * c).sum::<f64>()
}
