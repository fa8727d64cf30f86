//! Hyperboloid model of curvature -1.
//!
//! Coordinates are stored time-first: `x = (x0, x1, .., xn)` with
//! `<x, y> = -x0 y0 + x1 y1 + .. + xn yn` and points satisfying `<x, x> = -1`,
//! `x0 > 0`. Boundary directions are future-pointing null vectors scaled to
//! `x0 = 1`.

use super::Coords;

/// Below this value of `-<x, y>` distances are evaluated through the Minkowski
/// chord, which keeps full relative precision for nearby points.
const CHORD_SWITCH: f64 = 2.0;

#[inline]
pub(crate) fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// Recomputes the time coordinate from the spatial part.
#[inline]
pub(crate) fn renormalize(p: &mut [f64]) {
    let s: f64 = p[1..].iter().map(|v| v * v).sum();
    p[0] = (1.0 + s).sqrt();
}

/// Residual of the hyperboloid constraint, scaled to the size of the point.
pub(crate) fn constraint_residual(p: &[f64]) -> f64 {
    (minkowski(p, p) + 1.0).abs() / p[0].abs().max(1.0).powi(2)
}

pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    let c = -minkowski(x, y);
    if c < CHORD_SWITCH {
        let spatial: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| (a - b) * (a - b)).sum();
        let dt = x[0] - y[0];
        let chord_sq = (spatial - dt * dt).max(0.0);
        2.0 * (chord_sq.sqrt() / 2.0).asinh()
    } else {
        c.max(1.0).acosh()
    }
}

pub(crate) fn combine(x: &[f64], y: &[f64], lambda: f64) -> Coords {
    let d = distance(x, y);
    if d == 0.0 {
        return Coords::from_slice(x);
    }
    let sd = d.sinh();
    let a = ((1.0 - lambda) * d).sinh() / sd;
    let b = (lambda * d).sinh() / sd;
    let mut p: Coords = x.iter().zip(y).map(|(u, v)| a * u + b * v).collect();
    renormalize(&mut p);
    p
}

/// Unit tangent at `x` pointing at the boundary point `xi`.
pub(crate) fn unit_tangent(x: &[f64], xi: &[f64]) -> Coords {
    let k = -minkowski(x, xi);
    x.iter().zip(xi).map(|(a, b)| b / k - a).collect()
}

pub(crate) fn ray_point(x: &[f64], xi: &[f64], t: f64) -> Coords {
    let v = unit_tangent(x, xi);
    let (ch, sh) = (t.cosh(), t.sinh());
    let mut p: Coords = x.iter().zip(&v).map(|(a, b)| ch * a + sh * b).collect();
    renormalize(&mut p);
    p
}

/// Boundary point reached by the unit tangent `v` at `x`.
pub(crate) fn boundary_of_tangent(x: &[f64], v: &[f64]) -> Coords {
    let xi: Coords = x.iter().zip(v).map(|(a, b)| a + b).collect();
    normalize_null(xi)
}

/// Scales a future-pointing null vector to unit time coordinate, recomputing
/// the time coordinate from the spatial part.
pub(crate) fn normalize_null(mut xi: Coords) -> Coords {
    let s = xi[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in xi[1..].iter_mut() {
        *v /= s;
    }
    xi[0] = 1.0;
    xi
}

pub(crate) fn direction(x: &[f64], y: &[f64]) -> Option<Coords> {
    let d = distance(x, y);
    if d == 0.0 {
        return None;
    }
    let ch = d.cosh();
    let sh = d.sinh();
    let v: Coords = y.iter().zip(x).map(|(b, a)| (b - ch * a) / sh).collect();
    Some(boundary_of_tangent(x, &v))
}

/// Horofunction `log(-<y, xi>)`; the Busemann function is its difference
/// against the base point.
#[inline]
pub(crate) fn horofunction(xi: &[f64], y: &[f64]) -> f64 {
    (-minkowski(y, xi)).ln()
}

/// Lifts spatial coordinates onto the hyperboloid.
pub(crate) fn lift(spatial: &[f64]) -> Coords {
    let mut p = Coords::with_capacity(spatial.len() + 1);
    p.push(0.0);
    p.extend_from_slice(spatial);
    renormalize(&mut p);
    p
}

/// Tangent vector at `x` pointing at `y` with Minkowski length `d(x, y)`.
pub(crate) fn log_map(x: &[f64], y: &[f64]) -> Coords {
    let d = distance(x, y);
    if d == 0.0 {
        return smallvec::smallvec![0.0; x.len()];
    }
    let ch = d.cosh();
    let k = d / d.sinh();
    y.iter().zip(x).map(|(b, a)| k * (b - ch * a)).collect()
}

/// Point reached from `x` along the tangent vector `w`.
pub(crate) fn exp_map(x: &[f64], w: &[f64]) -> Coords {
    let n = minkowski(w, w).max(0.0).sqrt();
    if n == 0.0 {
        return Coords::from_slice(x);
    }
    let (ch, sh) = (n.cosh(), n.sinh() / n);
    let mut p: Coords = x.iter().zip(w).map(|(a, b)| ch * a + sh * b).collect();
    renormalize(&mut p);
    p
}
