//! Star tree: `k` half-lines glued at a hub. A point is `(leg, r)` with the
//! hub at `r = 0` on every leg.

#[inline]
fn on_common_leg(a: (usize, f64), b: (usize, f64)) -> bool {
    a.0 == b.0 || a.1 == 0.0 || b.1 == 0.0
}

pub(crate) fn distance(a: (usize, f64), b: (usize, f64)) -> f64 {
    if on_common_leg(a, b) {
        (a.1 - b.1).abs()
    } else {
        a.1 + b.1
    }
}

pub(crate) fn combine(a: (usize, f64), b: (usize, f64), lambda: f64) -> (usize, f64) {
    if a.1 == 0.0 {
        return (b.0, lambda * b.1);
    }
    if b.1 == 0.0 {
        return (a.0, (1.0 - lambda) * a.1);
    }
    if a.0 == b.0 {
        return (a.0, a.1 + lambda * (b.1 - a.1));
    }
    let s = lambda * (a.1 + b.1);
    if s <= a.1 {
        (a.0, a.1 - s)
    } else {
        (b.0, s - a.1)
    }
}

pub(crate) fn ray_point(x: (usize, f64), leg: usize, t: f64) -> (usize, f64) {
    if x.1 == 0.0 || x.0 == leg {
        (leg, x.1 + t)
    } else if t <= x.1 {
        (x.0, x.1 - t)
    } else {
        (leg, t - x.1)
    }
}

/// Leg along which the ray from `x` through `y` escapes. Rays heading into
/// the hub continue along the smallest leg other than the one they came from.
pub(crate) fn direction(x: (usize, f64), y: (usize, f64)) -> Option<usize> {
    let d = distance(x, y);
    if d == 0.0 {
        return None;
    }
    if x.1 == 0.0 {
        return Some(y.0);
    }
    if y.1 > 0.0 && (y.0 != x.0 || y.1 > x.1) {
        return Some(y.0);
    }
    Some(if x.0 == 0 { 1 } else { 0 })
}

/// Signed arc length relative to the escaping leg: `-r` on it, `+r` elsewhere.
#[inline]
pub(crate) fn horofunction(leg: usize, y: (usize, f64)) -> f64 {
    if y.0 == leg {
        -y.1
    } else {
        y.1
    }
}
