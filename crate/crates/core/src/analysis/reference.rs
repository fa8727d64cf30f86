//! Deterministic high-accuracy minimizers of `F` used as ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{euclidean, hyperbolic, BoundaryDirection, ConvexSet, Coords, Point, Space};
use crate::integrands::{Atom, IntegrandKind, SampleSpace};
use crate::solver::{Problem, DEFAULT_EVAL_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMethod {
    /// Weighted mean of squared-distance atoms in Euclidean space.
    ClosedForm,
    /// A distance atom carrying enough weight to be optimal.
    HeavyAtom,
    /// Bisection on the one-sided derivative along every leg of a star tree.
    LegSearch,
    /// Riemannian gradient descent with backtracking.
    TangentDescent,
    /// Center of a symmetric target law.
    Symmetry,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reference {
    pub x_star: Point,
    pub min_f: f64,
    pub method: ReferenceMethod,
}

pub fn reference_minimizer(problem: &Problem) -> Result<Reference> {
    let space = &problem.space;
    let atoms = match problem.objective.sample_space() {
        SampleSpace::Parametric(family) => {
            let c = family
                .symmetric_minimizer()
                .ok_or_else(|| Error::usage("no reference minimizer for this family"))?;
            let x_star = problem.constraint.project(space, c)?;
            if x_star != *c {
                return Err(Error::usage("the symmetric minimizer lies outside C"));
            }
            let min_f = problem
                .objective
                .mean_objective(space, &x_star, DEFAULT_EVAL_SAMPLES)?
                .value;
            return Ok(Reference {
                x_star,
                min_f,
                method: ReferenceMethod::Symmetry,
            });
        }
        SampleSpace::Finite { atoms, .. } => atoms.as_slice(),
    };
    let f = |x: &Point| -> Result<f64> { problem.objective.mean_objective(space, x, 1).map(|e| e.value) };
    let done = |x_star: Point, method| -> Result<Reference> {
        let min_f = f(&x_star)?;
        Ok(Reference { x_star, min_f, method })
    };

    match (space.base(), &problem.constraint) {
        (_, ConvexSet::Custom(_)) => Err(Error::usage("no reference minimizer for custom constraint sets")),
        (Point::Star { .. }, c) => done(leg_search(space, c, atoms, &f)?, ReferenceMethod::LegSearch),
        (_, c) => {
            if let Some(x) = closed_form(space, c, atoms)? {
                return done(x, ReferenceMethod::ClosedForm);
            }
            if let Some(x) = heavy_atom(space, c, atoms)? {
                return done(x, ReferenceMethod::HeavyAtom);
            }
            done(tangent_descent(problem, atoms, &f)?, ReferenceMethod::TangentDescent)
        }
    }
}

fn closed_form(space: &Space, c: &ConvexSet, atoms: &[Atom]) -> Result<Option<Point>> {
    let Point::Euclidean(base) = space.base() else {
        return Ok(None);
    };
    let mut mean: Coords = smallvec::smallvec![0.0; base.len()];
    for atom in atoms {
        let IntegrandKind::HalfSqDist { a: Point::Euclidean(a) } = &atom.kind else {
            return Ok(None);
        };
        for (m, v) in mean.iter_mut().zip(a) {
            *m += atom.w * v;
        }
    }
    let p = Point::Euclidean(mean);
    Ok(c.contains(space, &p, 0.0)?.then_some(p))
}

/// Tangent-space helpers for the two smooth models.
fn log_map(x: &Point, y: &Point) -> Coords {
    match (x, y) {
        (Point::Euclidean(a), Point::Euclidean(b)) => b.iter().zip(a).map(|(p, q)| p - q).collect(),
        (Point::Hyperbolic(a), Point::Hyperbolic(b)) => hyperbolic::log_map(a, b),
        _ => unreachable!("tangent descent runs on vector spaces only"),
    }
}

fn exp_map(x: &Point, w: &[f64]) -> Point {
    match x {
        Point::Euclidean(a) => Point::Euclidean(a.iter().zip(w).map(|(p, q)| p + q).collect()),
        Point::Hyperbolic(a) => Point::Hyperbolic(hyperbolic::exp_map(a, w)),
        Point::Star { .. } => unreachable!("tangent descent runs on vector spaces only"),
    }
}

fn tangent_norm(x: &Point, w: &[f64]) -> f64 {
    match x {
        Point::Hyperbolic(_) => hyperbolic::minkowski(w, w).max(0.0).sqrt(),
        _ => euclidean::norm(w),
    }
}

fn unit_toward(x: &Point, xi: &BoundaryDirection) -> Coords {
    match (x, xi) {
        (Point::Euclidean(_), BoundaryDirection::Euclidean(u)) => u.clone(),
        (Point::Hyperbolic(a), BoundaryDirection::Hyperbolic(u)) => hyperbolic::unit_tangent(a, u),
        _ => unreachable!("tangent descent runs on vector spaces only"),
    }
}

/// Riemannian gradient of one integrand at `x`; `None` at a kink.
fn gradient(space: &Space, kind: &IntegrandKind, x: &Point) -> Result<Option<Coords>> {
    Ok(match kind {
        IntegrandKind::DistTo { a } => {
            let d = space.distance(x, a)?;
            (d > 0.0).then(|| log_map(x, a).iter().map(|v| -v / d).collect())
        }
        IntegrandKind::HalfSqDist { a } => Some(log_map(x, a).iter().map(|v| -v).collect()),
        IntegrandKind::BusemannLinear { eta, s0 } => Some(unit_toward(x, eta).iter().map(|v| -s0 * v).collect()),
        IntegrandKind::FiniteMax { members } => {
            let mut best: Option<(f64, &IntegrandKind)> = None;
            for m in members {
                let v = m.eval(space, x)?;
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, m));
                }
            }
            match best {
                Some((_, m)) => gradient(space, m, x)?,
                None => None,
            }
        }
    })
}

fn total_gradient(space: &Space, atoms: &[Atom], x: &Point, skip: Option<&Point>) -> Result<Coords> {
    let dim = x.coords().map_or(0, <[f64]>::len);
    let mut g: Coords = smallvec::smallvec![0.0; dim];
    for atom in atoms {
        if let (Some(p), IntegrandKind::DistTo { a }) = (skip, &atom.kind) {
            if a == p {
                continue;
            }
        }
        if let Some(v) = gradient(space, &atom.kind, x)? {
            for (gi, vi) in g.iter_mut().zip(&v) {
                *gi += atom.w * vi;
            }
        }
    }
    Ok(g)
}

/// A distance atom `a` inside `C` is optimal when the remaining gradient at
/// `a` has norm at most the total weight sitting at `a`.
fn heavy_atom(space: &Space, c: &ConvexSet, atoms: &[Atom]) -> Result<Option<Point>> {
    if atoms.iter().any(|a| matches!(a.kind, IntegrandKind::FiniteMax { .. })) {
        return Ok(None);
    }
    for atom in atoms {
        let IntegrandKind::DistTo { a } = &atom.kind else {
            continue;
        };
        if !c.contains(space, a, 0.0)? {
            continue;
        }
        let weight: f64 = atoms
            .iter()
            .filter(|b| matches!(&b.kind, IntegrandKind::DistTo { a: p } if p == a))
            .map(|b| b.w)
            .sum();
        let rest = total_gradient(space, atoms, a, Some(a))?;
        if tangent_norm(a, &rest) <= weight {
            return Ok(Some(a.clone()));
        }
    }
    Ok(None)
}

fn tangent_descent(problem: &Problem, atoms: &[Atom], f: &dyn Fn(&Point) -> Result<f64>) -> Result<Point> {
    let space = &problem.space;
    let c = &problem.constraint;
    let mut x = problem.x0.clone();
    for atom in atoms {
        if let IntegrandKind::DistTo { a } | IntegrandKind::HalfSqDist { a } = &atom.kind {
            let p = c.project(space, a)?;
            if f(&p)? < f(&x)? {
                x = p;
            }
        }
    }
    let mut fx = f(&x)?;
    let mut eta = 1.0;
    let mut small_moves = 0;
    for _ in 0..200_000 {
        let g = total_gradient(space, atoms, &x, None)?;
        if tangent_norm(&x, &g) < 1e-15 {
            break;
        }
        let step: Coords = g.iter().map(|v| -eta * v).collect();
        let y = c.project(space, &exp_map(&x, &step))?;
        let fy = f(&y)?;
        if fy < fx {
            let moved = space.distance(&x, &y)?;
            x = y;
            fx = fy;
            eta = (eta * 1.5).min(1e6);
            small_moves = if moved < 1e-14 { small_moves + 1 } else { 0 };
            if small_moves > 20 {
                break;
            }
        } else {
            eta *= 0.5;
            if eta < 1e-20 {
                break;
            }
        }
    }
    polish(problem, atoms, x)
}

/// Interior minimizers of smooth objectives: descent on the gradient norm,
/// which keeps resolving after differences in `F` drop below rounding.
fn polish(problem: &Problem, atoms: &[Atom], mut x: Point) -> Result<Point> {
    let space = &problem.space;
    let c = &problem.constraint;
    let mut g = total_gradient(space, atoms, &x, None)?;
    let mut gn = tangent_norm(&x, &g);
    let mut eta = 0.5;
    for _ in 0..10_000 {
        if gn < 1e-15 || eta < 1e-12 {
            break;
        }
        let step: Coords = g.iter().map(|v| -eta * v).collect();
        let y = exp_map(&x, &step);
        if !c.contains(space, &y, 0.0)? {
            break;
        }
        let gy = total_gradient(space, atoms, &y, None)?;
        let gyn = tangent_norm(&y, &gy);
        if gyn < gn {
            x = y;
            g = gy;
            gn = gyn;
            eta = (eta * 1.2).min(2.0);
        } else {
            eta *= 0.5;
        }
    }
    Ok(x)
}

/// Interval of arc lengths on `leg` that lies in `C`.
fn leg_interval(c: &ConvexSet, leg: usize, whole_space_reach: f64) -> Option<(f64, f64)> {
    match c {
        ConvexSet::WholeSpace => Some((0.0, whole_space_reach)),
        ConvexSet::Ball {
            center: Point::Star { leg: cl, r: cr },
            radius,
        } => {
            if leg == *cl || *cr == 0.0 {
                Some(((cr - radius).max(0.0), cr + radius))
            } else if radius >= cr {
                Some((0.0, radius - cr))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Derivative of `kind` along `leg` at arc length `r`, taken from the right.
fn leg_derivative(kind: &IntegrandKind, space: &Space, leg: usize, r: f64) -> Result<f64> {
    let dist_slope = |a: &Point| -> f64 {
        match a {
            Point::Star { leg: la, r: ra } if *la == leg || *ra == 0.0 => {
                if r >= *ra {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => 1.0,
        }
    };
    let x = Point::Star { leg, r };
    Ok(match kind {
        IntegrandKind::DistTo { a } => dist_slope(a),
        IntegrandKind::HalfSqDist { a } => space.distance(&x, a)? * dist_slope(a),
        IntegrandKind::BusemannLinear { eta, s0 } => match eta {
            BoundaryDirection::Star(l) if *l == leg => -s0,
            _ => *s0,
        },
        IntegrandKind::FiniteMax { members } => {
            let mut best: Option<(f64, f64)> = None;
            for m in members {
                let v = m.eval(space, &x)?;
                let s = leg_derivative(m, space, leg, r)?;
                // ties: the right derivative of a max is the largest slope
                if best.is_none_or(|(bv, bs)| v > bv || (v == bv && s > bs)) {
                    best = Some((v, s));
                }
            }
            best.map_or(0.0, |(_, s)| s)
        }
    })
}

fn leg_search(space: &Space, c: &ConvexSet, atoms: &[Atom], f: &dyn Fn(&Point) -> Result<f64>) -> Result<Point> {
    let legs = match space.kind() {
        crate::geometry::SpaceKind::StarTree { legs } => legs,
        _ => unreachable!("leg search runs on star trees only"),
    };
    let mut reach: f64 = 0.0;
    for atom in atoms {
        if let IntegrandKind::DistTo {
            a: Point::Star { r, .. },
        }
        | IntegrandKind::HalfSqDist {
            a: Point::Star { r, .. },
        } = &atom.kind
        {
            reach = reach.max(*r);
        }
    }
    let reach = 2.0 * reach + 10.0;
    let slope = |leg: usize, r: f64| -> Result<f64> {
        atoms
            .iter()
            .try_fold(0.0, |acc, a| Ok(acc + a.w * leg_derivative(&a.kind, space, leg, r)?))
    };
    let mut best: Option<(f64, Point)> = None;
    for leg in 0..legs {
        let Some((mut lo, mut hi)) = leg_interval(c, leg, reach) else {
            continue;
        };
        // F is convex along the leg, so its right derivative is nondecreasing
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(leg, mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // kinks sit at the targets; test them exactly
        let targets = atoms.iter().filter_map(|a| match &a.kind {
            IntegrandKind::DistTo {
                a: Point::Star { leg: l, r },
            } if *l == leg && (lo..=hi).contains(r) => Some(*r),
            _ => None,
        });
        let candidates: Vec<f64> = targets.chain([lo, hi]).collect();
        for r in candidates {
            let v = f(&Point::Star { leg, r })?;
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, Point::Star { leg, r }));
            }
        }
    }
    let (_, p) = best.ok_or_else(|| Error::usage("constraint set misses every leg"))?;
    if matches!(c, ConvexSet::WholeSpace) {
        if let Point::Star { r, .. } = p {
            if r >= reach - 1e-9 {
                return Err(Error::Degenerate("F has no minimizer on the star tree".into()));
            }
        }
    }
    Ok(match p {
        Point::Star { r: 0.0, .. } => Point::Star { leg: 0, r: 0.0 },
        p => p,
    })
}
