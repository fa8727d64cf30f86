use std::fmt;
use std::sync::Arc;

use super::{Point, Space};
use crate::error::{Error, Result};

/// User-supplied closed convex set. The projector must be idempotent and land
/// inside the set; the test suite checks both on samples rather than at call
/// time.
pub trait CustomSet: Send + Sync + fmt::Debug {
    fn contains(&self, space: &Space, x: &Point) -> bool;
    fn project(&self, space: &Space, x: &Point) -> Result<Point>;
    /// Diameter if the set is bounded.
    fn diameter(&self) -> Option<f64> {
        None
    }
}

/// Nonempty closed convex constraint set `C`.
#[derive(Debug, Clone)]
pub enum ConvexSet {
    WholeSpace,
    Ball { center: Point, radius: f64 },
    Custom(Arc<dyn CustomSet>),
}

impl PartialEq for ConvexSet {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ConvexSet::WholeSpace, ConvexSet::WholeSpace) => true,
            (ConvexSet::Ball { center: c1, radius: r1 }, ConvexSet::Ball { center: c2, radius: r2 }) => {
                c1 == c2 && r1 == r2
            }
            (ConvexSet::Custom(a), ConvexSet::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl ConvexSet {
    pub fn ball(space: &Space, center: Point, radius: f64) -> Result<Self> {
        space.validate_point(&center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::usage(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn diameter(&self) -> Option<f64> {
        match self {
            ConvexSet::WholeSpace => None,
            ConvexSet::Ball { radius, .. } => Some(2.0 * radius),
            ConvexSet::Custom(c) => c.diameter(),
        }
    }

    /// Membership up to an absolute tolerance on the defining distance.
    pub fn contains(&self, space: &Space, x: &Point, tol: f64) -> Result<bool> {
        match self {
            ConvexSet::WholeSpace => {
                space.check(x)?;
                Ok(true)
            }
            ConvexSet::Ball { center, radius } => Ok(space.distance(center, x)? <= radius + tol),
            ConvexSet::Custom(c) => Ok(c.contains(space, x)),
        }
    }

    /// Metric projection `P_C`.
    pub fn project(&self, space: &Space, x: &Point) -> Result<Point> {
        match self {
            ConvexSet::WholeSpace => {
                space.check(x)?;
                Ok(x.clone())
            }
            ConvexSet::Ball { center, radius } => {
                let d = space.distance(center, x)?;
                if d <= *radius {
                    Ok(x.clone())
                } else {
                    space.combine(center, x, radius / d)
                }
            }
            ConvexSet::Custom(c) => c.project(space, x),
        }
    }
}
