//! Concrete Hadamard spaces: Euclidean space, the hyperboloid model of
//! hyperbolic space, and star trees.
//!
//! Every operation is a pure function of its inputs. A [`Space`] carries the
//! fixed base point used by all Busemann functions, so pairing values are
//! reproducible across runs that share a configuration.

mod convex;
pub(crate) mod euclidean;
pub(crate) mod hyperbolic;
mod serde_impl;
pub(crate) mod star;

use rand::Rng;
use rand_distr::StandardNormal;
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use convex::{ConvexSet, CustomSet};

/// Inline coordinate storage; spaces of dimension up to 3 never allocate.
pub type Coords = SmallVec<[f64; 4]>;

/// Tolerance on the hyperboloid and unit-vector constraints of user input.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Euclidean { dim: usize },
    Hyperbolic { dim: usize },
    StarTree { legs: usize },
}

/// A point of one of the supported spaces.
#[derive(Debug, Clone)]
pub enum Point {
    Euclidean(Coords),
    /// Time-first hyperboloid coordinates, `dim + 1` entries.
    Hyperbolic(Coords),
    Star {
        leg: usize,
        r: f64,
    },
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Point::Euclidean(a), Point::Euclidean(b)) => a == b,
            (Point::Hyperbolic(a), Point::Hyperbolic(b)) => a == b,
            (Point::Star { leg: i, r: a }, Point::Star { leg: j, r: b }) => a == b && (i == j || *a == 0.0),
            _ => false,
        }
    }
}

impl Point {
    fn tag(&self) -> &'static str {
        match self {
            Point::Euclidean(_) => "euclidean",
            Point::Hyperbolic(_) => "hyperbolic",
            Point::Star { .. } => "star_tree",
        }
    }

    /// Coordinates for the vector-backed spaces.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Euclidean(c) | Point::Hyperbolic(c) => Some(c),
            Point::Star { .. } => None,
        }
    }
}

/// A point of the boundary at infinity: an asymptote class of rays.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryDirection {
    /// Unit vector.
    Euclidean(Coords),
    /// Future-pointing null vector with time coordinate 1.
    Hyperbolic(Coords),
    /// Leg index.
    Star(usize),
}

impl BoundaryDirection {
    fn tag(&self) -> &'static str {
        match self {
            BoundaryDirection::Euclidean(_) => "euclidean",
            BoundaryDirection::Hyperbolic(_) => "hyperbolic",
            BoundaryDirection::Star(_) => "star_tree",
        }
    }
}

/// Element `[xi, s]` of the boundary cone. All zero-speed pairs collapse to
/// [`ConeElement::Zero`].
#[derive(Debug, Clone, PartialEq)]
pub enum ConeElement {
    Zero,
    Ray { direction: BoundaryDirection, speed: f64 },
}

impl ConeElement {
    pub fn new(direction: BoundaryDirection, speed: f64) -> Result<Self> {
        if !speed.is_finite() || speed < 0.0 {
            return Err(Error::usage(format!("cone speed must be finite and >= 0, got {speed}")));
        }
        Ok(if speed == 0.0 {
            ConeElement::Zero
        } else {
            ConeElement::Ray { direction, speed }
        })
    }

    pub fn speed(&self) -> f64 {
        match self {
            ConeElement::Zero => 0.0,
            ConeElement::Ray { speed, .. } => *speed,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ConeElement::Zero)
    }

    /// `[xi, a s]` for `a >= 0`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        match self {
            ConeElement::Zero => Ok(ConeElement::Zero),
            ConeElement::Ray { direction, speed } => ConeElement::new(direction.clone(), a * speed),
        }
    }
}

/// One of the supported Hadamard spaces together with its base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    kind: SpaceKind,
    base: Point,
}

impl Space {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("euclidean dimension must be positive"));
        }
        Ok(Space {
            kind: SpaceKind::Euclidean { dim },
            base: Point::Euclidean(smallvec::smallvec![0.0; dim]),
        })
    }

    /// Hyperbolic space of the given dimension with base point at the apex.
    pub fn hyperbolic(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("hyperbolic dimension must be positive"));
        }
        let mut apex: Coords = smallvec::smallvec![0.0; dim + 1];
        apex[0] = 1.0;
        Ok(Space {
            kind: SpaceKind::Hyperbolic { dim },
            base: Point::Hyperbolic(apex),
        })
    }

    /// Star tree with base point at the hub.
    pub fn star_tree(legs: usize) -> Result<Self> {
        if legs < 3 {
            return Err(Error::usage(format!("star tree needs at least 3 legs, got {legs}")));
        }
        Ok(Space {
            kind: SpaceKind::StarTree { legs },
            base: Point::Star { leg: 0, r: 0.0 },
        })
    }

    pub fn with_base(mut self, base: Point) -> Result<Self> {
        self.validate_point(&base)?;
        self.base = base;
        Ok(self)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    /// Dimension of the manifold (1 for star trees).
    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean { dim } | SpaceKind::Hyperbolic { dim } => dim,
            SpaceKind::StarTree { .. } => 1,
        }
    }

    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        let p = match self.kind {
            SpaceKind::Euclidean { .. } => Point::Euclidean(Coords::from_slice(coords)),
            SpaceKind::Hyperbolic { .. } => Point::Hyperbolic(Coords::from_slice(coords)),
            SpaceKind::StarTree { .. } => {
                return Err(Error::usage("star tree points are built with Space::star_point"))
            }
        };
        self.validate_point(&p)?;
        Ok(p)
    }

    /// Hyperbolic point with the given spatial coordinates, lifted onto the
    /// hyperboloid.
    pub fn hyperbolic_point(&self, spatial: &[f64]) -> Result<Point> {
        match self.kind {
            SpaceKind::Hyperbolic { dim } if spatial.len() == dim => Ok(Point::Hyperbolic(hyperbolic::lift(spatial))),
            _ => Err(Error::SpaceMismatch(format!(
                "{} spatial coordinates do not fit {:?}",
                spatial.len(),
                self.kind
            ))),
        }
    }

    pub fn star_point(&self, leg: usize, r: f64) -> Result<Point> {
        let p = Point::Star { leg, r };
        self.validate_point(&p)?;
        Ok(p)
    }

    /// Boundary direction from a (possibly unnormalized) vector. For
    /// hyperbolic space the vector is the spatial part `u` of `(1, u)`.
    pub fn direction(&self, u: &[f64]) -> Result<BoundaryDirection> {
        let n = euclidean::norm(u);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Degenerate("direction vector must be nonzero".into()));
        }
        match self.kind {
            SpaceKind::Euclidean { dim } if u.len() == dim => {
                Ok(BoundaryDirection::Euclidean(u.iter().map(|v| v / n).collect()))
            }
            SpaceKind::Hyperbolic { dim } if u.len() == dim => {
                let mut xi = Coords::with_capacity(dim + 1);
                xi.push(1.0);
                xi.extend(u.iter().map(|v| v / n));
                Ok(BoundaryDirection::Hyperbolic(xi))
            }
            _ => Err(Error::SpaceMismatch(format!(
                "direction of length {} does not fit {:?}",
                u.len(),
                self.kind
            ))),
        }
    }

    pub fn star_direction(&self, leg: usize) -> Result<BoundaryDirection> {
        let d = BoundaryDirection::Star(leg);
        self.validate_direction(&d)?;
        Ok(d)
    }

    pub fn validate_point(&self, p: &Point) -> Result<()> {
        let ok = match (self.kind, p) {
            (SpaceKind::Euclidean { dim }, Point::Euclidean(c)) => c.len() == dim && c.iter().all(|v| v.is_finite()),
            (SpaceKind::Hyperbolic { dim }, Point::Hyperbolic(c)) => {
                c.len() == dim + 1
                    && c.iter().all(|v| v.is_finite())
                    && c[0] > 0.0
                    && hyperbolic::constraint_residual(c) <= CONSTRAINT_TOL
            }
            (SpaceKind::StarTree { legs }, Point::Star { leg, r }) => *leg < legs && r.is_finite() && *r >= 0.0,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!("{p:?} is not a point of {:?}", self.kind)))
        }
    }

    pub fn validate_direction(&self, d: &BoundaryDirection) -> Result<()> {
        let ok = match (self.kind, d) {
            (SpaceKind::Euclidean { dim }, BoundaryDirection::Euclidean(u)) => {
                u.len() == dim && (euclidean::norm(u) - 1.0).abs() <= CONSTRAINT_TOL
            }
            (SpaceKind::Hyperbolic { dim }, BoundaryDirection::Hyperbolic(xi)) => {
                xi.len() == dim + 1 && xi[0] == 1.0 && (euclidean::norm(&xi[1..]) - 1.0).abs() <= CONSTRAINT_TOL
            }
            (SpaceKind::StarTree { legs }, BoundaryDirection::Star(leg)) => *leg < legs,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "{d:?} is not a boundary point of {:?}",
                self.kind
            )))
        }
    }

    #[inline]
    fn check(&self, p: &Point) -> Result<()> {
        let ok = match (self.kind, p) {
            (SpaceKind::Euclidean { dim }, Point::Euclidean(c)) => c.len() == dim,
            (SpaceKind::Hyperbolic { dim }, Point::Hyperbolic(c)) => c.len() == dim + 1,
            (SpaceKind::StarTree { legs }, Point::Star { leg, .. }) => *leg < legs,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "{} point used in {:?}",
                p.tag(),
                self.kind
            )))
        }
    }

    #[inline]
    fn check_dir(&self, d: &BoundaryDirection) -> Result<()> {
        let ok = match (self.kind, d) {
            (SpaceKind::Euclidean { dim }, BoundaryDirection::Euclidean(u)) => u.len() == dim,
            (SpaceKind::Hyperbolic { dim }, BoundaryDirection::Hyperbolic(u)) => u.len() == dim + 1,
            (SpaceKind::StarTree { legs }, BoundaryDirection::Star(leg)) => *leg < legs,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "{} direction used in {:?}",
                d.tag(),
                self.kind
            )))
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (x, y) {
            (Point::Euclidean(a), Point::Euclidean(b)) => euclidean::distance(a, b),
            (Point::Hyperbolic(a), Point::Hyperbolic(b)) => hyperbolic::distance(a, b),
            (Point::Star { leg: i, r: a }, Point::Star { leg: j, r: b }) => star::distance((*i, *a), (*j, *b)),
            _ => unreachable!("checked above"),
        })
    }

    /// The point `(1 - lambda) x + lambda y` on the geodesic from `x` to `y`.
    pub fn combine(&self, x: &Point, y: &Point, lambda: f64) -> Result<Point> {
        self.check(x)?;
        self.check(y)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::usage(format!("combination weight {lambda} outside [0, 1]")));
        }
        if lambda == 0.0 {
            return Ok(x.clone());
        }
        if lambda == 1.0 {
            return Ok(y.clone());
        }
        Ok(match (x, y) {
            (Point::Euclidean(a), Point::Euclidean(b)) => Point::Euclidean(euclidean::combine(a, b, lambda)),
            (Point::Hyperbolic(a), Point::Hyperbolic(b)) => Point::Hyperbolic(hyperbolic::combine(a, b, lambda)),
            (Point::Star { leg: i, r: a }, Point::Star { leg: j, r: b }) => {
                let (leg, r) = star::combine((*i, *a), (*j, *b), lambda);
                Point::Star { leg, r }
            }
            _ => unreachable!("checked above"),
        })
    }

    /// `r_{x, xi}(t)`: the point at arc length `t` on the unique ray from `x`
    /// in direction `xi`.
    pub fn ray_point(&self, x: &Point, xi: &BoundaryDirection, t: f64) -> Result<Point> {
        self.check(x)?;
        self.check_dir(xi)?;
        if !(t >= 0.0) {
            return Err(Error::usage(format!("ray parameter must be >= 0, got {t}")));
        }
        Ok(match (x, xi) {
            (Point::Euclidean(a), BoundaryDirection::Euclidean(u)) => Point::Euclidean(euclidean::ray_point(a, u, t)),
            (Point::Hyperbolic(a), BoundaryDirection::Hyperbolic(u)) => {
                if t == 0.0 {
                    x.clone()
                } else {
                    Point::Hyperbolic(hyperbolic::ray_point(a, u, t))
                }
            }
            (Point::Star { leg, r }, BoundaryDirection::Star(j)) => {
                let (leg, r) = star::ray_point((*leg, *r), *j, t);
                Point::Star { leg, r }
            }
            _ => unreachable!("checked above"),
        })
    }

    /// Direction of a ray from `x` passing through `y`.
    pub fn direction_through(&self, x: &Point, y: &Point) -> Result<BoundaryDirection> {
        self.check(x)?;
        self.check(y)?;
        let degenerate = || Error::Degenerate("direction_through needs two distinct points".into());
        match (x, y) {
            (Point::Euclidean(a), Point::Euclidean(b)) => euclidean::direction(a, b)
                .map(BoundaryDirection::Euclidean)
                .ok_or_else(degenerate),
            (Point::Hyperbolic(a), Point::Hyperbolic(b)) => hyperbolic::direction(a, b)
                .map(BoundaryDirection::Hyperbolic)
                .ok_or_else(degenerate),
            (Point::Star { leg: i, r: a }, Point::Star { leg: j, r: b }) => star::direction((*i, *a), (*j, *b))
                .map(BoundaryDirection::Star)
                .ok_or_else(degenerate),
            _ => unreachable!("checked above"),
        }
    }

    /// Busemann function of the ray from the base point in direction `xi`.
    pub fn busemann(&self, xi: &BoundaryDirection, y: &Point) -> Result<f64> {
        self.check(y)?;
        self.check_dir(xi)?;
        Ok(match (xi, y, &self.base) {
            (BoundaryDirection::Euclidean(u), Point::Euclidean(p), Point::Euclidean(b)) => euclidean::busemann(u, b, p),
            (BoundaryDirection::Hyperbolic(u), Point::Hyperbolic(p), Point::Hyperbolic(b)) => {
                hyperbolic::horofunction(u, p) - hyperbolic::horofunction(u, b)
            }
            (BoundaryDirection::Star(j), Point::Star { leg, r }, Point::Star { leg: bl, r: br }) => {
                star::horofunction(*j, (*leg, *r)) - star::horofunction(*j, (*bl, *br))
            }
            _ => unreachable!("checked above"),
        })
    }

    /// `<y, [xi, s]> = s b_xi(y)`, and 0 on the zero class.
    pub fn pairing(&self, y: &Point, g: &ConeElement) -> Result<f64> {
        match g {
            ConeElement::Zero => {
                self.check(y)?;
                Ok(0.0)
            }
            ConeElement::Ray { direction, speed } => Ok(speed * self.busemann(direction, y)?),
        }
    }

    /// Right-hand side minus left-hand side of the CAT(0) comparison
    /// inequality for the geodesic `[p, q]`, the point `x` and the parameter `t`.
    pub fn cat0_defect(&self, x: &Point, endpoints: (&Point, &Point), t: f64) -> Result<f64> {
        let (p, q) = endpoints;
        let m = self.combine(p, q, t)?;
        let lhs = self.distance(&m, x)?.powi(2);
        let rhs = (1.0 - t) * self.distance(p, x)?.powi(2) + t * self.distance(q, x)?.powi(2)
            - t * (1.0 - t) * self.distance(p, q)?.powi(2);
        Ok(rhs - lhs)
    }

    /// Checks that the geodesic `[x, y]` stays in `{z : d(p, z) <= d(z, q)}`
    /// at `samples` evenly spaced parameters. Vacuously true when `x` or `y`
    /// lies outside that set.
    pub fn q4bar_check(&self, p: &Point, q: &Point, x: &Point, y: &Point, samples: usize) -> Result<bool> {
        if samples == 0 {
            return Err(Error::usage("q4bar_check needs at least one sample"));
        }
        let inside = |z: &Point| -> Result<bool> { Ok(self.distance(p, z)? <= self.distance(z, q)?) };
        if !inside(x)? || !inside(y)? {
            return Ok(true);
        }
        for k in 0..samples {
            let lambda = if samples == 1 {
                0.5
            } else {
                k as f64 / (samples - 1) as f64
            };
            let m = self.combine(x, y, lambda)?;
            if self.distance(p, &m)? > self.distance(&m, q)? + 1e-9 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Finite-window surrogate of the asymptotic radius: `max_i d^2(x_i, y)`.
    pub fn asymptotic_radius(&self, tail: &[Point], y: &Point) -> Result<f64> {
        if tail.is_empty() {
            return Err(Error::usage("asymptotic radius of an empty tail"));
        }
        tail.iter()
            .try_fold(0.0_f64, |acc, x| Ok(acc.max(self.distance(x, y)?.powi(2))))
    }

    /// Random boundary direction as seen from `x` (uniform for Euclidean space,
    /// the hyperbolic apex and star trees).
    pub fn random_direction<R: Rng + ?Sized>(&self, x: &Point, rng: &mut R) -> Result<BoundaryDirection> {
        self.check(x)?;
        match (self.kind, x) {
            (SpaceKind::Euclidean { dim }, _) => {
                let u = gaussian_unit(dim, rng);
                Ok(BoundaryDirection::Euclidean(u))
            }
            (SpaceKind::Hyperbolic { dim }, Point::Hyperbolic(p)) => {
                let v = random_unit_tangent(p, dim, rng);
                Ok(BoundaryDirection::Hyperbolic(hyperbolic::boundary_of_tangent(p, &v)))
            }
            (SpaceKind::StarTree { legs }, _) => Ok(BoundaryDirection::Star(rng.random_range(0..legs))),
            _ => unreachable!("checked above"),
        }
    }

    /// Random point at distance at most `radius` from `center`, drawn along a
    /// random ray with radius scaled as `u^(1/dim)`.
    pub fn sample_ball<R: Rng + ?Sized>(&self, center: &Point, radius: f64, rng: &mut R) -> Result<Point> {
        let xi = self.random_direction(center, rng)?;
        let u: f64 = rng.random();
        let t = radius * u.powf(1.0 / self.dim() as f64);
        self.ray_point(center, &xi, t)
    }
}

fn gaussian_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Coords {
    loop {
        let g: Coords = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = euclidean::norm(&g);
        if n > 1e-12 {
            return g.iter().map(|v| v / n).collect();
        }
    }
}

/// Random unit tangent at hyperboloid point `p`: a Gaussian spatial vector
/// projected onto the tangent space and normalized.
fn random_unit_tangent<R: Rng + ?Sized>(p: &[f64], dim: usize, rng: &mut R) -> Coords {
    loop {
        let mut w: Coords = smallvec::smallvec![0.0; dim + 1];
        for v in w[1..].iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        // project: w + <w, p> p is Minkowski-orthogonal to p
        let c = hyperbolic::minkowski(&w, p);
        for (wi, pi) in w.iter_mut().zip(p) {
            *wi += c * pi;
        }
        let n2 = hyperbolic::minkowski(&w, &w);
        if n2 > 1e-16 {
            let n = n2.sqrt();
            return w.iter().map(|v| v / n).collect();
        }
    }
}

#[cfg(test)]
mod tests;
