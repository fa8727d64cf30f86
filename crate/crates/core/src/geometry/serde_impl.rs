//! JSON representations.
//!
//! ```text
//! space      {"kind":"euclidean","dim":2,"base":[0,0]}
//!            {"kind":"hyperbolic","dim":2,"base":[1,0,0]}
//!            {"kind":"star_tree","legs":3,"base":{"leg":0,"r":0}}
//! point      {"space":"euclidean","coords":[..]} | {"leg":i,"r":x}
//! direction  {"space":"euclidean","u":[..]} | {"space":"hyperbolic","u":[spatial]} | {"leg":i}
//! cone       {"direction":{..},"speed":s} | {"speed":0}
//! set        {"kind":"whole_space"} | {"kind":"ball","center":{..},"radius":r}
//! ```

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BoundaryDirection, ConeElement, ConvexSet, Coords, Point, Space, SpaceKind};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum VectorTag {
    Euclidean,
    Hyperbolic,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Vector { space: VectorTag, coords: Coords },
    Star { leg: usize, r: f64 },
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Point::Euclidean(c) => PointRepr::Vector {
                space: VectorTag::Euclidean,
                coords: c.clone(),
            },
            Point::Hyperbolic(c) => PointRepr::Vector {
                space: VectorTag::Hyperbolic,
                coords: c.clone(),
            },
            Point::Star { leg, r } => PointRepr::Star { leg: *leg, r: *r },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match PointRepr::deserialize(d)? {
            PointRepr::Vector {
                space: VectorTag::Euclidean,
                coords,
            } => Point::Euclidean(coords),
            PointRepr::Vector {
                space: VectorTag::Hyperbolic,
                coords,
            } => Point::Hyperbolic(coords),
            PointRepr::Star { leg, r } => Point::Star { leg, r },
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DirectionRepr {
    Vector { space: VectorTag, u: Coords },
    Star { leg: usize },
}

impl Serialize for BoundaryDirection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            BoundaryDirection::Euclidean(u) => DirectionRepr::Vector {
                space: VectorTag::Euclidean,
                u: u.clone(),
            },
            BoundaryDirection::Hyperbolic(xi) => DirectionRepr::Vector {
                space: VectorTag::Hyperbolic,
                u: Coords::from_slice(&xi[1..]),
            },
            BoundaryDirection::Star(leg) => DirectionRepr::Star { leg: *leg },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryDirection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match DirectionRepr::deserialize(d)? {
            DirectionRepr::Vector {
                space: VectorTag::Euclidean,
                u,
            } => BoundaryDirection::Euclidean(u),
            DirectionRepr::Vector {
                space: VectorTag::Hyperbolic,
                u,
            } => {
                let mut xi = Coords::with_capacity(u.len() + 1);
                xi.push(1.0);
                xi.extend_from_slice(&u);
                BoundaryDirection::Hyperbolic(xi)
            }
            DirectionRepr::Star { leg } => BoundaryDirection::Star(leg),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction: Option<BoundaryDirection>,
    speed: f64,
}

impl Serialize for ConeElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            ConeElement::Zero => ConeRepr {
                direction: None,
                speed: 0.0,
            },
            ConeElement::Ray { direction, speed } => ConeRepr {
                direction: Some(direction.clone()),
                speed: *speed,
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConeElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ConeRepr::deserialize(d)?;
        match (repr.direction, repr.speed) {
            (_, 0.0) => Ok(ConeElement::Zero),
            (Some(direction), s) => ConeElement::new(direction, s).map_err(D::Error::custom),
            (None, _) => Err(D::Error::custom("nonzero cone element needs a direction")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SpaceRepr {
    Euclidean {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Coords>,
    },
    Hyperbolic {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<Coords>,
    },
    StarTree {
        legs: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        base: Option<StarBase>,
    },
}

#[derive(Serialize, Deserialize)]
struct StarBase {
    leg: usize,
    r: f64,
}

impl Serialize for Space {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match (self.kind, &self.base) {
            (SpaceKind::Euclidean { dim }, Point::Euclidean(b)) => SpaceRepr::Euclidean {
                dim,
                base: Some(b.clone()),
            },
            (SpaceKind::Hyperbolic { dim }, Point::Hyperbolic(b)) => SpaceRepr::Hyperbolic {
                dim,
                base: Some(b.clone()),
            },
            (SpaceKind::StarTree { legs }, Point::Star { leg, r }) => SpaceRepr::StarTree {
                legs,
                base: Some(StarBase { leg: *leg, r: *r }),
            },
            _ => return Err(serde::ser::Error::custom("space base point has the wrong type")),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Space {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (space, base) = match SpaceRepr::deserialize(d)? {
            SpaceRepr::Euclidean { dim, base } => (Space::euclidean(dim), base.map(Point::Euclidean)),
            SpaceRepr::Hyperbolic { dim, base } => (Space::hyperbolic(dim), base.map(Point::Hyperbolic)),
            SpaceRepr::StarTree { legs, base } => {
                (Space::star_tree(legs), base.map(|b| Point::Star { leg: b.leg, r: b.r }))
            }
        };
        let space = space.map_err(D::Error::custom)?;
        match base {
            Some(b) => space.with_base(b).map_err(D::Error::custom),
            None => Ok(space),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SetRepr {
    WholeSpace,
    Ball { center: Point, radius: f64 },
}

impl Serialize for ConvexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ConvexSet::WholeSpace => SetRepr::WholeSpace.serialize(s),
            ConvexSet::Ball { center, radius } => SetRepr::Ball {
                center: center.clone(),
                radius: *radius,
            }
            .serialize(s),
            ConvexSet::Custom(_) => Err(serde::ser::Error::custom(
                "custom convex sets have no JSON representation",
            )),
        }
    }
}

impl<'de> Deserialize<'de> for ConvexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match SetRepr::deserialize(d)? {
            SetRepr::WholeSpace => ConvexSet::WholeSpace,
            SetRepr::Ball { center, radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(D::Error::custom(format!("ball radius must be positive, got {radius}")));
                }
                ConvexSet::Ball { center, radius }
            }
        })
    }
}
