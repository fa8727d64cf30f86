//! Canonical experiments shared by the verification suites, the acceptance
//! tests and the benchmarks.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{ConvexSet, Point, Space};
use crate::integrands::{Atom, IntegrandKind, ObjectiveSpec};
use crate::solver::{RunConfig, StepSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// The Euclidean plane.
    Euclidean,
    /// The hyperbolic plane.
    Hyperbolic,
    /// A star tree with three legs.
    StarTree,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Euclidean, Model::Hyperbolic, Model::StarTree];

    pub fn name(self) -> &'static str {
        match self {
            Model::Euclidean => "euclidean",
            Model::Hyperbolic => "hyperbolic",
            Model::StarTree => "star_tree",
        }
    }

    pub fn space(self) -> Space {
        match self {
            Model::Euclidean => Space::euclidean(2),
            Model::Hyperbolic => Space::hyperbolic(2),
            Model::StarTree => Space::star_tree(3),
        }
        .expect("fixed dimensions are valid")
    }

    /// A point given by planar coordinates (Euclidean coordinates, or the
    /// spatial part on the hyperboloid) or by `(leg, r)` on the star tree.
    fn at(self, planar: [f64; 2], star: (usize, f64)) -> Point {
        let space = self.space();
        match self {
            Model::Euclidean => space.point(&planar),
            Model::Hyperbolic => space.hyperbolic_point(&planar),
            Model::StarTree => space.star_point(star.0, star.1),
        }
        .expect("fixed coordinates are valid")
    }

    /// The closed unit ball around the base point.
    fn unit_ball(self) -> ConvexSet {
        let space = self.space();
        ConvexSet::ball(&space, space.base().clone(), 1.0).expect("unit ball is valid")
    }
}

/// Objective families of the acceptance experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mixture {
    /// Weighted distances to three targets; merely convex.
    DistTo,
    /// Weighted halved squared distances to three targets; strongly convex.
    HalfSq,
}

impl Mixture {
    pub const ALL: [Mixture; 2] = [Mixture::DistTo, Mixture::HalfSq];

    pub fn name(self) -> &'static str {
        match self {
            Mixture::DistTo => "dist_to",
            Mixture::HalfSq => "half_sq",
        }
    }
}

/// A named run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Experiment {
    pub name: String,
    pub config: RunConfig,
}

fn atoms(model: Model, mixture: Mixture) -> Vec<Atom> {
    let targets: [([f64; 2], (usize, f64), f64); 3] = match mixture {
        Mixture::DistTo => [
            ([0.5, 0.0], (0, 0.5), 0.6),
            ([-0.25, 0.433], (1, 0.5), 0.2),
            ([-0.25, -0.433], (2, 0.5), 0.2),
        ],
        Mixture::HalfSq => [
            ([0.3, 0.0], (0, 0.3), 0.5),
            ([-0.1, 0.2], (1, 0.2), 0.3),
            ([0.0, -0.3], (2, 0.3), 0.2),
        ],
    };
    targets
        .iter()
        .map(|&(planar, star, w)| {
            let a = model.at(planar, star);
            let kind = match mixture {
                Mixture::DistTo => IntegrandKind::DistTo { a },
                Mixture::HalfSq => IntegrandKind::HalfSqDist { a },
            };
            Atom { kind, w }
        })
        .collect()
}

/// Mixture experiment in the unit ball of `model` with an `inv_linear`
/// schedule. The distance mixture has its minimizer at the heaviest target
/// and starts near it with a small step constant, which keeps the ergodic
/// average from remembering a long transient.
pub fn mixture(model: Model, mixture: Mixture, iterations: usize, seed: u64) -> Experiment {
    let (c, x0) = match mixture {
        Mixture::DistTo => (0.1, model.at([0.7, 0.0], (0, 0.7))),
        Mixture::HalfSq => (1.0, model.at([-0.6, 0.5], (1, 0.7))),
    };
    Experiment {
        name: format!("{}_{}", model.name(), mixture.name()),
        config: RunConfig {
            space: model.space(),
            constraint: model.unit_ball(),
            objective: ObjectiveSpec::Atoms(atoms(model, mixture)),
            schedule: StepSchedule::InvLinear { c },
            x0,
            iterations,
            seed,
            record_ergodic: mixture == Mixture::DistTo,
            stride: 1,
            eval_samples: crate::solver::DEFAULT_EVAL_SAMPLES,
            x_star: None,
        },
    }
}

/// Every mixture experiment in every model.
pub fn mixture_suite(iterations: usize, seed: u64) -> Vec<Experiment> {
    Model::ALL
        .iter()
        .flat_map(|&m| Mixture::ALL.iter().map(move |&k| mixture(m, k, iterations, seed)))
        .collect()
}

/// Finite sum of `m = 3` distance atoms in a Euclidean ball of diameter 2
/// with `t_n = D / (m L sqrt(n + 1))`.
pub fn finite_sum(iterations: usize, seed: u64) -> Experiment {
    let model = Model::Euclidean;
    let targets = [[0.6, 0.0], [-0.3, 0.5], [-0.3, -0.5]];
    let atoms = targets
        .iter()
        .map(|&p| Atom {
            kind: IntegrandKind::DistTo {
                a: model.at(p, (0, 0.0)),
            },
            w: 1.0 / 3.0,
        })
        .collect();
    Experiment {
        name: "euclidean_finite_sum".into(),
        config: RunConfig {
            space: model.space(),
            constraint: model.unit_ball(),
            objective: ObjectiveSpec::Atoms(atoms),
            schedule: StepSchedule::InvSqrt { d: 2.0, m: 3, l: 1.0 },
            x0: model.at([0.0, 0.9], (0, 0.0)),
            iterations,
            seed,
            record_ergodic: false,
            stride: 1,
            eval_samples: crate::solver::DEFAULT_EVAL_SAMPLES,
            x_star: None,
        },
    }
}

/// Strongly convex experiment small enough for the rate certificate to be
/// computable: two halved squared distances in a ball of radius 0.08,
/// `inv_linear` with `c = 1`. Available in Euclidean space and on the star
/// tree.
pub fn rate_certificate(model: Model, iterations: usize, seed: u64) -> Result<Experiment> {
    let space = model.space();
    let (center, targets, x0) = match model {
        Model::StarTree => (
            space.base().clone(),
            [space.star_point(0, 0.05)?, space.star_point(1, 0.03)?],
            space.star_point(2, 0.08)?,
        ),
        _ => (
            space.point(&[0.0, 0.0])?,
            [space.point(&[0.04, 0.0])?, space.point(&[-0.02, 0.03])?],
            space.point(&[-0.08, 0.0])?,
        ),
    };
    let atoms = targets
        .into_iter()
        .map(|a| Atom {
            kind: IntegrandKind::HalfSqDist { a },
            w: 0.5,
        })
        .collect();
    Ok(Experiment {
        name: format!("{}_rate_certificate", model.name()),
        config: RunConfig {
            constraint: ConvexSet::ball(&space, center, 0.08)?,
            space,
            objective: ObjectiveSpec::Atoms(atoms),
            schedule: StepSchedule::InvLinear { c: 1.0 },
            x0,
            iterations,
            seed,
            record_ergodic: false,
            stride: 1,
            eval_samples: crate::solver::DEFAULT_EVAL_SAMPLES,
            x_star: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::reference::reference_minimizer;

    #[test]
    fn every_experiment_is_valid() {
        for e in mixture_suite(10, 0) {
            e.config.problem().unwrap();
        }
        finite_sum(10, 0).config.problem().unwrap();
        for m in [Model::Euclidean, Model::StarTree] {
            rate_certificate(m, 10, 0).unwrap().config.problem().unwrap();
        }
    }

    #[test]
    fn distance_mixtures_are_minimized_at_the_heavy_target() {
        for m in Model::ALL {
            let e = mixture(m, Mixture::DistTo, 10, 0);
            let r = reference_minimizer(&e.config.problem().unwrap()).unwrap();
            assert_eq!(r.x_star, m.at([0.5, 0.0], (0, 0.5)), "{}", e.name);
        }
    }
}
