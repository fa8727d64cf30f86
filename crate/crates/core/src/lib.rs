//! Stochastic Busemann subgradient methods on Hadamard spaces.
//!
//! The crate provides three model spaces (Euclidean space, the hyperboloid
//! model of hyperbolic space and finite star trees), integrands with exact
//! Busemann subgradient oracles, the projected iteration with its step-size
//! schedules and ergodic averages, and checkers that certify the inequalities
//! behind its convergence theory on recorded runs and Monte Carlo ensembles.
//!
//! ```
//! use busemann::{experiments, solver};
//!
//! let exp = experiments::mixture(experiments::Model::StarTree, experiments::Mixture::HalfSq, 100, 7);
//! let traj = solver::run(&exp.config).unwrap();
//! assert_eq!(traj.records.len(), 101);
//! ```

// `!(a < b)` is used on purpose to reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod integrands;
pub mod rng;
pub mod solver;
pub mod verify;

pub use error::{Assumption, Error, Result};
pub use geometry::{BoundaryDirection, ConeElement, ConvexSet, Point, Space, SpaceKind};
pub use integrands::{
    Atom, Estimate, ExactOracle, FixedSpeedOracle, IntegrandKind, ObjectiveSpec, ParametricFamily, StochasticObjective,
    SubgradientOracle,
};
pub use solver::{Problem, RunConfig, StepSchedule, Trajectory};
