//! Numerical certification of the inequalities behind the convergence
//! theory, applied to recorded trajectories, ensembles and synthetic
//! sequences.

mod diagnostics;
pub mod ergodic;
pub mod fejer;
pub mod martingale;
pub mod monte_carlo;
pub mod per_step;
pub mod rates;
pub mod reference;
pub mod report;
pub mod sequences;

pub use diagnostics::{asymptotic_center_approx, strong_convexity_gap};
