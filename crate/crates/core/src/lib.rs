//! Quality-aware coding and relay selection for 60 GHz real-time video
//! broadcasting.
//!
//! The crate is layered bottom-up:
//!
//! * [`linkbudget`] turns a link length into a Shannon capacity using a
//!   log-distance pathloss model with oxygen absorption.
//! * [`quality`] holds the normalized logarithmic video-quality curve and
//!   the Hessian diagnostic showing why the naive formulation is not convex.
//! * [`model`] builds network instances (geometry plus achievable rates) and
//!   the mixed-integer convex program that couples rates to binary links.
//! * [`solver`] contains a bounded revised simplex, two relaxation methods
//!   (perspective column generation and Frank–Wolfe), branch-and-bound, a
//!   greedy warm start and an exhaustive enumeration oracle.
//! * [`sim`] runs the seeded Monte Carlo stadium evaluation: aggregate
//!   quality CDFs, per-setting means and stream-outage sweeps.

pub mod error;
pub mod linkbudget;
pub mod model;
pub mod quality;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use linkbudget::LinkBudgetParams;
pub use model::{
    build_instance, build_program, check_solution, Geometry, MixedIntegerConvexProgram,
    NetworkInstance, ObjectiveKind, Point, ProblemSpec, Solution, SolveStatus, Violation,
};
pub use quality::{HessianReport, QualityParams};
pub use solver::{branch_and_bound, enumerate_oracle, greedy_incumbent, solve_with_assignment, SolverOptions};
