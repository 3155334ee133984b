//! Independent solvers and closed forms used to cross-check the main
//! routines.

pub mod curves;
pub mod finite_diff;
pub mod planner;
pub mod random;
pub mod simplex;
pub mod tatonnement;

pub use curves::{textbook_curves, CurveSample};
pub use finite_diff::{finite_difference_check, DerivativeReport};
pub use planner::{numeric_planner, PlannerOutcome};
pub use tatonnement::{tatonnement_solve, TatonnementConfig, TatonnementOutcome};
