//! Solver suite for TLSP-S, the scheduling stage of the industrial test
//! laboratory scheduling problem.
//!
//! Each job of each project gets a mode, a start slot, and concrete resource
//! units (employees, a workbench, lab devices) subject to hard time-window,
//! precedence, availability, linking, and unary-resource constraints. The
//! objective is a weighted sum of five soft terms: job count, non-preferred
//! employee assignments, distinct employees per project, due-date overruns,
//! and project durations.
//!
//! The crate provides:
//! - [`model`]: instance/solution types and structural validation,
//! - [`evaluator`]: hard-feasibility checking and penalty computation,
//! - [`oracle`]: an exhaustive optimizer for tiny instances,
//! - [`solver`]: depth-first branch and bound with constraint propagation,
//! - [`bounds`]: per-project lower bounds,
//! - [`vlns`]: very large neighborhood search built on the exact solver,
//! - [`sa`]: a simulated annealing baseline,
//! - [`io`]: file formats and the random instance generator.

pub mod bounds;
pub mod corpus;
pub mod evaluator;
pub mod io;
pub mod model;
pub mod oracle;
pub mod refcheck;
pub mod sa;
pub mod solver;
pub mod vlns;

pub use model::{Instance, JobAssignment, Penalty, PenaltyBreakdown, Solution, Weights};
