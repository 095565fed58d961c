//! Depth-first branch and bound over the TLSP-S model.
//!
//! Branching follows the priority-search scheme: the next decision always
//! concerns the unassigned job with the smallest possible start time, and the
//! four [`Strategy`] variants control the order in which start, mode, and
//! resource values are tried for it. Propagation tightens start-time and mode
//! domains via time windows, precedences, time-table filtering of committed
//! unary resources, and the optional redundant constraint groups of
//! [`RedundantToggles`]. An admissible completion bound prunes against the
//! incumbent.
//!
//! A solve is single-threaded and deterministic given `(config, seed)`;
//! distinct solves may run concurrently.

mod branch;
mod engine;
mod prep;

use crate::model::{Instance, Penalty, PenaltyBreakdown, Solution};
use serde::{Deserialize, Serialize};
use std::sync::atomic::AtomicBool;
use std::time::Instant;

/// Value-ordering strategy for the priority search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Start first, shortest mode first, most-available resources first.
    StartFirstAff,
    /// Start first, shortest mode first, most-constrained resources first.
    StartFirstFf,
    /// Mode first, then start, most-available resources first.
    ModeFirstAff,
    /// Mode first, then start, most-constrained resources first.
    ModeFirstFf,
}

impl Strategy {
    pub fn mode_before_start(self) -> bool {
        matches!(self, Strategy::ModeFirstAff | Strategy::ModeFirstFf)
    }

    /// Whether resource units are ordered most-available-first (anti
    /// first-fail) rather than most-constrained-first.
    pub fn prefers_available(self) -> bool {
        matches!(self, Strategy::StartFirstAff | Strategy::ModeFirstAff)
    }

    pub const ALL: [Strategy; 4] = [
        Strategy::StartFirstAff,
        Strategy::StartFirstFf,
        Strategy::ModeFirstAff,
        Strategy::ModeFirstFf,
    ];
}

/// Optional redundant constraint groups. All are logically implied by the core
/// constraints; enabling them only changes propagation strength, never the
/// solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedundantToggles {
    /// Relaxed single cumulative over all resource kinds combined.
    pub aggregate_cumulative: bool,
    /// Per-kind global cumulative bounds.
    pub per_resource_cumulative: bool,
    /// Cardinality bounds on total assignment counts.
    pub assignment_cardinality: bool,
}

impl RedundantToggles {
    pub fn none() -> Self {
        RedundantToggles {
            aggregate_cumulative: false,
            per_resource_cumulative: false,
            assignment_cardinality: false,
        }
    }

    pub fn all() -> Self {
        RedundantToggles {
            aggregate_cumulative: true,
            per_resource_cumulative: true,
            assignment_cardinality: true,
        }
    }
}

impl Default for RedundantToggles {
    /// The best-performing combination: everything except the aggregate
    /// cumulative.
    fn default() -> Self {
        RedundantToggles {
            aggregate_cumulative: false,
            per_resource_cumulative: true,
            assignment_cardinality: true,
        }
    }
}

/// Configuration of one exact solve.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub redundant: RedundantToggles,
    /// Wall-clock limit in seconds. Must be positive.
    pub time_limit: f64,
    pub seed: u64,
    /// Shuffle resource-unit order per decision instead of using the
    /// strategy's deterministic order (diversification for neighborhood
    /// moves).
    pub randomized_resource_order: bool,
    /// Feasible solution whose values are tried first at every decision.
    pub hot_start: Option<Solution>,
    /// Inclusive objective allowance: solutions with a total at most this
    /// value are acceptable; nodes whose lower bound exceeds it are pruned.
    pub objective_cutoff: Option<Penalty>,
    /// Stop at the first incumbent instead of proving optimality.
    pub first_solution_only: bool,
    /// Known lower bounds on each project's final contribution (one entry
    /// per project); strengthens pruning without affecting the solution set.
    pub project_floors: Option<Vec<Penalty>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::StartFirstAff,
            redundant: RedundantToggles::default(),
            time_limit: 7200.0,
            seed: 0,
            randomized_resource_order: false,
            hot_start: None,
            objective_cutoff: None,
            first_solution_only: false,
            project_floors: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    /// Best solution is proven globally optimal (within the cutoff, if any).
    Optimal,
    /// A solution was found but the search stopped before proving optimality.
    Feasible,
    /// Exhausted search without a solution: infeasible, or nothing within the
    /// cutoff when one is set.
    Infeasible,
    /// Stopped before finding any solution.
    Unknown,
}

/// Result of a solver, neighborhood-search, or annealing run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub best_solution: Option<Solution>,
    pub best_penalty: Option<PenaltyBreakdown>,
    /// Committed search decisions (exact solver and neighborhood moves).
    pub nodes: u64,
    /// Proposals or moves performed, for the heuristic searches.
    pub moves: u64,
    pub wall_secs: f64,
}

/// Solves `instance` exactly under `config`.
///
/// The instance must be validated and link-normalized. Every returned
/// solution is hard-feasible; `Optimal` status means no solution with a
/// strictly smaller total exists (below the cutoff, when one is set).
pub fn solve(instance: &Instance, config: &SearchConfig) -> SolveOutcome {
    solve_impl(instance, config, None)
}

/// Like [`solve`], but also stops early when `cancel` becomes true, returning
/// the best incumbent found so far.
pub fn solve_cancellable(instance: &Instance, config: &SearchConfig, cancel: &AtomicBool) -> SolveOutcome {
    solve_impl(instance, config, Some(cancel))
}

fn solve_impl(instance: &Instance, config: &SearchConfig, cancel: Option<&AtomicBool>) -> SolveOutcome {
    assert!(config.time_limit > 0.0, "time limit must be positive");
    if let Some(floors) = &config.project_floors {
        assert_eq!(floors.len(), instance.projects.len(), "one floor per project");
    }
    debug_assert!(
        crate::model::validate_instance(instance).is_empty(),
        "solver requires a validated instance"
    );
    let started = Instant::now();
    let prep = prep::Prep::new(instance);
    let mut search = engine::Search::new(&prep, config, cancel, started);
    let (status, best, nodes) = search.run();
    let (best_solution, best_penalty) = match best {
        Some((solution, breakdown)) => (Some(solution), Some(breakdown)),
        None => (None, None),
    };
    SolveOutcome {
        status,
        best_solution,
        best_penalty,
        nodes,
        moves: 0,
        wall_secs: started.elapsed().as_secs_f64(),
    }
}
