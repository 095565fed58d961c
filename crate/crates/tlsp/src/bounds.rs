//! Per-project lower bounds on penalty contributions.
//!
//! A project's contribution to any feasible full-instance solution is its
//! share of the job-count constant plus its non-preferred, distinct-employee,
//! overrun, and duration terms. Solving the project alone (all other projects
//! removed, resources retained) relaxes the problem, so the sub-instance
//! optimum is a valid bound; when that solve does not finish in time, a
//! cheap heuristic stands in: job count, plus the minimum number of distinct
//! employees, plus the longest chain of minimum durations, with zero for the
//! other two terms.

use crate::model::*;
use crate::solver::{self, SearchConfig, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Optimal total of the single-project sub-instance.
    Exact,
    /// Additive per-term heuristic.
    Heuristic,
}

/// Lower bound on `project`'s penalty contribution, attempting an exact
/// sub-instance solve within `time_limit` seconds and falling back to the
/// heuristic on expiry.
pub fn project_lower_bound(instance: &Instance, project: ProjectId, time_limit: f64) -> (Penalty, BoundKind) {
    let sub = single_project_instance(instance, project);
    let config = SearchConfig { time_limit, ..SearchConfig::default() };
    let outcome = solver::solve(&sub, &config);
    if outcome.status == SolveStatus::Optimal {
        return (outcome.best_penalty.expect("optimal has penalty").total, BoundKind::Exact);
    }
    (heuristic_lower_bound(instance, project), BoundKind::Heuristic)
}

/// Bounds for every project. Projects are independent and computed
/// concurrently, with the worker count capped at the machine's parallelism
/// so each per-project time limit buys full compute.
pub fn all_project_bounds(instance: &Instance, time_limit: f64) -> Vec<(Penalty, BoundKind)> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    let projects = instance.projects.len();
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(projects.max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<(Penalty, BoundKind)>>> = Mutex::new(vec![None; projects]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let p = next.fetch_add(1, Ordering::Relaxed);
                if p >= projects {
                    break;
                }
                let bound = project_lower_bound(instance, p, time_limit);
                results.lock().expect("bounds lock")[p] = Some(bound);
            });
        }
    });
    results
        .into_inner()
        .expect("bounds lock")
        .into_iter()
        .map(|b| b.expect("all projects bounded"))
        .collect()
}

/// Job count + minimum distinct employees + longest minimum-duration chain;
/// zero for the non-preferred and overrun terms.
pub fn heuristic_lower_bound(instance: &Instance, project: ProjectId) -> Penalty {
    let jobs = &instance.projects[project].jobs;
    jobs.len() as Penalty
        + Penalty::from(min_employees_needed(instance, project))
        + longest_min_duration_path(instance, jobs)
}

/// Smallest number of distinct employees any feasible assignment of the
/// project can use: the largest cheapest-mode requirement over its jobs.
/// Always valid; deliberately the weakest bound so validity is auditable.
pub fn min_employees_needed(instance: &Instance, project: ProjectId) -> u32 {
    instance.projects[project]
        .jobs
        .iter()
        .map(|&j| instance.jobs[j].min_employees_required())
        .max()
        .unwrap_or(0)
}

/// Strengthened variant: jobs whose time windows force them to overlap can
/// never share employees, so such a pair needs the sum of its requirements.
/// Off by default everywhere; exposed for callers that want the tighter
/// count.
pub fn min_employees_needed_strengthened(instance: &Instance, project: ProjectId) -> u32 {
    let jobs = &instance.projects[project].jobs;
    let mut best = min_employees_needed(instance, project);
    for (i, &a) in jobs.iter().enumerate() {
        for &b in jobs.iter().skip(i + 1) {
            if forced_overlap(&instance.jobs[a], &instance.jobs[b]) {
                let need = instance.jobs[a].min_employees_required()
                    + instance.jobs[b].min_employees_required();
                best = best.max(need);
            }
        }
    }
    best
}

/// Whether every placement of the two jobs overlaps: each job's latest
/// possible start lies before the other's earliest possible end.
fn forced_overlap(a: &Job, b: &Job) -> bool {
    let latest_start = |j: &Job| j.omega - j.min_duration();
    let earliest_end = |j: &Job| j.alpha + j.min_duration();
    latest_start(a) < earliest_end(b) && latest_start(b) < earliest_end(a)
}

/// Longest path in the precedence DAG restricted to `jobs`, with each node
/// weighted by its minimum duration. Any schedule's project span covers the
/// whole chain.
pub fn longest_min_duration_path(instance: &Instance, jobs: &[JobId]) -> Penalty {
    let mut memo: Vec<Option<Penalty>> = vec![None; instance.jobs.len()];
    let in_set: std::collections::HashSet<JobId> = jobs.iter().copied().collect();

    fn visit(
        j: JobId,
        instance: &Instance,
        in_set: &std::collections::HashSet<JobId>,
        memo: &mut Vec<Option<Penalty>>,
    ) -> Penalty {
        if let Some(v) = memo[j] {
            return v;
        }
        let mut best = 0;
        for &k in &instance.jobs[j].predecessors {
            if in_set.contains(&k) {
                best = best.max(visit(k, instance, in_set, memo));
            }
        }
        let value = best + Penalty::from(instance.jobs[j].min_duration());
        memo[j] = Some(value);
        value
    }

    jobs.iter().map(|&j| visit(j, instance, &in_set, &mut memo)).max().unwrap_or(0)
}

/// The project alone: every other project's jobs removed, resources retained.
pub fn single_project_instance(instance: &Instance, project: ProjectId) -> Instance {
    let (sub, _map) = single_project_instance_mapped(instance, project);
    sub
}

/// Like [`single_project_instance`], also returning the job-id mapping
/// (`map[new] = old`).
pub fn single_project_instance_mapped(instance: &Instance, project: ProjectId) -> (Instance, Vec<JobId>) {
    let old_jobs = &instance.projects[project].jobs;
    let mut new_id = vec![usize::MAX; instance.jobs.len()];
    for (new, &old) in old_jobs.iter().enumerate() {
        new_id[old] = new;
    }
    let jobs: Vec<Job> = old_jobs
        .iter()
        .map(|&old| {
            let mut job = instance.jobs[old].clone();
            job.project = 0;
            job.predecessors = job.predecessors.iter().map(|&k| new_id[k]).collect();
            job.linked = job.linked.iter().map(|&k| new_id[k]).collect();
            job
        })
        .collect();
    let sub = Instance {
        id: format!("{}/{}", instance.id, instance.projects[project].name),
        horizon: instance.horizon,
        employees: instance.employees,
        workbenches: instance.workbenches,
        equipment_groups: instance.equipment_groups.clone(),
        mode_names: instance.mode_names.clone(),
        projects: vec![Project {
            name: instance.projects[project].name.clone(),
            jobs: (0..jobs.len()).collect(),
        }],
        jobs,
        names: instance.names.clone(),
    };
    (sub, old_jobs.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;
    use crate::{corpus, oracle};

    #[test]
    fn heuristic_adds_jobs_employees_and_chain() {
        // 3 jobs of minimum duration 2, two of them chained, one employee
        // needed at most: 3 + 1 + 4 = 8
        let mut inst = corpus::tiny_triple();
        inst.jobs[1].predecessors = vec![0];
        assert_eq!(heuristic_lower_bound(&inst, 0), 8);
    }

    #[test]
    fn exact_bound_on_tiny_chain_project_is_seven() {
        let inst = corpus::tiny_chain();
        let (bound, kind) = project_lower_bound(&inst, 0, 30.0);
        assert_eq!(kind, BoundKind::Exact);
        assert_eq!(bound, 7);
    }

    #[test]
    fn exact_dominates_heuristic() {
        for inst in [corpus::tiny_chain(), corpus::tiny_triple(), corpus::two_projects()] {
            for p in 0..inst.projects.len() {
                let (exact, kind) = project_lower_bound(&inst, p, 30.0);
                assert_eq!(kind, BoundKind::Exact);
                assert!(exact >= heuristic_lower_bound(&inst, p), "{} project {}", inst.id, p);
            }
        }
    }

    #[test]
    fn single_node_paths_use_the_largest_minimum_duration() {
        let mut inst = corpus::tiny_triple();
        inst.jobs[2].modes[0].duration = 5;
        assert_eq!(longest_min_duration_path(&inst, &[0, 1, 2]), 5);
    }

    #[test]
    fn zero_employee_modes_need_no_employees() {
        let mut inst = corpus::tiny_chain();
        for job in &mut inst.jobs {
            job.modes.push(JobMode { mode: 0, duration: 3, employees_required: 0 });
        }
        assert_eq!(min_employees_needed(&inst, 0), 0);
    }

    #[test]
    fn cheapest_mode_requirement_propagates() {
        let mut inst = corpus::tiny_chain();
        inst.jobs[0].modes[0].employees_required = 2;
        assert!(min_employees_needed(&inst, 0) >= 2);
    }

    #[test]
    fn forced_window_overlap_adds_requirements() {
        // both jobs must run within slots 1..=2, each needing one employee
        // from a different pool
        let mut inst = corpus::tiny_triple();
        inst.projects[0].jobs = vec![0, 1];
        inst.jobs.truncate(2);
        for job in &mut inst.jobs {
            job.alpha = 1;
            job.omega = 3;
            job.modes[0].duration = 2;
            job.preferred = vec![];
        }
        inst.jobs[0].qualified = vec![0];
        inst.jobs[1].qualified = vec![1];
        inst.jobs[0].available_workbenches = vec![0];
        inst.jobs[1].available_workbenches = vec![1];
        assert!(validate_instance(&inst).is_empty());
        assert_eq!(min_employees_needed(&inst, 0), 1);
        assert_eq!(min_employees_needed_strengthened(&inst, 0), 2);
        // the oracle on the 2-job instance confirms two distinct employees
        let (_, bd) = oracle::enumerate_optimal(&inst, 1_000_000).unwrap().expect("feasible");
        assert_eq!(bd.s3, 2);
    }

    #[test]
    fn sub_instance_is_well_formed_and_keeps_resources() {
        let inst = corpus::two_projects();
        let (sub, map) = single_project_instance_mapped(&inst, 1);
        assert!(validate_instance(&sub).is_empty());
        assert_eq!(sub.jobs.len(), 1);
        assert_eq!(map, vec![1]);
        assert_eq!(sub.employees, inst.employees);
        assert_eq!(sub.workbenches, inst.workbenches);
    }

    #[test]
    fn bounds_are_valid_against_full_instance_optima() {
        for inst in [corpus::tiny_chain(), corpus::two_projects()] {
            let (solution, bd) = oracle::enumerate_optimal(&inst, 10_000_000).unwrap().expect("feasible");
            let mut total_of_bounds = 0;
            for p in 0..inst.projects.len() {
                let contribution = crate::evaluator::project_contribution(&inst, &solution, p, bd.weights);
                let (bound, _) = project_lower_bound(&inst, p, 10.0);
                assert!(bound <= contribution, "{} project {}: {} > {}", inst.id, p, bound, contribution);
                total_of_bounds += bound;
            }
            assert!(total_of_bounds <= bd.total);
        }
    }
}
