//! Very large neighborhood search: repeatedly fix all but a few projects and
//! re-optimize the free part exactly.
//!
//! One iteration selects k projects that overlap in the current schedule (or,
//! failing that, in their time windows) with at least one of them still above
//! its lower bound, pins everything else, and hands the reduced instance to
//! the exact solver as a move. Moves are hot-started with the current
//! assignment most of the time; cold moves randomize the solver's resource
//! order instead. Tried combinations go on a list and are skipped until a
//! later move changes a job overlapping their projects. k falls back to 1
//! after each improving move and grows (sometimes by two) when the current
//! size is exhausted; the run ends when the incumbent matches the sum of the
//! per-project lower bounds, when no combination is left at any size, or at
//! the time limit.

use crate::bounds::{self, BoundKind};
use crate::evaluator;
use crate::model::*;
use crate::solver::{self, SearchConfig, SolveOutcome, SolveStatus};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct VlnsConfig {
    /// Probability of seeding a move with the current assignment.
    pub hot_start_prob: f64,
    /// Probability of growing k by two instead of one on exhaustion.
    pub jump_prob: f64,
    /// Seconds per move.
    pub move_time_limit: f64,
    /// Seconds per project lower bound.
    pub lb_time_limit: f64,
    /// Seconds for the initial feasibility solve.
    pub initial_time_limit: f64,
    /// Overall wall-clock budget in seconds.
    pub total_time_limit: f64,
    pub seed: u64,
}

impl Default for VlnsConfig {
    fn default() -> Self {
        VlnsConfig {
            hot_start_prob: 0.8,
            jump_prob: 0.35,
            move_time_limit: 30.0,
            lb_time_limit: 30.0,
            initial_time_limit: 60.0,
            total_time_limit: 7200.0,
            seed: 0,
        }
    }
}

/// Mutable search state, exposed so the individual steps can be driven and
/// inspected directly.
pub struct VlnsState {
    pub incumbent: Solution,
    pub total: Penalty,
    /// Current neighborhood size.
    pub k: usize,
    /// Combinations already optimized; skipped (with their subsets) until a
    /// change touches them.
    pub tried: Vec<BTreeSet<ProjectId>>,
    pub project_bounds: Vec<(Penalty, BoundKind)>,
    /// Set when the last selection attempt found nothing at the current k.
    pub exhausted_at_k: bool,
    pub jump_prob: f64,
}

impl VlnsState {
    pub fn bound_sum(&self) -> Penalty {
        self.project_bounds.iter().map(|(b, _)| *b).sum()
    }
}

/// A reduced instance produced by [`fix_and_reduce`], with the id mapping
/// back into the original.
pub struct Reduced {
    pub instance: Instance,
    /// `job_map[reduced_id] = original_id`.
    pub job_map: Vec<JobId>,
    /// `project_map[reduced_id] = original_id`.
    pub project_map: Vec<ProjectId>,
    /// Original ids of the selected (free) projects.
    pub selected: Vec<ProjectId>,
}

impl Reduced {
    /// Projects a full solution onto the reduced job space.
    pub fn project_solution(&self, full: &Solution) -> Solution {
        Solution::new(self.job_map.iter().map(|&old| canonical(full.jobs[old].clone())).collect())
    }

    /// Splices a reduced-space slice back into `base`.
    pub fn recombine(&self, base: &Solution, slice: &Solution) -> Solution {
        let mut out = base.clone();
        for (new, &old) in self.job_map.iter().enumerate() {
            out.jobs[old] = canonical(slice.jobs[new].clone());
        }
        out
    }

    /// Original ids of jobs whose assignment differs between `base` and the
    /// slice.
    pub fn changed_jobs(&self, base: &Solution, slice: &Solution) -> Vec<JobId> {
        self.job_map
            .iter()
            .enumerate()
            .filter(|&(new, &old)| canonical(base.jobs[old].clone()) != slice.jobs[new])
            .map(|(_, &old)| old)
            .collect()
    }
}

fn canonical(mut a: JobAssignment) -> JobAssignment {
    a.employees.sort_unstable();
    for d in &mut a.devices {
        d.sort_unstable();
    }
    a
}

/// Occupied hull `[min start, max end)` of a project in `solution`.
fn schedule_interval(instance: &Instance, solution: &Solution, p: ProjectId) -> (Slot, Slot) {
    let mut lo = Slot::MAX;
    let mut hi = 0;
    for &j in &instance.projects[p].jobs {
        let a = &solution.jobs[j];
        let end = a.end(&instance.jobs[j]).expect("feasible incumbent");
        lo = lo.min(a.start);
        hi = hi.max(end);
    }
    (lo, hi)
}

/// Time-window hull `[min release, max deadline)` of a project.
fn window_interval(instance: &Instance, p: ProjectId) -> (Slot, Slot) {
    let mut lo = Slot::MAX;
    let mut hi = 0;
    for &j in &instance.projects[p].jobs {
        lo = lo.min(instance.jobs[j].alpha);
        hi = hi.max(instance.jobs[j].omega);
    }
    (lo, hi)
}

fn intervals_overlap(a: (Slot, Slot), b: (Slot, Slot)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

/// Picks a random eligible combination of `state.k` projects: pairwise
/// overlapping in the current schedule (falling back to time windows when no
/// schedule-overlapping combination is eligible), containing at least one
/// project above its bound, and not covered by the tried list.
pub fn select_combination(
    instance: &Instance,
    state: &VlnsState,
    rng: &mut impl Rng,
) -> Option<Vec<ProjectId>> {
    let k = state.k;
    let nproj = instance.projects.len();
    if k == 0 || k > nproj {
        return None;
    }
    let improvable: Vec<bool> = (0..nproj)
        .map(|p| {
            let contribution =
                evaluator::project_contribution(instance, &state.incumbent, p, Weights::default());
            contribution > state.project_bounds[p].0
        })
        .collect();
    if !improvable.iter().any(|&i| i) {
        return None;
    }

    let schedule: Vec<(Slot, Slot)> =
        (0..nproj).map(|p| schedule_interval(instance, &state.incumbent, p)).collect();
    let mut candidates = eligible_combinations(instance, state, &improvable, &schedule, k);
    if candidates.is_empty() {
        let windows: Vec<(Slot, Slot)> = (0..nproj).map(|p| window_interval(instance, p)).collect();
        candidates = eligible_combinations(instance, state, &improvable, &windows, k);
    }
    if candidates.is_empty() {
        return None;
    }
    let pick = rng.random_range(0..candidates.len());
    Some(candidates[pick].clone())
}

/// Enumerates eligible k-subsets under the given per-project intervals, up to
/// a generous cap; sampling happens among the collected ones.
fn eligible_combinations(
    instance: &Instance,
    state: &VlnsState,
    improvable: &[bool],
    intervals: &[(Slot, Slot)],
    k: usize,
) -> Vec<Vec<ProjectId>> {
    const MAX_CANDIDATES: usize = 10_000;
    let nproj = instance.projects.len();
    let mut out = Vec::new();
    let mut chosen: Vec<ProjectId> = Vec::with_capacity(k);

    fn recurse(
        next: ProjectId,
        nproj: usize,
        k: usize,
        chosen: &mut Vec<ProjectId>,
        improvable: &[bool],
        intervals: &[(Slot, Slot)],
        tried: &[BTreeSet<ProjectId>],
        out: &mut Vec<Vec<ProjectId>>,
    ) {
        if out.len() >= MAX_CANDIDATES {
            return;
        }
        if chosen.len() == k {
            if chosen.iter().any(|&p| improvable[p]) {
                let set: BTreeSet<ProjectId> = chosen.iter().copied().collect();
                if !tried.iter().any(|c| set.is_subset(c)) {
                    out.push(chosen.clone());
                }
            }
            return;
        }
        let needed = k - chosen.len();
        for p in next..nproj {
            if nproj - p < needed {
                break;
            }
            if chosen.iter().any(|&q| !intervals_overlap(intervals[p], intervals[q])) {
                continue;
            }
            chosen.push(p);
            recurse(p + 1, nproj, k, chosen, improvable, intervals, tried, out);
            chosen.pop();
        }
    }

    recurse(0, nproj, k, &mut chosen, improvable, intervals, &state.tried, &mut out);
    out
}

/// Pins every job outside the selected projects to its incumbent assignment
/// and drops the pinned jobs that lie entirely outside the selected projects'
/// merged time window.
///
/// Pinning shrinks a job's window to its current interval and its modes and
/// availabilities to exactly the current assignment, so the only feasible
/// values are the incumbent ones. Any feasible solution of the reduced
/// instance recombines with the untouched remainder into a feasible full
/// solution whose total changes by exactly the selected projects'
/// contribution difference.
pub fn fix_and_reduce(instance: &Instance, incumbent: &Solution, selected: &[ProjectId]) -> Reduced {
    let selected_set: BTreeSet<ProjectId> = selected.iter().copied().collect();
    // Merged window of the selected projects; with nothing selected every job
    // is pinned in place.
    let (win_lo, win_hi) = if selected.is_empty() {
        (1, instance.end_of_horizon())
    } else {
        let mut lo = Slot::MAX;
        let mut hi = 0;
        for &p in selected {
            let (l, h) = window_interval(instance, p);
            lo = lo.min(l);
            hi = hi.max(h);
        }
        (lo, hi)
    };

    let mut keep = vec![false; instance.jobs.len()];
    for (j, job) in instance.jobs.iter().enumerate() {
        if selected_set.contains(&job.project) {
            keep[j] = true;
        } else {
            let a = &incumbent.jobs[j];
            let end = a.end(job).expect("feasible incumbent");
            keep[j] = intervals_overlap((a.start, end), (win_lo, win_hi));
        }
    }

    let mut new_id = vec![usize::MAX; instance.jobs.len()];
    let mut job_map = Vec::new();
    for (j, &kept) in keep.iter().enumerate() {
        if kept {
            new_id[j] = job_map.len();
            job_map.push(j);
        }
    }

    // Projects keep their original order; emptied ones disappear.
    let mut project_id = vec![usize::MAX; instance.projects.len()];
    let mut project_map = Vec::new();
    let mut projects = Vec::new();
    for (p, project) in instance.projects.iter().enumerate() {
        let jobs: Vec<JobId> =
            project.jobs.iter().filter(|&&j| keep[j]).map(|&j| new_id[j]).collect();
        if jobs.is_empty() {
            continue;
        }
        project_id[p] = projects.len();
        project_map.push(p);
        projects.push(Project { name: project.name.clone(), jobs });
    }

    let jobs: Vec<Job> = job_map
        .iter()
        .map(|&old| {
            let source = &instance.jobs[old];
            let mut job = if selected_set.contains(&source.project) {
                source.clone()
            } else {
                pin_job(source, &canonical(incumbent.jobs[old].clone()))
            };
            job.project = project_id[source.project];
            job.predecessors =
                job.predecessors.iter().filter(|&&k| keep[k]).map(|&k| new_id[k]).collect();
            job.linked = job.linked.iter().filter(|&&k| keep[k]).map(|&k| new_id[k]).collect();
            job
        })
        .collect();

    let reduced = Instance {
        id: instance.id.clone(),
        horizon: instance.horizon,
        employees: instance.employees,
        workbenches: instance.workbenches,
        equipment_groups: instance.equipment_groups.clone(),
        mode_names: instance.mode_names.clone(),
        projects,
        jobs,
        names: instance.names.clone(),
    };
    debug_assert!(
        crate::model::validate_instance(&reduced).is_empty(),
        "reduced instance must stay well-formed"
    );
    Reduced { instance: reduced, job_map, project_map, selected: selected.to_vec() }
}

/// A copy of `job` admitting exactly the assignment `a`.
fn pin_job(job: &Job, a: &JobAssignment) -> Job {
    let mut pinned = job.clone();
    let duration = job.duration_in(a.mode).expect("feasible incumbent");
    pinned.alpha = a.start;
    pinned.omega = a.start + duration;
    pinned.modes = vec![JobMode {
        mode: a.mode,
        duration,
        employees_required: a.employees.len() as u32,
    }];
    pinned.qualified = a.employees.clone();
    pinned.preferred = job.preferred.iter().copied().filter(|e| a.employees.contains(e)).collect();
    pinned.workbench_required = a.workbench.is_some();
    pinned.available_workbenches = a.workbench.into_iter().collect();
    pinned.equipment_required = a.devices.iter().map(|d| d.len() as u32).collect();
    pinned.available_devices = a.devices.clone();
    if !job.started {
        pinned.initial = None;
    }
    pinned
}

/// One exact re-optimization of the reduced instance. Returns the engine's
/// best slice when its total does not exceed the current slice total, plus
/// the raw engine outcome for accounting.
///
/// `project_bounds`, when available, supplies the selected projects' lower
/// bounds; pinned projects contribute constants. Both become contribution
/// floors inside the engine, which is what lets most moves prove their slice
/// optimal quickly.
pub fn perform_move(
    reduced: &Reduced,
    incumbent: &Solution,
    hot: bool,
    seed: u64,
    time_limit: f64,
    project_bounds: Option<&[(Penalty, BoundKind)]>,
) -> (Option<Solution>, SolveOutcome) {
    let projected = reduced.project_solution(incumbent);
    let slice_total = evaluator::penalty(&reduced.instance, &projected).total;
    let floors: Vec<Penalty> = reduced
        .project_map
        .iter()
        .enumerate()
        .map(|(rp, &orig)| {
            if reduced.selected.contains(&orig) {
                project_bounds.map(|b| b[orig].0).unwrap_or(0)
            } else {
                // fully pinned projects contribute exactly their current value
                evaluator::project_contribution(&reduced.instance, &projected, rp, Weights::default())
            }
        })
        .collect();
    let config = SearchConfig {
        time_limit,
        seed,
        randomized_resource_order: !hot,
        hot_start: hot.then(|| projected.clone()),
        objective_cutoff: Some(slice_total),
        project_floors: Some(floors),
        ..SearchConfig::default()
    };
    let outcome = solver::solve(&reduced.instance, &config);
    let accepted = outcome
        .best_solution
        .clone()
        .filter(|s| evaluator::penalty(&reduced.instance, s).total <= slice_total);
    (accepted, outcome)
}

/// The k-schedule: back to 1 after an incumbent change at k > 1; on
/// exhaustion grow by one (or, with the jump probability, two); `None` once
/// no size in `1..=|P|` has an eligible combination left.
pub fn adapt_k(
    instance: &Instance,
    state: &mut VlnsState,
    last_move_changed: bool,
    rng: &mut impl Rng,
) -> Option<usize> {
    if state.k > 1 && last_move_changed {
        state.k = 1;
        state.exhausted_at_k = false;
        return Some(1);
    }
    if !state.exhausted_at_k {
        return Some(state.k);
    }
    let nproj = instance.projects.len();
    let bump = if rng.random::<f64>() < state.jump_prob { 2 } else { 1 };
    let grown = state.k + bump;
    if grown <= nproj && has_eligible(instance, state, grown, rng) {
        state.k = grown;
        state.exhausted_at_k = false;
        return Some(grown);
    }
    // Sweep every size before giving up; the jump may have skipped one.
    for k in 1..=nproj {
        if has_eligible(instance, state, k, rng) {
            state.k = k;
            state.exhausted_at_k = false;
            return Some(k);
        }
    }
    None
}

fn has_eligible(instance: &Instance, state: &VlnsState, k: usize, rng: &mut impl Rng) -> bool {
    let probe = VlnsState {
        incumbent: state.incumbent.clone(),
        total: state.total,
        k,
        tried: state.tried.clone(),
        project_bounds: state.project_bounds.clone(),
        exhausted_at_k: false,
        jump_prob: state.jump_prob,
    };
    select_combination(instance, &probe, rng).is_some()
}

/// Runs the full search. `status` is `Optimal` when the incumbent meets the
/// sum of project lower bounds or a whole-instance move proves it, `Feasible`
/// on exhaustion or timeout with an incumbent, and `Unknown` when no initial
/// solution was found.
pub fn run(instance: &Instance, config: &VlnsConfig) -> SolveOutcome {
    run_traced(instance, config).0
}

/// Like [`run`], also returning every incumbent in order (starting with the
/// initial solution).
pub fn run_traced(instance: &Instance, config: &VlnsConfig) -> (SolveOutcome, Vec<(Penalty, Solution)>) {
    let started = Instant::now();
    let deadline = started + Duration::from_secs_f64(config.total_time_limit);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // The initial solution and the per-project lower bounds run concurrently.
    let initial_config = SearchConfig {
        time_limit: config.initial_time_limit.min(config.total_time_limit),
        seed: config.seed,
        first_solution_only: true,
        ..SearchConfig::default()
    };
    let lb_limit = config.lb_time_limit.min(config.total_time_limit);
    let (initial, project_bounds) = std::thread::scope(|scope| {
        let bounds_task = scope.spawn(|| bounds::all_project_bounds(instance, lb_limit));
        let initial = solver::solve(instance, &initial_config);
        (initial, bounds_task.join().expect("bounds worker"))
    });

    let mut nodes = initial.nodes;
    let Some(incumbent) = initial.best_solution else {
        let outcome = SolveOutcome {
            status: SolveStatus::Unknown,
            best_solution: None,
            best_penalty: None,
            nodes,
            moves: 0,
            wall_secs: started.elapsed().as_secs_f64(),
        };
        return (outcome, Vec::new());
    };
    let mut breakdown = initial.best_penalty.expect("solution has penalty");

    let mut state = VlnsState {
        incumbent,
        total: breakdown.total,
        k: 1,
        tried: Vec::new(),
        project_bounds,
        exhausted_at_k: false,
        jump_prob: config.jump_prob,
    };
    let mut trace = vec![(state.total, state.incumbent.clone())];
    let mut moves: u64 = 0;
    let mut proven_optimal = state.total == state.bound_sum();

    while !proven_optimal && Instant::now() < deadline {
        let Some(selected) = select_combination(instance, &state, &mut rng) else {
            state.exhausted_at_k = true;
            if adapt_k(instance, &mut state, false, &mut rng).is_none() {
                break;
            }
            continue;
        };

        let reduced = fix_and_reduce(instance, &state.incumbent, &selected);
        let hot = rng.random::<f64>() < config.hot_start_prob;
        let move_seed = rng.random::<u64>();
        let remaining = deadline.saturating_duration_since(Instant::now()).as_secs_f64();
        if remaining <= 0.0 {
            break;
        }
        let (slice, engine_outcome) = perform_move(
            &reduced,
            &state.incumbent,
            hot,
            move_seed,
            config.move_time_limit.min(remaining.max(0.1)),
            Some(&state.project_bounds),
        );
        moves += 1;
        nodes += engine_outcome.nodes;

        let mut changed = false;
        if let Some(slice) = &slice {
            let changed_jobs = reduced.changed_jobs(&state.incumbent, slice);
            if !changed_jobs.is_empty() {
                changed = true;
                let new_incumbent = reduced.recombine(&state.incumbent, slice);
                debug_assert!(
                    evaluator::check_hard(instance, &new_incumbent)
                        .map(|r| r.is_feasible())
                        .unwrap_or(false),
                    "recombined incumbent must stay feasible"
                );
                let new_breakdown = evaluator::penalty_delta(
                    instance,
                    &state.incumbent,
                    &breakdown,
                    &new_incumbent,
                    &changed_jobs,
                );
                debug_assert_eq!(new_breakdown, evaluator::penalty(instance, &new_incumbent));
                assert!(new_breakdown.total <= state.total, "accepted moves never worsen");
                // Changes free up every recorded combination they touch.
                let touched: Vec<(Slot, Slot)> = changed_jobs
                    .iter()
                    .flat_map(|&j| {
                        let old = &state.incumbent.jobs[j];
                        let new = &new_incumbent.jobs[j];
                        let job = &instance.jobs[j];
                        [
                            (old.start, old.end(job).expect("feasible")),
                            (new.start, new.end(job).expect("feasible")),
                        ]
                    })
                    .collect();
                state.incumbent = new_incumbent;
                state.total = new_breakdown.total;
                breakdown = new_breakdown;
                state.tried.retain(|combo| {
                    !combo.iter().any(|&p| {
                        let hull = schedule_interval(instance, &state.incumbent, p);
                        touched.iter().any(|&t| intervals_overlap(t, hull))
                    })
                });
                trace.push((state.total, state.incumbent.clone()));
            }
        }
        state.tried.push(selected.iter().copied().collect());

        // A whole-instance move solved to optimality is a global proof.
        if selected.len() == instance.projects.len() && engine_outcome.status == SolveStatus::Optimal {
            proven_optimal = true;
        }
        if state.total == state.bound_sum() {
            proven_optimal = true;
        }
        if !proven_optimal && adapt_k(instance, &mut state, changed, &mut rng).is_none() {
            break;
        }
    }

    let status = if proven_optimal { SolveStatus::Optimal } else { SolveStatus::Feasible };
    let outcome = SolveOutcome {
        status,
        best_solution: Some(state.incumbent.clone()),
        best_penalty: Some(breakdown),
        nodes,
        moves,
        wall_secs: started.elapsed().as_secs_f64(),
    };
    (outcome, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{corpus, oracle};

    fn quick_config(seed: u64) -> VlnsConfig {
        VlnsConfig {
            move_time_limit: 10.0,
            lb_time_limit: 10.0,
            initial_time_limit: 10.0,
            total_time_limit: 60.0,
            seed,
            ..VlnsConfig::default()
        }
    }

    fn state_for(instance: &Instance, incumbent: Solution) -> VlnsState {
        let total = evaluator::penalty(instance, &incumbent).total;
        VlnsState {
            incumbent,
            total,
            k: 1,
            tried: Vec::new(),
            project_bounds: bounds::all_project_bounds(instance, 10.0),
            exhausted_at_k: false,
            jump_prob: 0.35,
        }
    }

    fn two_project_suboptimal() -> (Instance, Solution) {
        let inst = corpus::two_projects();
        // Feasible but wasteful: both jobs on non-preferred employees.
        let sol = Solution::new(vec![
            JobAssignment { mode: 0, start: 1, employees: vec![1], workbench: Some(0), devices: vec![] },
            JobAssignment { mode: 0, start: 3, employees: vec![0], workbench: Some(0), devices: vec![] },
        ]);
        assert!(evaluator::check_hard(&inst, &sol).unwrap().is_feasible());
        (inst, sol)
    }

    #[test]
    fn reaches_oracle_optimum_on_tiny_chain() {
        let inst = corpus::tiny_chain();
        let expected = oracle::enumerate_optimal(&inst, 1_000_000).unwrap().unwrap().1.total;
        let (outcome, trace) = run_traced(&inst, &quick_config(7));
        assert_eq!(outcome.status, SolveStatus::Optimal);
        assert_eq!(outcome.best_penalty.unwrap().total, expected);
        assert!(trace.windows(2).all(|w| w[1].0 <= w[0].0), "incumbents never worsen");
        for (_, s) in &trace {
            assert!(evaluator::check_hard(&inst, s).unwrap().is_feasible());
        }
    }

    #[test]
    fn single_improvable_project_is_the_only_candidate() {
        let (inst, mut sol) = two_project_suboptimal();
        // Put project 1 at its bound (preferred employee), leaving project 0
        // above its bound.
        sol.jobs[1].employees = vec![1];
        let state = state_for(&inst, sol);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let selected = select_combination(&inst, &state, &mut rng).expect("candidate");
            assert_eq!(selected, vec![0]);
        }
    }

    #[test]
    fn all_projects_at_their_bounds_leaves_nothing_to_select() {
        let inst = corpus::two_projects();
        let optimal = oracle::enumerate_optimal(&inst, 1_000_000).unwrap().unwrap().0;
        let state = state_for(&inst, optimal);
        assert_eq!(state.total, state.bound_sum());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(select_combination(&inst, &state, &mut rng).is_none());
    }

    #[test]
    fn window_fallback_pairs_disjoint_schedules() {
        // Two projects scheduled apart but with overlapping windows; no
        // schedule-overlapping pair exists, so the pair comes from windows.
        let (inst, sol) = two_project_suboptimal();
        let mut state = state_for(&inst, sol);
        state.k = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let selected = select_combination(&inst, &state, &mut rng).expect("window fallback");
        assert_eq!(selected, vec![0, 1]);
    }

    #[test]
    fn tried_combinations_and_their_subsets_are_skipped() {
        let (inst, sol) = two_project_suboptimal();
        let mut state = state_for(&inst, sol);
        state.k = 1;
        state.tried.push([0usize, 1usize].into_iter().collect());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // {0} and {1} are subsets of the recorded {0, 1}
        assert!(select_combination(&inst, &state, &mut rng).is_none());
    }

    #[test]
    fn selecting_every_project_reduces_to_the_original() {
        let (inst, sol) = two_project_suboptimal();
        let reduced = fix_and_reduce(&inst, &sol, &[0, 1]);
        assert_eq!(reduced.instance, inst);
        assert_eq!(reduced.job_map, vec![0, 1]);
    }

    #[test]
    fn selecting_nothing_pins_every_job() {
        let (inst, sol) = two_project_suboptimal();
        let reduced = fix_and_reduce(&inst, &sol, &[]);
        assert_eq!(reduced.instance.jobs.len(), 2);
        for job in &reduced.instance.jobs {
            assert_eq!(job.modes.len(), 1);
            assert_eq!(job.omega, job.alpha + job.modes[0].duration);
            assert_eq!(job.qualified.len(), job.modes[0].employees_required as usize);
        }
        // the incumbent assignment is the unique feasible solution
        let projected = reduced.project_solution(&sol);
        assert!(evaluator::check_hard(&reduced.instance, &projected).unwrap().is_feasible());
        let (only, _) = oracle::enumerate_optimal(&reduced.instance, 1_000_000).unwrap().expect("pinned");
        assert_eq!(only, projected);
    }

    #[test]
    fn out_of_window_jobs_are_removed_and_recombination_holds() {
        // Three projects: select the first one; the far-away project's job
        // is cut, the overlapping one is pinned.
        let mut inst = corpus::two_projects();
        inst.id = "T3P".to_string();
        inst.horizon = 30;
        inst.projects.push(Project { name: "P2".to_string(), jobs: vec![2] });
        inst.jobs.push(inst.jobs[0].clone());
        inst.jobs[2].project = 2;
        inst.jobs[2].alpha = 20;
        inst.jobs[2].omega = 31;
        inst.jobs[2].omega_bar = 31;
        assert!(crate::model::validate_instance(&inst).is_empty());
        let sol = Solution::new(vec![
            JobAssignment { mode: 0, start: 1, employees: vec![1], workbench: Some(0), devices: vec![] },
            JobAssignment { mode: 0, start: 3, employees: vec![0], workbench: Some(0), devices: vec![] },
            JobAssignment { mode: 0, start: 20, employees: vec![0], workbench: Some(0), devices: vec![] },
        ]);
        assert!(evaluator::check_hard(&inst, &sol).unwrap().is_feasible());

        let reduced = fix_and_reduce(&inst, &sol, &[0]);
        assert_eq!(reduced.job_map, vec![0, 1]); // job 2 removed
        let total_before = evaluator::penalty(&inst, &sol).total;
        let old_contribution = evaluator::project_contribution(&inst, &sol, 0, Weights::default());

        // re-optimize the slice: job 0 should move to the preferred employee
        let (slice, _) = perform_move(&reduced, &sol, true, 1, 10.0, None);
        let slice = slice.expect("improving move");
        let recombined = reduced.recombine(&sol, &slice);
        assert!(evaluator::check_hard(&inst, &recombined).unwrap().is_feasible());
        let new_contribution =
            evaluator::project_contribution(&inst, &recombined, 0, Weights::default());
        let total_after = evaluator::penalty(&inst, &recombined).total;
        assert_eq!(total_after, total_before - old_contribution + new_contribution);
        assert!(total_after < total_before);
    }

    #[test]
    fn hot_started_move_on_an_optimal_slice_changes_nothing() {
        let inst = corpus::tiny_chain();
        let optimal = oracle::enumerate_optimal(&inst, 1_000_000).unwrap().unwrap().0;
        let reduced = fix_and_reduce(&inst, &optimal, &[0]);
        let (slice, outcome) = perform_move(&reduced, &optimal, true, 5, 10.0, None);
        match slice {
            Some(s) => assert_eq!(reduced.changed_jobs(&optimal, &s), Vec::<JobId>::new()),
            None => assert!(matches!(outcome.status, SolveStatus::Infeasible | SolveStatus::Optimal)),
        }
    }

    #[test]
    fn k_rules_follow_the_schedule() {
        let (inst, sol) = two_project_suboptimal();
        let mut rng = ChaCha8Rng::seed_from_u64(9);

        let mut state = state_for(&inst, sol.clone());
        state.k = 3;
        assert_eq!(adapt_k(&inst, &mut state, true, &mut rng), Some(1));

        state.k = 1;
        assert_eq!(adapt_k(&inst, &mut state, true, &mut rng), Some(1));

        // exhausted at k=1 with eligible pairs remaining: k grows to 2
        state.k = 1;
        state.exhausted_at_k = true;
        state.jump_prob = 0.0;
        let grown = adapt_k(&inst, &mut state, false, &mut rng).expect("still eligible sizes");
        assert_eq!(grown, 2);

        // with everything tried, adapt_k terminates
        state.tried = vec![[0usize, 1usize].into_iter().collect()];
        state.exhausted_at_k = true;
        assert_eq!(adapt_k(&inst, &mut state, false, &mut rng), None);
    }

    #[test]
    fn jump_skips_to_k_plus_two_when_eligible() {
        // four single-job projects all overlapping in schedule
        let mut inst = corpus::two_projects();
        inst.id = "T4P".to_string();
        inst.employees = 4;
        inst.workbenches = 4;
        inst.horizon = 12;
        for p in 2..4 {
            inst.projects.push(Project { name: format!("P{}", p), jobs: vec![p] });
            let mut job = inst.jobs[0].clone();
            job.project = p;
            inst.jobs.push(job);
        }
        for (j, job) in inst.jobs.iter_mut().enumerate() {
            job.omega = 13;
            job.omega_bar = 13;
            job.qualified = vec![0, 1, 2, 3];
            job.preferred = vec![0];
            job.available_workbenches = vec![j];
        }
        assert!(crate::model::validate_instance(&inst).is_empty());
        // all four jobs run in parallel on distinct benches and employees
        let sol = Solution::new(
            (0..4)
                .map(|j| JobAssignment {
                    mode: 0,
                    start: 1,
                    employees: vec![j],
                    workbench: Some(j),
                    devices: vec![],
                })
                .collect(),
        );
        assert!(evaluator::check_hard(&inst, &sol).unwrap().is_feasible());
        let mut state = state_for(&inst, sol);
        state.k = 2;
        state.exhausted_at_k = true;
        state.jump_prob = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(adapt_k(&inst, &mut state, false, &mut rng), Some(4));
    }

    #[test]
    fn cold_moves_never_worsen_the_slice() {
        let mut inst = corpus::two_projects();
        inst.jobs[0].preferred = vec![];
        inst.jobs[1].preferred = vec![];
        let sol = Solution::new(vec![
            JobAssignment { mode: 0, start: 1, employees: vec![0], workbench: Some(0), devices: vec![] },
            JobAssignment { mode: 0, start: 3, employees: vec![0], workbench: Some(0), devices: vec![] },
        ]);
        let total = evaluator::penalty(&inst, &sol).total;
        let reduced = fix_and_reduce(&inst, &sol, &[0]);
        for seed in 0..20 {
            let (slice, _) = perform_move(&reduced, &sol, false, seed, 10.0, None);
            if let Some(slice) = slice {
                let recombined = reduced.recombine(&sol, &slice);
                assert!(evaluator::penalty(&inst, &recombined).total <= total);
            }
        }
    }

    #[test]
    fn always_hot_runs_only_apply_strict_improvements() {
        let (inst, _) = two_project_suboptimal();
        let config = VlnsConfig { hot_start_prob: 1.0, ..quick_config(5) };
        let (_, trace) = run_traced(&inst, &config);
        // hot-started engines return either the unchanged hot solution or a
        // strictly better one, so every recorded incumbent strictly improves
        assert!(trace.windows(2).all(|w| w[1].0 < w[0].0), "{:?}", trace.iter().map(|t| t.0).collect::<Vec<_>>());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let (inst, _) = two_project_suboptimal();
        let a = run(&inst, &quick_config(11));
        let b = run(&inst, &quick_config(11));
        assert_eq!(a.status, b.status);
        assert_eq!(a.best_solution, b.best_solution);
        assert_eq!(a.moves, b.moves);
        assert_eq!(a.nodes, b.nodes);
    }

    #[test]
    fn optimality_is_reported_via_bounds_on_tiny_instances() {
        let inst = corpus::tiny_chain();
        let outcome = run(&inst, &quick_config(3));
        assert_eq!(outcome.status, SolveStatus::Optimal);
        assert_eq!(outcome.best_penalty.unwrap().total, 7);
    }
}
