//! Simulated annealing baseline.
//!
//! Random feasibility-preserving moves (start shifts, mode changes, resource
//! swaps) under Metropolis acceptance: improvements always pass, a worsening
//! of delta survives with probability `exp(-delta / T)`, and the temperature
//! decays geometrically every fixed number of proposals. Only feasible
//! solutions are ever visited; candidates that cannot be repaired are
//! rejected at generation time. Started jobs never move, and linked jobs
//! exchange employees as one unit.

use crate::evaluator;
use crate::model::*;
use crate::solver::{self, SearchConfig, SolveOutcome, SolveStatus};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

/// Relative frequencies of the three move kinds.
#[derive(Debug, Clone, Copy)]
pub struct MoveWeights {
    pub shift_start: u32,
    pub change_mode: u32,
    pub swap_resource: u32,
}

impl Default for MoveWeights {
    fn default() -> Self {
        MoveWeights { shift_start: 4, change_mode: 3, swap_resource: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct SaConfig {
    pub initial_temperature: f64,
    /// Geometric decay factor, strictly between 0 and 1.
    pub cooling_rate: f64,
    /// Proposals per temperature step.
    pub moves_per_temperature: u32,
    /// The run stops once the temperature falls below this floor.
    pub min_temperature: f64,
    /// Wall-clock budget in seconds.
    pub time_limit: f64,
    /// Optional deterministic proposal budget.
    pub max_proposals: Option<u64>,
    /// Seconds for the initial feasibility solve.
    pub initial_time_limit: f64,
    pub seed: u64,
    pub move_weights: MoveWeights,
}

impl Default for SaConfig {
    // Frozen from a small grid search over the generated benchmark sizes:
    // slower cooling mostly wastes proposals at desk scale, faster cooling
    // loses the T1 optimum on unlucky seeds.
    fn default() -> Self {
        SaConfig {
            initial_temperature: 5.0,
            cooling_rate: 0.97,
            moves_per_temperature: 400,
            min_temperature: 1e-3,
            time_limit: 7200.0,
            max_proposals: None,
            initial_time_limit: 60.0,
            seed: 0,
            move_weights: MoveWeights::default(),
        }
    }
}

/// Metropolis rule: accept when `delta <= 0`, otherwise with probability
/// `exp(-delta / temperature)`.
pub fn accept(delta: i64, temperature: f64, rng: &mut impl Rng) -> bool {
    if delta <= 0 {
        return true;
    }
    if temperature <= 0.0 {
        return false;
    }
    rng.random::<f64>() < (-(delta as f64) / temperature).exp()
}

/// Runs the annealer and reports the best feasible solution seen.
pub fn run(instance: &Instance, config: &SaConfig) -> SolveOutcome {
    assert!(config.cooling_rate > 0.0 && config.cooling_rate < 1.0, "cooling rate in (0,1)");
    assert!(config.initial_temperature > 0.0, "initial temperature must be positive");
    assert!(config.moves_per_temperature > 0, "moves per temperature must be positive");

    let started = Instant::now();
    let deadline = started + Duration::from_secs_f64(config.time_limit);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let initial_config = SearchConfig {
        time_limit: config.initial_time_limit.min(config.time_limit),
        seed: config.seed,
        first_solution_only: true,
        ..SearchConfig::default()
    };
    let initial = solver::solve(instance, &initial_config);
    let Some(first) = initial.best_solution else {
        return SolveOutcome {
            status: SolveStatus::Unknown,
            best_solution: None,
            best_penalty: None,
            nodes: initial.nodes,
            moves: 0,
            wall_secs: started.elapsed().as_secs_f64(),
        };
    };

    let mut engine = MoveEngine::new(instance, &first).with_weights(config.move_weights);
    let mut current = first;
    let mut current_total = initial.best_penalty.expect("penalty present").total;
    let mut best = current.clone();
    let mut best_breakdown = initial.best_penalty.expect("penalty present");

    let mut temperature = config.initial_temperature;
    let mut proposals: u64 = 0;

    loop {
        if temperature < config.min_temperature {
            break;
        }
        if let Some(max) = config.max_proposals {
            if proposals >= max {
                break;
            }
        }
        // checking the clock every proposal would dominate small moves
        if proposals % 64 == 0 && Instant::now() >= deadline {
            break;
        }

        if let Some((candidate, changed)) = engine.propose(&current, &mut rng) {
            debug_assert!(
                evaluator::check_hard(instance, &candidate).map(|r| r.is_feasible()).unwrap_or(false),
                "proposals must stay feasible"
            );
            let candidate_total = evaluator::penalty(instance, &candidate).total;
            let delta = candidate_total as i64 - current_total as i64;
            if accept(delta, temperature, &mut rng) {
                engine.apply(&current, &candidate, &changed);
                current = candidate;
                current_total = candidate_total;
                if current_total < best_breakdown.total {
                    best = current.clone();
                    best_breakdown = evaluator::penalty(instance, &best);
                }
            }
        }
        proposals += 1;
        if proposals % config.moves_per_temperature as u64 == 0 {
            temperature *= config.cooling_rate;
        }
    }

    SolveOutcome {
        status: SolveStatus::Feasible,
        best_solution: Some(best),
        best_penalty: Some(best_breakdown),
        nodes: initial.nodes,
        moves: proposals,
        wall_secs: started.elapsed().as_secs_f64(),
    }
}

/// One random feasibility-preserving candidate, or the unchanged input when
/// no feasible candidate turns up within a bounded number of attempts.
pub fn propose_move(instance: &Instance, solution: &Solution, rng: &mut impl Rng) -> Solution {
    let mut engine = MoveEngine::new(instance, solution);
    match engine.propose(solution, rng) {
        Some((candidate, _)) => candidate,
        None => solution.clone(),
    }
}

const ATTEMPTS_PER_PROPOSAL: u32 = 40;

/// Generates candidates against a unit-occupancy index kept in sync with the
/// current solution.
struct MoveEngine<'a> {
    inst: &'a Instance,
    classes: Vec<Vec<JobId>>,
    weights: MoveWeights,
    /// Committed intervals per unit id, sorted by start.
    occ: Vec<Vec<(Slot, Slot, JobId)>>,
    wb_base: usize,
    group_base: Vec<usize>,
}

impl<'a> MoveEngine<'a> {
    fn new(inst: &'a Instance, solution: &Solution) -> Self {
        let wb_base = inst.employees;
        let mut group_base = Vec::with_capacity(inst.equipment_groups.len());
        let mut next = wb_base + inst.workbenches;
        for &size in &inst.equipment_groups {
            group_base.push(next);
            next += size;
        }
        let mut engine = MoveEngine {
            inst,
            classes: crate::model::link_classes(inst),
            weights: MoveWeights::default(),
            occ: vec![Vec::new(); next],
            wb_base,
            group_base,
        };
        for (j, a) in solution.jobs.iter().enumerate() {
            engine.insert(j, a);
        }
        engine
    }

    fn with_weights(mut self, weights: MoveWeights) -> Self {
        self.weights = weights;
        self
    }

    fn units_of(&self, a: &JobAssignment) -> Vec<usize> {
        let mut units: Vec<usize> = a.employees.clone();
        if let Some(b) = a.workbench {
            units.push(self.wb_base + b);
        }
        for (g, devices) in a.devices.iter().enumerate() {
            units.extend(devices.iter().map(|&d| self.group_base[g] + d));
        }
        units
    }

    fn insert(&mut self, j: JobId, a: &JobAssignment) {
        let end = a.end(&self.inst.jobs[j]).expect("available mode");
        for unit in self.units_of(a) {
            let list = &mut self.occ[unit];
            let pos = list.partition_point(|&(s, _, _)| s < a.start);
            list.insert(pos, (a.start, end, j));
        }
    }

    fn remove(&mut self, j: JobId, a: &JobAssignment) {
        for unit in self.units_of(a) {
            let list = &mut self.occ[unit];
            let pos = list.iter().position(|&(_, _, owner)| owner == j).expect("interval present");
            list.remove(pos);
        }
    }

    /// Syncs the index after `changed` jobs moved from `old` to `new`.
    fn apply(&mut self, old: &Solution, new: &Solution, changed: &[JobId]) {
        for &j in changed {
            self.remove(j, &old.jobs[j]);
            self.insert(j, &new.jobs[j]);
        }
    }

    /// Whether `[start, end)` is free on `unit`, ignoring intervals owned by
    /// `exclude`.
    fn free(&self, unit: usize, start: Slot, end: Slot, exclude: &[JobId]) -> bool {
        for &(s, e, owner) in &self.occ[unit] {
            if s >= end {
                break;
            }
            if e > start && !exclude.contains(&owner) {
                return false;
            }
        }
        true
    }

    fn propose(&mut self, current: &Solution, rng: &mut impl Rng) -> Option<(Solution, Vec<JobId>)> {
        let total_weight =
            self.weights.shift_start + self.weights.change_mode + self.weights.swap_resource;
        if total_weight == 0 {
            return None;
        }
        for _ in 0..ATTEMPTS_PER_PROPOSAL {
            let roll = rng.random_range(0..total_weight);
            let result = if roll < self.weights.shift_start {
                self.shift_start(current, rng)
            } else if roll < self.weights.shift_start + self.weights.change_mode {
                self.change_mode(current, rng)
            } else {
                self.swap_resource(current, rng)
            };
            if result.is_some() {
                return result;
            }
        }
        None
    }

    fn movable_job(&self, rng: &mut impl Rng) -> Option<JobId> {
        let candidates: Vec<JobId> =
            (0..self.inst.jobs.len()).filter(|&j| !self.inst.jobs[j].started).collect();
        if candidates.is_empty() {
            return None;
        }
        Some(candidates[rng.random_range(0..candidates.len())])
    }

    /// Precedence feasibility of moving `j` to `[start, end)`.
    fn precedence_ok(&self, current: &Solution, j: JobId, start: Slot, end: Slot) -> bool {
        let job = &self.inst.jobs[j];
        for &k in &job.predecessors {
            let pred_end = current.jobs[k].end(&self.inst.jobs[k]).expect("available mode");
            if pred_end > start {
                return false;
            }
        }
        for (k, other) in self.inst.jobs.iter().enumerate() {
            if other.predecessors.contains(&j) && end > current.jobs[k].start {
                return false;
            }
        }
        true
    }

    fn shift_start(&self, current: &Solution, rng: &mut impl Rng) -> Option<(Solution, Vec<JobId>)> {
        let j = self.movable_job(rng)?;
        let job = &self.inst.jobs[j];
        let a = &current.jobs[j];
        let duration = job.duration_in(a.mode).expect("available mode");
        let latest = job.omega.checked_sub(duration)?;
        if latest <= job.alpha {
            return None; // one-slot window
        }
        let start = rng.random_range(job.alpha..=latest);
        if start == a.start {
            return None;
        }
        let end = start + duration;
        if !self.precedence_ok(current, j, start, end) {
            return None;
        }
        for unit in self.units_of(a) {
            if !self.free(unit, start, end, &[j]) {
                return None;
            }
        }
        let mut candidate = current.clone();
        candidate.jobs[j].start = start;
        Some((candidate, vec![j]))
    }

    fn change_mode(&self, current: &Solution, rng: &mut impl Rng) -> Option<(Solution, Vec<JobId>)> {
        let j = self.movable_job(rng)?;
        let job = &self.inst.jobs[j];
        if job.modes.len() < 2 {
            return None;
        }
        let a = &current.jobs[j];
        let alternatives: Vec<&JobMode> = job.modes.iter().filter(|m| m.mode != a.mode).collect();
        let mode = alternatives[rng.random_range(0..alternatives.len())];
        let class = &self.classes[j];
        let old_req = a.employees.len() as u32;
        if class.len() > 1 && mode.employees_required != old_req {
            // linked jobs must keep identical employee sets, which forces
            // equal requirement counts across the class
            return None;
        }
        let start = a.start;
        let end = start + mode.duration;
        if end > job.omega || !self.precedence_ok(current, j, start, end) {
            return None;
        }

        let mut employees = a.employees.clone();
        match mode.employees_required.cmp(&old_req) {
            std::cmp::Ordering::Equal => {}
            std::cmp::Ordering::Less => {
                // drop non-preferred employees first
                employees.sort_by_key(|e| (job.preferred.contains(e), *e));
                employees.truncate(mode.employees_required as usize);
                employees.sort_unstable();
            }
            std::cmp::Ordering::Greater => {
                let mut pool: Vec<EmployeeId> = job
                    .qualified
                    .iter()
                    .copied()
                    .filter(|e| !employees.contains(e))
                    .filter(|&e| self.free(e, start, end, &[j]))
                    .collect();
                // preferred employees first, then by id
                pool.sort_by_key(|e| (!job.preferred.contains(e), *e));
                while (employees.len() as u32) < mode.employees_required {
                    if pool.is_empty() {
                        return None;
                    }
                    employees.push(pool.remove(0));
                }
                employees.sort_unstable();
            }
        }

        // every retained unit must fit the new interval
        let probe = JobAssignment {
            mode: mode.mode,
            start,
            employees: employees.clone(),
            workbench: a.workbench,
            devices: a.devices.clone(),
        };
        for unit in self.units_of(&probe) {
            if !self.free(unit, start, end, &[j]) {
                return None;
            }
        }
        let mut candidate = current.clone();
        candidate.jobs[j] = probe;
        Some((candidate, vec![j]))
    }

    fn swap_resource(&self, current: &Solution, rng: &mut impl Rng) -> Option<(Solution, Vec<JobId>)> {
        let j = self.movable_job(rng)?;
        let job = &self.inst.jobs[j];
        let a = &current.jobs[j];
        // choose among the kinds that have something to swap
        let mut kinds = Vec::new();
        if !a.employees.is_empty() {
            kinds.push(0);
        }
        if a.workbench.is_some() && job.available_workbenches.len() > 1 {
            kinds.push(1);
        }
        if a.devices.iter().any(|d| !d.is_empty()) {
            kinds.push(2);
        }
        if kinds.is_empty() {
            return None;
        }
        match kinds[rng.random_range(0..kinds.len())] {
            0 => self.swap_employee(current, j, rng),
            1 => {
                let end = a.end(job).expect("available mode");
                let options: Vec<WorkbenchId> = job
                    .available_workbenches
                    .iter()
                    .copied()
                    .filter(|&b| Some(b) != a.workbench)
                    .filter(|&b| self.free(self.wb_base + b, a.start, end, &[j]))
                    .collect();
                if options.is_empty() {
                    return None;
                }
                let replacement = options[rng.random_range(0..options.len())];
                let mut candidate = current.clone();
                candidate.jobs[j].workbench = Some(replacement);
                Some((candidate, vec![j]))
            }
            _ => {
                let groups: Vec<GroupId> =
                    (0..a.devices.len()).filter(|&g| !a.devices[g].is_empty()).collect();
                let g = groups[rng.random_range(0..groups.len())];
                let out_idx = rng.random_range(0..a.devices[g].len());
                let end = a.end(job).expect("available mode");
                let options: Vec<DeviceId> = job.available_devices[g]
                    .iter()
                    .copied()
                    .filter(|d| !a.devices[g].contains(d))
                    .filter(|&d| self.free(self.group_base[g] + d, a.start, end, &[j]))
                    .collect();
                if options.is_empty() {
                    return None;
                }
                let replacement = options[rng.random_range(0..options.len())];
                let mut candidate = current.clone();
                candidate.jobs[j].devices[g][out_idx] = replacement;
                candidate.jobs[j].devices[g].sort_unstable();
                Some((candidate, vec![j]))
            }
        }
    }

    /// Replaces one employee; the whole link class moves together so the
    /// identical-assignment constraint keeps holding.
    fn swap_employee(&self, current: &Solution, j: JobId, rng: &mut impl Rng) -> Option<(Solution, Vec<JobId>)> {
        let class = &self.classes[j];
        if class.iter().any(|&k| self.inst.jobs[k].started) {
            return None;
        }
        let a = &current.jobs[j];
        let out_idx = rng.random_range(0..a.employees.len());
        let out = a.employees[out_idx];
        let options: Vec<EmployeeId> = self.inst.jobs[j]
            .qualified
            .iter()
            .copied()
            .filter(|e| !a.employees.contains(e))
            .filter(|&e| {
                class.iter().all(|&k| {
                    let job_k = &self.inst.jobs[k];
                    let ak = &current.jobs[k];
                    let end_k = ak.end(job_k).expect("available mode");
                    job_k.qualified.contains(&e) && self.free(e, ak.start, end_k, class)
                })
            })
            .collect();
        if options.is_empty() {
            return None;
        }
        let replacement = options[rng.random_range(0..options.len())];
        let mut candidate = current.clone();
        for &k in class {
            let employees = &mut candidate.jobs[k].employees;
            let pos = employees.iter().position(|&e| e == out).expect("identical class sets");
            employees[pos] = replacement;
            employees.sort_unstable();
        }
        Some((candidate, class.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{corpus, oracle};

    fn budgeted(seed: u64) -> SaConfig {
        SaConfig {
            time_limit: 60.0,
            initial_time_limit: 10.0,
            max_proposals: Some(30_000),
            seed,
            ..SaConfig::default()
        }
    }

    #[test]
    fn zero_delta_is_always_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            assert!(accept(0, 3.0, &mut rng));
            assert!(accept(-5, 0.001, &mut rng));
        }
    }

    #[test]
    fn worsening_acceptance_matches_the_metropolis_rate() {
        // delta 3 at temperature 3: e^-1, checked within +/- 0.01
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 100_000;
        let accepted = (0..trials).filter(|_| accept(3, 3.0, &mut rng)).count();
        let rate = accepted as f64 / trials as f64;
        let expected = (-1.0f64).exp();
        assert!((rate - expected).abs() < 0.01, "rate {} vs {}", rate, expected);
    }

    #[test]
    fn proposals_preserve_feasibility() {
        // ten thousand proposals across the corpus, every one hard-feasible
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for inst in [corpus::tiny_chain(), corpus::tiny_triple(), corpus::two_projects()] {
            let (start, _) = oracle::enumerate_optimal(&inst, 1_000_000).unwrap().unwrap();
            let mut current = start;
            for _ in 0..3500 {
                let candidate = propose_move(&inst, &current, &mut rng);
                let report = evaluator::check_hard(&inst, &candidate).unwrap();
                assert!(report.is_feasible(), "{}", report);
                current = candidate;
            }
        }
    }

    #[test]
    fn twenty_seeded_runs_reach_the_tiny_chain_optimum() {
        // regression threshold: at least 19 of 20 seeds find the optimum
        let inst = corpus::tiny_chain();
        let hits = (0..20u64)
            .filter(|&seed| run(&inst, &budgeted(seed)).best_penalty.unwrap().total == 7)
            .count();
        assert!(hits >= 19, "only {}/20 seeds reached the optimum", hits);
    }

    #[test]
    fn one_slot_window_returns_the_input_unchanged() {
        let mut inst = corpus::single_job(2);
        inst.jobs[0].omega = inst.jobs[0].alpha + 2; // exactly one start
        let sol = Solution::new(vec![JobAssignment {
            mode: 0,
            start: 1,
            employees: vec![0],
            workbench: None,
            devices: vec![],
        }]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let candidate = propose_move(&inst, &sol, &mut rng);
            assert_eq!(candidate.jobs[0].start, sol.jobs[0].start);
        }
    }

    #[test]
    fn zero_employee_mode_empties_the_assignment() {
        let mut inst = corpus::single_job(4);
        inst.jobs[0].modes.push(JobMode { mode: 1, duration: 4, employees_required: 0 });
        inst.mode_names.push("external".to_string());
        let sol = Solution::new(vec![JobAssignment {
            mode: 0,
            start: 1,
            employees: vec![0],
            workbench: None,
            devices: vec![],
        }]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let candidate = propose_move(&inst, &sol, &mut rng);
            if candidate.jobs[0].mode == 1 {
                assert!(candidate.jobs[0].employees.is_empty());
                return;
            }
        }
        panic!("mode change to the external mode never proposed");
    }

    #[test]
    fn started_jobs_never_move() {
        let mut inst = corpus::two_projects();
        inst.jobs[0].started = true;
        inst.jobs[0].initial = Some(InitialAssignment {
            mode: Some(0),
            start: Some(1),
            employees: Some(vec![0]),
            workbench: Some(0),
            devices: Some(vec![]),
        });
        let sol = Solution::new(vec![
            JobAssignment { mode: 0, start: 1, employees: vec![0], workbench: Some(0), devices: vec![] },
            JobAssignment { mode: 0, start: 3, employees: vec![1], workbench: Some(0), devices: vec![] },
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut current = sol.clone();
        for _ in 0..1000 {
            current = propose_move(&inst, &current, &mut rng);
            assert_eq!(current.jobs[0], sol.jobs[0]);
        }
    }

    #[test]
    fn linked_jobs_keep_identical_employee_sets() {
        let mut inst = corpus::tiny_triple();
        inst.jobs[0].linked = vec![1];
        inst.jobs[1].linked = vec![0];
        let inst = crate::model::normalize_links(&inst).unwrap();
        let sol = Solution::new(vec![
            JobAssignment { mode: 0, start: 1, employees: vec![0], workbench: Some(0), devices: vec![] },
            JobAssignment { mode: 0, start: 3, employees: vec![0], workbench: Some(0), devices: vec![] },
            JobAssignment { mode: 0, start: 5, employees: vec![1], workbench: Some(1), devices: vec![] },
        ]);
        assert!(evaluator::check_hard(&inst, &sol).unwrap().is_feasible());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut current = sol;
        for _ in 0..2000 {
            current = propose_move(&inst, &current, &mut rng);
            assert_eq!(current.jobs[0].employees, current.jobs[1].employees);
        }
    }

    #[test]
    fn finds_the_tiny_chain_optimum() {
        let inst = corpus::tiny_chain();
        let outcome = run(&inst, &budgeted(1));
        assert_eq!(outcome.best_penalty.unwrap().total, 7);
        let report = evaluator::check_hard(&inst, outcome.best_solution.as_ref().unwrap()).unwrap();
        assert!(report.is_feasible());
    }

    #[test]
    fn budgeted_runs_are_reproducible() {
        let inst = corpus::two_projects();
        let a = run(&inst, &budgeted(9));
        let b = run(&inst, &budgeted(9));
        assert_eq!(a.best_solution, b.best_solution);
        assert_eq!(a.moves, b.moves);
        assert_eq!(a.best_penalty.map(|p| p.total), b.best_penalty.map(|p| p.total));
    }
}
