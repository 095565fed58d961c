//! Exhaustive brute-force optimizer for tiny instances.
//!
//! Enumerates every structurally admissible assignment in a fixed order (jobs
//! by index; per job: start ascending, mode id ascending, resource subsets in
//! lexicographic order) and keeps the first solution attaining the minimum
//! penalty, which pins the tie-break to lexicographic assignment order.
//!
//! Partial assignments are discarded as soon as they violate a hard constraint
//! among the already-placed jobs, and once an incumbent exists, as soon as the
//! penalty terms accumulated by the placed jobs alone reach the incumbent (all
//! five terms only grow as jobs are added, so this never skips an optimum).
//! No completion estimates are used; this search shares no reasoning with the
//! branch-and-bound solver it is meant to check.

use crate::evaluator;
use crate::model::*;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space of about {estimate} assignments exceeds the limit {limit}")]
    ExceedsLimit { estimate: u64, limit: u64 },
}

/// Result of an exhaustive enumeration: the optimal solution, or proof by
/// exhaustion that no feasible solution exists.
pub type OracleResult = Result<Option<(Solution, PenaltyBreakdown)>, OracleError>;

/// Exhaustively solves `instance`, refusing to start if the assignment-space
/// estimate exceeds `limit`.
pub fn enumerate_optimal(instance: &Instance, limit: u64) -> OracleResult {
    let estimate = search_space_estimate(instance);
    if estimate > limit {
        return Err(OracleError::ExceedsLimit { estimate, limit });
    }

    let mut search = Search {
        instance,
        assigned: vec![None; instance.jobs.len()],
        best: None,
    };
    search.place(0);
    Ok(search.best)
}

/// Product over jobs of per-job choice counts, saturating at `u64::MAX`.
pub fn search_space_estimate(instance: &Instance) -> u64 {
    let mut product: u64 = 1;
    for job in &instance.jobs {
        let mut choices: u64 = 0;
        if job.started {
            choices = 1;
        } else {
            for m in &job.modes {
                let starts = (job.omega.saturating_sub(m.duration)).saturating_sub(job.alpha - 1) as u64;
                let employees = binomial(job.qualified.len() as u64, m.employees_required as u64);
                let workbenches = if job.workbench_required {
                    job.available_workbenches.len() as u64
                } else {
                    1
                };
                let mut devices: u64 = 1;
                for (g, &req) in job.equipment_required.iter().enumerate() {
                    devices = devices
                        .saturating_mul(binomial(job.available_devices[g].len() as u64, req as u64));
                }
                choices = choices.saturating_add(
                    starts
                        .saturating_mul(employees)
                        .saturating_mul(workbenches)
                        .saturating_mul(devices),
                );
            }
        }
        product = product.saturating_mul(choices.max(1));
    }
    product
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u64 = 1;
    for i in 0..k {
        result = result.saturating_mul(n - i) / (i + 1);
    }
    result
}

struct Search<'a> {
    instance: &'a Instance,
    assigned: Vec<Option<JobAssignment>>,
    best: Option<(Solution, PenaltyBreakdown)>,
}

impl<'a> Search<'a> {
    fn place(&mut self, j: JobId) {
        if j == self.instance.jobs.len() {
            self.record_leaf();
            return;
        }
        let job = &self.instance.jobs[j];

        if job.started {
            let init = job.initial.as_ref().expect("validated instance");
            let assignment = JobAssignment {
                mode: init.mode.expect("validated instance"),
                start: init.start.expect("validated instance"),
                employees: sorted(init.employees.clone().unwrap_or_default()),
                workbench: init.workbench,
                devices: init
                    .devices
                    .clone()
                    .unwrap_or_else(|| vec![Vec::new(); self.instance.equipment_groups.len()])
                    .into_iter()
                    .map(sorted)
                    .collect(),
            };
            self.try_assignment(j, assignment);
            return;
        }

        let min_dur = job.min_duration();
        for start in job.alpha..=job.omega.saturating_sub(min_dur) {
            let mut modes: Vec<&JobMode> = job.modes.iter().collect();
            modes.sort_by_key(|m| m.mode);
            for mode in modes {
                if start + mode.duration > job.omega {
                    continue;
                }
                self.place_resources(j, start, mode);
            }
        }
    }

    fn place_resources(&mut self, j: JobId, start: Slot, mode: &JobMode) {
        let job = &self.instance.jobs[j];
        let mut qualified = job.qualified.clone();
        qualified.sort_unstable();

        for employees in combinations(&qualified, mode.employees_required as usize) {
            let workbench_options: Vec<Option<WorkbenchId>> = if job.workbench_required {
                let mut benches = job.available_workbenches.clone();
                benches.sort_unstable();
                benches.into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            for workbench in &workbench_options {
                self.place_devices(j, start, mode, &employees, *workbench, 0, &mut Vec::new());
            }
        }
    }

    fn place_devices(
        &mut self,
        j: JobId,
        start: Slot,
        mode: &JobMode,
        employees: &[EmployeeId],
        workbench: Option<WorkbenchId>,
        group: GroupId,
        chosen: &mut Vec<Vec<DeviceId>>,
    ) {
        let job = &self.instance.jobs[j];
        if group == self.instance.equipment_groups.len() {
            let assignment = JobAssignment {
                mode: mode.mode,
                start,
                employees: employees.to_vec(),
                workbench,
                devices: chosen.clone(),
            };
            self.try_assignment(j, assignment);
            return;
        }
        let req = job.equipment_required[group] as usize;
        let mut available = job.available_devices[group].clone();
        available.sort_unstable();
        for devices in combinations(&available, req) {
            chosen.push(devices);
            self.place_devices(j, start, mode, employees, workbench, group + 1, chosen);
            chosen.pop();
        }
    }

    fn try_assignment(&mut self, j: JobId, assignment: JobAssignment) {
        if !self.consistent_with_placed(j, &assignment) {
            return;
        }
        self.assigned[j] = Some(assignment);
        if !self.dominated(j) {
            self.place(j + 1);
        }
        self.assigned[j] = None;
    }

    /// Hard constraints restricted to job pairs that are both placed.
    fn consistent_with_placed(&self, j: JobId, a: &JobAssignment) -> bool {
        let inst = self.instance;
        let job = &inst.jobs[j];
        let duration = job.duration_in(a.mode).expect("mode available by construction");
        let end = a.start + duration;
        if a.start < job.alpha || end > job.omega {
            return false;
        }

        for (k, other) in self.assigned.iter().enumerate() {
            let Some(other) = other.as_ref() else { continue };
            let other_job = &inst.jobs[k];
            let other_end = other.start + other_job.duration_in(other.mode).unwrap();

            if job.predecessors.contains(&k) && a.start < other_end {
                return false;
            }
            if other_job.predecessors.contains(&j) && other.start < end {
                return false;
            }
            if job.linked.contains(&k) && a.employees != other.employees {
                return false;
            }

            let overlap = a.start < other_end && other.start < end;
            if overlap {
                if a.employees.iter().any(|e| other.employees.contains(e)) {
                    return false;
                }
                if a.workbench.is_some() && a.workbench == other.workbench {
                    return false;
                }
                for (g, devices) in a.devices.iter().enumerate() {
                    if devices.iter().any(|d| other.devices[g].contains(d)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Penalty of the placed jobs alone already reaches the incumbent. All
    /// terms are monotone in the set of placed jobs, so this is safe.
    fn dominated(&self, _latest: JobId) -> bool {
        let Some((_, best)) = &self.best else { return false };
        let inst = self.instance;
        let mut partial = inst.jobs.len() as Penalty; // s1 counted in full
        for p in 0..inst.projects.len() {
            let mut distinct: Vec<EmployeeId> = Vec::new();
            let mut min_start = Slot::MAX;
            let mut max_end = 0;
            for &j in &inst.projects[p].jobs {
                let Some(a) = self.assigned[j].as_ref() else { continue };
                let job = &inst.jobs[j];
                let end = a.start + job.duration_in(a.mode).unwrap();
                min_start = min_start.min(a.start);
                max_end = max_end.max(end);
                partial += a.employees.iter().filter(|e| !job.preferred.contains(e)).count() as Penalty;
                partial += Penalty::from(end.saturating_sub(job.omega_bar));
                for &e in &a.employees {
                    if !distinct.contains(&e) {
                        distinct.push(e);
                    }
                }
            }
            partial += distinct.len() as Penalty;
            if max_end > 0 {
                partial += Penalty::from(max_end - min_start);
            }
        }
        partial >= best.total
    }

    fn record_leaf(&mut self) {
        let solution = Solution::new(
            self.assigned.iter().map(|a| a.clone().expect("leaf is complete")).collect(),
        );
        debug_assert!(
            evaluator::check_hard(self.instance, &solution).map(|r| r.is_feasible()).unwrap_or(false),
            "oracle leaf must be feasible"
        );
        let breakdown = evaluator::penalty(self.instance, &solution);
        let better = match &self.best {
            None => true,
            Some((_, b)) => breakdown.total < b.total,
        };
        if better {
            self.best = Some((solution, breakdown));
        }
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// All k-element subsets of `items` in lexicographic order over positions.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn tiny_chain_optimum_is_seven() {
        let inst = corpus::tiny_chain();
        let (solution, breakdown) = enumerate_optimal(&inst, 1_000_000).unwrap().expect("feasible");
        assert_eq!(breakdown.total, 7);
        assert_eq!((breakdown.s1, breakdown.s2, breakdown.s3, breakdown.s4, breakdown.s5), (2, 0, 1, 0, 4));
        // lexicographic tie-break: earliest starts, lowest employee ids
        assert_eq!(solution.jobs[0].start, 1);
        assert_eq!(solution.jobs[1].start, 3);
        assert_eq!(solution.jobs[0].employees, vec![0]);
        assert_eq!(solution.jobs[1].employees, vec![0]);
    }

    #[test]
    fn forced_workbench_conflict_is_proven_infeasible() {
        let inst = corpus::forced_conflict();
        assert_eq!(enumerate_optimal(&inst, 1_000_000).unwrap(), None);
    }

    #[test]
    fn single_unconstrained_job_starts_at_release_with_preferred_employee() {
        for d in [1, 3, 5] {
            let inst = corpus::single_job(d);
            let (solution, breakdown) = enumerate_optimal(&inst, 1_000_000).unwrap().expect("feasible");
            assert_eq!(solution.jobs[0].start, inst.jobs[0].alpha);
            assert_eq!(solution.jobs[0].employees, vec![0]);
            assert_eq!(breakdown.total, 1 + 0 + 1 + 0 + Penalty::from(d));
        }
    }

    #[test]
    fn limit_is_enforced() {
        let inst = corpus::tiny_chain();
        let err = enumerate_optimal(&inst, 3).unwrap_err();
        assert!(matches!(err, OracleError::ExceedsLimit { limit: 3, .. }));
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(&[1, 2, 3, 4], 2),
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(combinations(&[1, 2], 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(&[1], 2), Vec::<Vec<usize>>::new());
    }
}
