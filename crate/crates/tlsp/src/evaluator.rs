//! Hard-feasibility checking and soft-constraint penalties.
//!
//! `check_hard` decides feasibility against the eleven job-level constraints
//! plus unary-resource semantics: two jobs sharing any resource unit must have
//! disjoint `[start, end)` intervals. The unary check runs as a per-unit
//! sorted interval sweep; the per-slot occupancy scan equivalent lives in
//! [`crate::refcheck`] and is used as a test oracle.
//!
//! Feasibility and penalty are deliberately separate: the penalty of an
//! infeasible (but structurally sound) solution is still computable, though
//! the search procedures in this crate only ever traverse feasible solutions.

use crate::model::*;
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

/// A solution that cannot be evaluated at all, as opposed to one that merely
/// violates constraints.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("solution has {found} job assignments, instance has {expected} jobs")]
    JobCount { expected: usize, found: usize },
    #[error("job {job}: mode {mode} does not exist in the instance mode table")]
    UnknownMode { job: JobId, mode: ModeId },
    #[error("job {job}: mode {mode} is not available for this job")]
    UnavailableMode { job: JobId, mode: ModeId },
    #[error("job {job}: unknown employee {employee}")]
    UnknownEmployee { job: JobId, employee: EmployeeId },
    #[error("job {job}: unknown workbench {workbench}")]
    UnknownWorkbench { job: JobId, workbench: WorkbenchId },
    #[error("job {job}: device list has {found} groups, instance has {expected}")]
    DeviceGroupCount { job: JobId, expected: usize, found: usize },
    #[error("job {job}: unknown device {device} in group {group}")]
    UnknownDevice { job: JobId, group: GroupId, device: DeviceId },
}

/// One violated hard constraint. The numbered variants correspond to the
/// job-level constraints (1)-(11); the unary variants cover per-unit
/// non-overlap for each resource kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum HardViolation {
    /// (1) job outside its release/deadline window.
    TimeWindow { job: JobId },
    /// (2) predecessor not finished before the job starts.
    Precedence { job: JobId, predecessor: JobId },
    /// (3) assigned mode not among the job's available modes.
    ModeUnavailable { job: JobId, mode: ModeId },
    /// (4) assigned employee not qualified.
    EmployeeUnavailable { job: JobId, employee: EmployeeId },
    /// (5) assigned workbench not available for the job.
    WorkbenchUnavailable { job: JobId, workbench: WorkbenchId },
    /// (6) assigned device not available for the job.
    DeviceUnavailable { job: JobId, group: GroupId, device: DeviceId },
    /// (7) employee count differs from the mode requirement.
    EmployeeCount { job: JobId, required: u32, assigned: u32 },
    /// (8) workbench count differs from the requirement.
    WorkbenchCount { job: JobId, required: u32, assigned: u32 },
    /// (9) device count differs from the group requirement.
    EquipmentCount { job: JobId, group: GroupId, required: u32, assigned: u32 },
    /// (10) linked jobs with different employee sets.
    LinkedEmployees { job: JobId, other: JobId },
    /// (11) started job deviating from its initial assignment.
    StartedChanged { job: JobId, detail: &'static str },
    /// Two jobs overlapping on a shared employee.
    UnaryEmployee { employee: EmployeeId, jobs: (JobId, JobId), slot: Slot },
    /// Two jobs overlapping on a shared workbench.
    UnaryWorkbench { workbench: WorkbenchId, jobs: (JobId, JobId), slot: Slot },
    /// Two jobs overlapping on a shared device.
    UnaryEquipment { group: GroupId, device: DeviceId, jobs: (JobId, JobId), slot: Slot },
}

impl HardViolation {
    /// Constraint identifier: `"1"` through `"11"`, or `"unary-Em"`,
    /// `"unary-Wb"`, `"unary-Eq"`.
    pub fn constraint_id(&self) -> &'static str {
        use HardViolation::*;
        match self {
            TimeWindow { .. } => "1",
            Precedence { .. } => "2",
            ModeUnavailable { .. } => "3",
            EmployeeUnavailable { .. } => "4",
            WorkbenchUnavailable { .. } => "5",
            DeviceUnavailable { .. } => "6",
            EmployeeCount { .. } => "7",
            WorkbenchCount { .. } => "8",
            EquipmentCount { .. } => "9",
            LinkedEmployees { .. } => "10",
            StartedChanged { .. } => "11",
            UnaryEmployee { .. } => "unary-Em",
            UnaryWorkbench { .. } => "unary-Wb",
            UnaryEquipment { .. } => "unary-Eq",
        }
    }
}

impl fmt::Display for HardViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use HardViolation::*;
        write!(f, "({}) ", self.constraint_id())?;
        match self {
            TimeWindow { job } => write!(f, "job {} outside its time window", job),
            Precedence { job, predecessor } => {
                write!(f, "job {} starts before predecessor {} ends", job, predecessor)
            }
            ModeUnavailable { job, mode } => write!(f, "job {} uses unavailable mode {}", job, mode),
            EmployeeUnavailable { job, employee } => {
                write!(f, "job {} uses unqualified employee {}", job, employee)
            }
            WorkbenchUnavailable { job, workbench } => {
                write!(f, "job {} uses unavailable workbench {}", job, workbench)
            }
            DeviceUnavailable { job, group, device } => {
                write!(f, "job {} uses unavailable device {} of group {}", job, device, group)
            }
            EmployeeCount { job, required, assigned } => {
                write!(f, "job {} has {} employees, requires {}", job, assigned, required)
            }
            WorkbenchCount { job, required, assigned } => {
                write!(f, "job {} has {} workbenches, requires {}", job, assigned, required)
            }
            EquipmentCount { job, group, required, assigned } => {
                write!(f, "job {} group {}: has {} devices, requires {}", job, group, assigned, required)
            }
            LinkedEmployees { job, other } => {
                write!(f, "linked jobs {} and {} use different employees", job, other)
            }
            StartedChanged { job, detail } => write!(f, "started job {} changed: {}", job, detail),
            UnaryEmployee { employee, jobs, slot } => {
                write!(f, "employee {} double-booked by jobs {} and {} at slot {}", employee, jobs.0, jobs.1, slot)
            }
            UnaryWorkbench { workbench, jobs, slot } => {
                write!(f, "workbench {} double-booked by jobs {} and {} at slot {}", workbench, jobs.0, jobs.1, slot)
            }
            UnaryEquipment { group, device, jobs, slot } => write!(
                f,
                "device {} of group {} double-booked by jobs {} and {} at slot {}",
                device, group, jobs.0, jobs.1, slot
            ),
        }
    }
}

/// Outcome of a hard-feasibility check. Empty iff the solution is feasible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub violations: Vec<HardViolation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "feasible");
        }
        for v in &self.violations {
            writeln!(f, "{}", v)?;
        }
        Ok(())
    }
}

/// Validates ids and shapes that must hold before any constraint can be
/// evaluated. Separate from violations: a failing shape makes the solution
/// meaningless rather than infeasible.
pub fn check_shape(instance: &Instance, solution: &Solution) -> Result<(), ShapeError> {
    if solution.jobs.len() != instance.jobs.len() {
        return Err(ShapeError::JobCount { expected: instance.jobs.len(), found: solution.jobs.len() });
    }
    for (j, a) in solution.jobs.iter().enumerate() {
        let job = &instance.jobs[j];
        if a.mode >= instance.mode_names.len() {
            return Err(ShapeError::UnknownMode { job: j, mode: a.mode });
        }
        if job.duration_in(a.mode).is_none() {
            return Err(ShapeError::UnavailableMode { job: j, mode: a.mode });
        }
        for &e in &a.employees {
            if e >= instance.employees {
                return Err(ShapeError::UnknownEmployee { job: j, employee: e });
            }
        }
        if let Some(b) = a.workbench {
            if b >= instance.workbenches {
                return Err(ShapeError::UnknownWorkbench { job: j, workbench: b });
            }
        }
        if a.devices.len() != instance.equipment_groups.len() {
            return Err(ShapeError::DeviceGroupCount {
                job: j,
                expected: instance.equipment_groups.len(),
                found: a.devices.len(),
            });
        }
        for (g, devices) in a.devices.iter().enumerate() {
            for &d in devices {
                if d >= instance.equipment_groups[g] {
                    return Err(ShapeError::UnknownDevice { job: j, group: g, device: d });
                }
            }
        }
    }
    Ok(())
}

/// Checks every hard constraint and reports all violations.
///
/// The unary check treats each employee, workbench, and device as a capacity-1
/// resource: any two jobs assigned the same unit must occupy disjoint
/// half-open intervals. Pure: identical inputs produce identical reports.
pub fn check_hard(instance: &Instance, solution: &Solution) -> Result<FeasibilityReport, ShapeError> {
    check_shape(instance, solution)?;
    let mut violations = Vec::new();

    for (j, a) in solution.jobs.iter().enumerate() {
        let job = &instance.jobs[j];
        let duration = job.duration_in(a.mode).expect("shape checked");
        let end = a.start + duration;

        // (1) time window
        if a.start < job.alpha || end > job.omega {
            violations.push(HardViolation::TimeWindow { job: j });
        }

        // (2) precedence
        for &k in &job.predecessors {
            let pred = &solution.jobs[k];
            let pred_end = pred.end(&instance.jobs[k]);
            match pred_end {
                Some(pe) if a.start >= pe => {}
                _ => violations.push(HardViolation::Precedence { job: j, predecessor: k }),
            }
        }

        // (3) handled by shape (an unavailable mode has no duration); an
        // available mode always passes, so nothing further to check here.

        // (4)-(6) availability
        let qualified: HashSet<_> = job.qualified.iter().copied().collect();
        for &e in &a.employees {
            if !qualified.contains(&e) {
                violations.push(HardViolation::EmployeeUnavailable { job: j, employee: e });
            }
        }
        if let Some(b) = a.workbench {
            if !job.available_workbenches.contains(&b) {
                violations.push(HardViolation::WorkbenchUnavailable { job: j, workbench: b });
            }
        }
        for (g, devices) in a.devices.iter().enumerate() {
            let available = job.available_devices.get(g);
            for &d in devices {
                if !available.map(|av| av.contains(&d)).unwrap_or(false) {
                    violations.push(HardViolation::DeviceUnavailable { job: j, group: g, device: d });
                }
            }
        }

        // (7)-(9) requirement counts
        let required = job.employees_required_in(a.mode).expect("shape checked");
        if a.employees.len() as u32 != required {
            violations.push(HardViolation::EmployeeCount {
                job: j,
                required,
                assigned: a.employees.len() as u32,
            });
        }
        let wb_required = u32::from(job.workbench_required);
        let wb_assigned = u32::from(a.workbench.is_some());
        if wb_assigned != wb_required {
            violations.push(HardViolation::WorkbenchCount { job: j, required: wb_required, assigned: wb_assigned });
        }
        for (g, devices) in a.devices.iter().enumerate() {
            let req = job.equipment_required.get(g).copied().unwrap_or(0);
            if devices.len() as u32 != req {
                violations.push(HardViolation::EquipmentCount {
                    job: j,
                    group: g,
                    required: req,
                    assigned: devices.len() as u32,
                });
            }
        }

        // (10) linked employees; report each unordered pair once
        let employees: HashSet<_> = a.employees.iter().copied().collect();
        for &k in &job.linked {
            if k > j {
                let other: HashSet<_> = solution.jobs[k].employees.iter().copied().collect();
                if employees != other {
                    violations.push(HardViolation::LinkedEmployees { job: j, other: k });
                }
            }
        }

        // (11) started jobs keep their initial assignment
        if job.started {
            if let Some(init) = &job.initial {
                if init.start.map(|s| s != a.start).unwrap_or(false) {
                    violations.push(HardViolation::StartedChanged { job: j, detail: "start moved" });
                }
                if init.mode.map(|m| m != a.mode).unwrap_or(false) {
                    violations.push(HardViolation::StartedChanged { job: j, detail: "mode changed" });
                }
                if let Some(emps) = &init.employees {
                    let initial: HashSet<_> = emps.iter().copied().collect();
                    if initial != employees {
                        violations.push(HardViolation::StartedChanged { job: j, detail: "employees changed" });
                    }
                }
                if init.workbench.is_some() && init.workbench != a.workbench {
                    violations.push(HardViolation::StartedChanged { job: j, detail: "workbench changed" });
                }
                if let Some(devices) = &init.devices {
                    let same = devices.len() == a.devices.len()
                        && devices.iter().zip(&a.devices).all(|(x, y)| {
                            let xs: HashSet<_> = x.iter().copied().collect();
                            let ys: HashSet<_> = y.iter().copied().collect();
                            xs == ys
                        });
                    if !same {
                        violations.push(HardViolation::StartedChanged { job: j, detail: "devices changed" });
                    }
                }
            }
        }
    }

    check_unary(instance, solution, &mut violations);
    Ok(FeasibilityReport { violations })
}

/// Interval of a job in a shape-checked solution.
fn interval(instance: &Instance, solution: &Solution, j: JobId) -> (Slot, Slot) {
    let a = &solution.jobs[j];
    let d = instance.jobs[j].duration_in(a.mode).expect("shape checked");
    (a.start, a.start + d)
}

/// Per-unit sorted sweep: for each resource unit, sort its jobs by start and
/// report every overlapping pair.
fn check_unary(instance: &Instance, solution: &Solution, violations: &mut Vec<HardViolation>) {
    let mut employee_jobs: Vec<Vec<JobId>> = vec![Vec::new(); instance.employees];
    let mut workbench_jobs: Vec<Vec<JobId>> = vec![Vec::new(); instance.workbenches];
    let mut device_jobs: Vec<Vec<Vec<JobId>>> =
        instance.equipment_groups.iter().map(|&n| vec![Vec::new(); n]).collect();

    for (j, a) in solution.jobs.iter().enumerate() {
        for &e in &a.employees {
            employee_jobs[e].push(j);
        }
        if let Some(b) = a.workbench {
            workbench_jobs[b].push(j);
        }
        for (g, devices) in a.devices.iter().enumerate() {
            for &d in devices {
                device_jobs[g][d].push(j);
            }
        }
    }

    let overlaps = |jobs: &mut Vec<JobId>, mut emit: Box<dyn FnMut(JobId, JobId, Slot) + '_>| {
        jobs.sort_by_key(|&j| interval(instance, solution, j));
        for i in 0..jobs.len() {
            let (s_i, e_i) = interval(instance, solution, jobs[i]);
            for &other in jobs.iter().skip(i + 1) {
                let (s_k, _) = interval(instance, solution, other);
                if s_k >= e_i {
                    break;
                }
                // overlap starts at the later of the two starts
                emit(jobs[i], other, s_i.max(s_k));
            }
        }
    };

    for (e, jobs) in employee_jobs.iter_mut().enumerate() {
        overlaps(
            jobs,
            Box::new(|a, b, slot| {
                violations.push(HardViolation::UnaryEmployee { employee: e, jobs: (a, b), slot })
            }),
        );
    }
    for (b, jobs) in workbench_jobs.iter_mut().enumerate() {
        overlaps(
            jobs,
            Box::new(|x, y, slot| {
                violations.push(HardViolation::UnaryWorkbench { workbench: b, jobs: (x, y), slot })
            }),
        );
    }
    for (g, units) in device_jobs.iter_mut().enumerate() {
        for (d, jobs) in units.iter_mut().enumerate() {
            overlaps(
                jobs,
                Box::new(|x, y, slot| {
                    violations.push(HardViolation::UnaryEquipment { group: g, device: d, jobs: (x, y), slot })
                }),
            );
        }
    }
}

/// Soft-constraint penalty with the default unit weights.
///
/// Precondition: the solution is shape-valid with every assigned mode
/// available (asserted). Hard feasibility is the caller's responsibility; the
/// terms are well-defined either way.
pub fn penalty(instance: &Instance, solution: &Solution) -> PenaltyBreakdown {
    penalty_weighted(instance, solution, Weights::default())
}

/// Soft-constraint penalty under explicit weights.
pub fn penalty_weighted(instance: &Instance, solution: &Solution, weights: Weights) -> PenaltyBreakdown {
    assert_eq!(solution.jobs.len(), instance.jobs.len(), "solution shape mismatch");

    let s1 = instance.jobs.len() as Penalty;
    let mut s2: Penalty = 0;
    let mut s4: Penalty = 0;
    for (j, a) in solution.jobs.iter().enumerate() {
        s2 += non_preferred_count(&instance.jobs[j], a);
        s4 += due_date_overrun(&instance.jobs[j], a);
    }

    let mut s3: Penalty = 0;
    let mut s5: Penalty = 0;
    for p in 0..instance.projects.len() {
        let (distinct, span) = project_terms(instance, solution, p);
        s3 += distinct;
        s5 += span;
    }

    PenaltyBreakdown::from_terms(s1, s2, s3, s4, s5, weights)
}

pub(crate) fn non_preferred_count(job: &Job, a: &JobAssignment) -> Penalty {
    a.employees.iter().filter(|e| !job.preferred.contains(e)).count() as Penalty
}

pub(crate) fn due_date_overrun(job: &Job, a: &JobAssignment) -> Penalty {
    let end = a.end(job).expect("mode must be available");
    Penalty::from(end.saturating_sub(job.omega_bar))
}

/// Distinct employees and occupied span of one project.
fn project_terms(instance: &Instance, solution: &Solution, p: ProjectId) -> (Penalty, Penalty) {
    let jobs = &instance.projects[p].jobs;
    if jobs.is_empty() {
        return (0, 0);
    }
    let mut distinct: HashSet<EmployeeId> = HashSet::new();
    let mut min_start = Slot::MAX;
    let mut max_end = 0;
    for &j in jobs {
        let a = &solution.jobs[j];
        distinct.extend(a.employees.iter().copied());
        let end = a.end(&instance.jobs[j]).expect("mode must be available");
        min_start = min_start.min(a.start);
        max_end = max_end.max(end);
    }
    (distinct.len() as Penalty, Penalty::from(max_end - min_start))
}

/// This project's share of the weighted total: its jobs' s1/s2/s4 terms plus
/// its own s3/s5 terms. Shares sum to the full total over all projects.
pub fn project_contribution(
    instance: &Instance,
    solution: &Solution,
    p: ProjectId,
    weights: Weights,
) -> Penalty {
    let jobs = &instance.projects[p].jobs;
    let s1 = jobs.len() as Penalty;
    let mut s2 = 0;
    let mut s4 = 0;
    for &j in jobs {
        s2 += non_preferred_count(&instance.jobs[j], &solution.jobs[j]);
        s4 += due_date_overrun(&instance.jobs[j], &solution.jobs[j]);
    }
    let (s3, s5) = project_terms(instance, solution, p);
    PenaltyBreakdown::compute_total(s1, s2, s3, s4, s5, weights)
}

/// Incremental penalty update after `changed_jobs` were reassigned.
///
/// Per-job terms (s2, s4) are adjusted for the changed jobs; per-project terms
/// (s3, s5) are recomputed for the projects those jobs belong to. The result
/// equals a full recomputation on the new solution.
pub fn penalty_delta(
    instance: &Instance,
    old_solution: &Solution,
    old: &PenaltyBreakdown,
    new_solution: &Solution,
    changed_jobs: &[JobId],
) -> PenaltyBreakdown {
    let mut s2 = old.s2;
    let mut s4 = old.s4;
    let mut projects: Vec<ProjectId> = Vec::new();
    for &j in changed_jobs {
        let job = &instance.jobs[j];
        s2 -= non_preferred_count(job, &old_solution.jobs[j]);
        s2 += non_preferred_count(job, &new_solution.jobs[j]);
        s4 -= due_date_overrun(job, &old_solution.jobs[j]);
        s4 += due_date_overrun(job, &new_solution.jobs[j]);
        if !projects.contains(&job.project) {
            projects.push(job.project);
        }
    }
    let mut s3 = old.s3;
    let mut s5 = old.s5;
    for &p in &projects {
        let (old_distinct, old_span) = project_terms(instance, old_solution, p);
        let (new_distinct, new_span) = project_terms(instance, new_solution, p);
        s3 = s3 - old_distinct + new_distinct;
        s5 = s5 - old_span + new_span;
    }
    PenaltyBreakdown::from_terms(old.s1, s2, s3, s4, s5, old.weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn assignment(mode: ModeId, start: Slot, employees: Vec<EmployeeId>, workbench: Option<WorkbenchId>) -> JobAssignment {
        JobAssignment { mode, start, employees, workbench, devices: vec![] }
    }

    fn tiny_solution(s0: Slot, s1: Slot, e0: EmployeeId, e1: EmployeeId) -> Solution {
        Solution::new(vec![
            assignment(0, s0, vec![e0], Some(0)),
            assignment(0, s1, vec![e1], Some(0)),
        ])
    }

    #[test]
    fn touching_intervals_do_not_overlap() {
        // [1,3) and [3,5) on the same workbench
        let inst = corpus::tiny_chain();
        let sol = tiny_solution(1, 3, 0, 0);
        let report = check_hard(&inst, &sol).unwrap();
        assert!(report.is_feasible(), "{}", report);
    }

    #[test]
    fn contained_interval_is_a_unary_violation() {
        // jobs sharing employee 0 at [1,4) and [2,3)
        let mut inst = corpus::tiny_chain();
        inst.jobs[1].predecessors = vec![];
        inst.jobs[0].modes[0].duration = 3;
        inst.jobs[1].modes[0].duration = 1;
        inst.workbenches = 2;
        inst.jobs[1].available_workbenches = vec![1];
        let sol = Solution::new(vec![
            assignment(0, 1, vec![0], Some(0)),
            assignment(0, 2, vec![0], Some(1)),
        ]);
        let report = check_hard(&inst, &sol).unwrap();
        assert_eq!(
            report.violations,
            vec![HardViolation::UnaryEmployee { employee: 0, jobs: (0, 1), slot: 2 }]
        );
    }

    #[test]
    fn moved_started_job_violates_constraint_eleven() {
        let inst = corpus::forced_conflict();
        // started jobs expect start 1; move job 0 to slot 2 instead
        let sol = Solution::new(vec![
            assignment(0, 2, vec![0], Some(0)),
            assignment(0, 3, vec![1], Some(0)),
        ]);
        let report = check_hard(&inst, &sol).unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, HardViolation::StartedChanged { job: 0, detail: "start moved" })));
    }

    #[test]
    fn linked_jobs_with_different_employees_violate_constraint_ten() {
        let mut inst = corpus::tiny_chain();
        inst.jobs[0].linked = vec![1];
        inst.jobs[1].linked = vec![0];
        let sol = tiny_solution(1, 3, 0, 1);
        let report = check_hard(&inst, &sol).unwrap();
        assert_eq!(report.violations, vec![HardViolation::LinkedEmployees { job: 0, other: 1 }]);
    }

    #[test]
    fn unknown_ids_are_shape_errors_not_violations() {
        let inst = corpus::tiny_chain();
        let sol = Solution::new(vec![
            assignment(0, 1, vec![7], Some(0)),
            assignment(0, 3, vec![0], Some(0)),
        ]);
        assert_eq!(check_hard(&inst, &sol), Err(ShapeError::UnknownEmployee { job: 0, employee: 7 }));
    }

    #[test]
    fn project_span_is_max_end_minus_min_start() {
        // jobs at [2,5) and [4,8) within one project: span 6
        let mut inst = corpus::tiny_chain();
        inst.jobs[1].predecessors = vec![];
        inst.jobs[0].modes[0].duration = 3;
        inst.jobs[1].modes[0].duration = 4;
        inst.horizon = 10;
        inst.jobs[0].omega = 11;
        inst.jobs[1].omega = 11;
        let sol = tiny_solution(2, 4, 0, 1);
        let bd = penalty(&inst, &sol);
        assert_eq!(bd.s5, 6);
    }

    #[test]
    fn due_date_overrun_measures_end_past_due_date() {
        // end boundary 7 with due date 5 contributes 2
        let inst = corpus::single_job(4);
        let mut inst = inst;
        inst.jobs[0].omega_bar = 5;
        let sol = Solution::new(vec![assignment(0, 3, vec![0], None)]);
        let bd = penalty(&inst, &sol);
        assert_eq!(bd.s4, 2);
    }

    #[test]
    fn tiny_chain_optimum_breaks_down_as_expected() {
        let inst = corpus::tiny_chain();
        let sol = tiny_solution(1, 3, 0, 0);
        let bd = penalty(&inst, &sol);
        assert_eq!((bd.s1, bd.s2, bd.s3, bd.s4, bd.s5), (2, 0, 1, 0, 4));
        assert_eq!(bd.total, 7);
    }

    #[test]
    fn weights_scale_their_terms() {
        let inst = corpus::tiny_chain();
        let sol = tiny_solution(1, 3, 1, 1); // non-preferred employee twice
        let w = Weights { w2: 10, w3: 100, w4: 1, w5: 1 };
        let bd = penalty_weighted(&inst, &sol, w);
        assert_eq!(bd.total, 2 + 10 * 2 + 100 * 1 + 0 + 4);
    }

    #[test]
    fn delta_on_unchanged_solution_is_identity() {
        let inst = corpus::tiny_chain();
        let sol = tiny_solution(1, 3, 0, 0);
        let bd = penalty(&inst, &sol);
        let same = penalty_delta(&inst, &sol, &bd, &sol, &[]);
        assert_eq!(same, bd);
    }

    #[test]
    fn interior_shift_leaves_the_breakdown_unchanged() {
        // moving a middle job one slot right changes no term
        let mut inst = corpus::tiny_triple();
        inst.horizon = 10;
        for job in &mut inst.jobs {
            job.omega = 11;
            job.omega_bar = 11;
        }
        let old = Solution::new(vec![
            assignment(0, 1, vec![0], Some(0)),
            assignment(0, 4, vec![0], Some(0)),
            assignment(0, 8, vec![0], Some(0)),
        ]);
        let bd = penalty(&inst, &old);
        let mut new = old.clone();
        new.jobs[1].start = 5;
        let updated = penalty_delta(&inst, &old, &bd, &new, &[1]);
        assert_eq!(updated, bd);
        assert_eq!(updated, penalty(&inst, &new));
    }

    #[test]
    fn delta_tracks_employee_reassignment() {
        let inst = corpus::tiny_chain();
        let old = tiny_solution(1, 3, 0, 0);
        let bd = penalty(&inst, &old);
        let new = tiny_solution(1, 3, 0, 1); // job 1 now on non-preferred employee
        let updated = penalty_delta(&inst, &old, &bd, &new, &[1]);
        assert_eq!(updated, penalty(&inst, &new));
        assert_eq!(updated.s2, bd.s2 + 1);
    }

    #[test]
    fn project_contributions_sum_to_total() {
        let inst = corpus::two_projects();
        let sol = Solution::new(vec![
            assignment(0, 1, vec![0], Some(0)),
            assignment(0, 3, vec![1], Some(0)),
        ]);
        let bd = penalty(&inst, &sol);
        let sum: Penalty = (0..inst.projects.len())
            .map(|p| project_contribution(&inst, &sol, p, bd.weights))
            .sum();
        assert_eq!(sum, bd.total);
    }

    #[test]
    fn check_hard_is_pure() {
        let inst = corpus::tiny_chain();
        let sol = tiny_solution(1, 2, 0, 0); // overlapping + precedence violation
        let a = check_hard(&inst, &sol).unwrap();
        let b = check_hard(&inst, &sol).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_feasible());
    }
}
