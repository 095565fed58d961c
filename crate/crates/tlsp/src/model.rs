//! Domain types for TLSP-S instances and solutions, plus structural validation.
//!
//! All identifiers are dense zero-based indices per resource kind (employees,
//! workbenches, devices within a group, jobs, projects, modes). Human-readable
//! names live in the optional [`NameTable`] side table and only matter for I/O.
//!
//! Time is measured in discrete slots. Slots are 1-based and a job occupies the
//! half-open interval `[start, start + duration)`, so a job respecting its
//! deadline satisfies `start + duration <= deadline` and its last occupied slot
//! is `deadline - 1` at the latest.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

pub type JobId = usize;
pub type ProjectId = usize;
pub type ModeId = usize;
pub type EmployeeId = usize;
pub type WorkbenchId = usize;
pub type DeviceId = usize;
pub type GroupId = usize;

/// 1-based discrete time slot index.
pub type Slot = u32;

/// Penalty values and weights are integral; all published totals are integers.
pub type Penalty = u64;

/// One execution variant of a job: a global mode id together with the
/// job-specific duration and the employee head count the mode demands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobMode {
    pub mode: ModeId,
    pub duration: Slot,
    #[serde(rename = "employees")]
    pub employees_required: u32,
}

/// Resource assignments a job may carry on input (mandatory for started jobs).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InitialAssignment {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Slot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub employees: Option<Vec<EmployeeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workbench: Option<WorkbenchId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub devices: Option<Vec<Vec<DeviceId>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Job {
    pub project: ProjectId,
    /// Release date: earliest allowed start slot.
    pub alpha: Slot,
    /// Deadline: the job must end at or before this slot boundary (hard).
    pub omega: Slot,
    /// Due date: ending later than this is a soft violation only.
    #[serde(rename = "omegaBar")]
    pub omega_bar: Slot,
    /// Available modes, sorted by mode id. Never empty.
    pub modes: Vec<JobMode>,
    /// Employees qualified to perform this job.
    #[serde(rename = "qualifiedEmployees")]
    pub qualified: Vec<EmployeeId>,
    /// Preferred employees, a subset of the qualified ones.
    #[serde(rename = "preferredEmployees")]
    pub preferred: Vec<EmployeeId>,
    pub workbench_required: bool,
    pub available_workbenches: Vec<WorkbenchId>,
    /// Devices required per equipment group (one entry per group).
    pub equipment_required: Vec<u32>,
    /// Devices usable per equipment group (one entry per group).
    pub available_devices: Vec<Vec<DeviceId>>,
    /// Jobs of the same project that must end before this one starts.
    pub predecessors: Vec<JobId>,
    /// Jobs of the same project that must use identical employees.
    #[serde(rename = "linkedJobs")]
    pub linked: Vec<JobId>,
    /// Whether the job is already underway at the start of the horizon.
    pub started: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialAssignment>,
}

impl Job {
    /// Duration in the given mode, if the mode is available for this job.
    pub fn duration_in(&self, mode: ModeId) -> Option<Slot> {
        self.modes.iter().find(|m| m.mode == mode).map(|m| m.duration)
    }

    /// Employee requirement in the given mode, if available.
    pub fn employees_required_in(&self, mode: ModeId) -> Option<u32> {
        self.modes
            .iter()
            .find(|m| m.mode == mode)
            .map(|m| m.employees_required)
    }

    /// Shortest duration over the available modes.
    pub fn min_duration(&self) -> Slot {
        self.modes.iter().map(|m| m.duration).min().unwrap_or(0)
    }

    /// Smallest employee requirement over the available modes.
    pub fn min_employees_required(&self) -> u32 {
        self.modes
            .iter()
            .map(|m| m.employees_required)
            .min()
            .unwrap_or(0)
    }

    /// Largest employee requirement over the available modes.
    pub fn max_employees_required(&self) -> u32 {
        self.modes
            .iter()
            .map(|m| m.employees_required)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub name: String,
    pub jobs: Vec<JobId>,
}

/// Optional human-readable names for resources; irrelevant to the solvers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NameTable {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub employees: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub workbenches: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub equipment_groups: Vec<String>,
}

impl NameTable {
    pub fn is_empty(&self) -> bool {
        self.employees.is_empty() && self.workbenches.is_empty() && self.equipment_groups.is_empty()
    }
}

/// A TLSP-S instance. Immutable after construction; modified copies are built
/// instead of mutating in place, so instances are safe to share across
/// concurrent solver runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Instance {
    pub id: String,
    /// Number of discrete time slots in the scheduling period.
    pub horizon: Slot,
    /// Number of employees (ids `0..employees`).
    pub employees: usize,
    /// Number of workbenches (ids `0..workbenches`).
    pub workbenches: usize,
    /// Unit count per equipment group.
    pub equipment_groups: Vec<usize>,
    /// Global mode name space; job modes index into this list.
    pub mode_names: Vec<String>,
    pub projects: Vec<Project>,
    pub jobs: Vec<Job>,
    #[serde(default, skip_serializing_if = "NameTable::is_empty")]
    pub names: NameTable,
}

impl Instance {
    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn project_count(&self) -> usize {
        self.projects.len()
    }

    /// Latest admissible end boundary: a job may occupy through slot `horizon`,
    /// i.e. end at `horizon + 1`.
    pub fn end_of_horizon(&self) -> Slot {
        self.horizon + 1
    }
}

/// Assignment of one job in a solution: mode, start slot, and concrete units.
/// Unit lists are kept sorted so equal assignments compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobAssignment {
    pub mode: ModeId,
    pub start: Slot,
    pub employees: Vec<EmployeeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workbench: Option<WorkbenchId>,
    pub devices: Vec<Vec<DeviceId>>,
}

impl JobAssignment {
    /// End boundary of the job under this assignment within `job`'s mode table.
    pub fn end(&self, job: &Job) -> Option<Slot> {
        job.duration_in(self.mode).map(|d| self.start + d)
    }
}

/// A full solution: one assignment per job, indexed by job id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub jobs: Vec<JobAssignment>,
}

impl Solution {
    pub fn new(jobs: Vec<JobAssignment>) -> Self {
        Solution { jobs }
    }
}

/// Penalty weights for the soft constraint terms s2..s5 (s1 is unweighted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pub w2: Penalty,
    pub w3: Penalty,
    pub w4: Penalty,
    pub w5: Penalty,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { w2: 1, w3: 1, w4: 1, w5: 1 }
    }
}

/// The five soft-constraint terms and their weighted sum.
///
/// `s1` is the number of jobs, kept as a constant so totals stay comparable
/// across tools that report it. Terms are stored unweighted; `total` applies
/// the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    /// Job count constant.
    pub s1: Penalty,
    /// Assignments of non-preferred employees.
    pub s2: Penalty,
    /// Distinct employees per project, summed over projects.
    pub s3: Penalty,
    /// Total due-date overrun in slots.
    pub s4: Penalty,
    /// Total project duration in slots.
    pub s5: Penalty,
    pub weights: Weights,
    pub total: Penalty,
}

impl PenaltyBreakdown {
    pub fn compute_total(s1: Penalty, s2: Penalty, s3: Penalty, s4: Penalty, s5: Penalty, w: Weights) -> Penalty {
        s1 + w.w2 * s2 + w.w3 * s3 + w.w4 * s4 + w.w5 * s5
    }

    pub fn from_terms(s1: Penalty, s2: Penalty, s3: Penalty, s4: Penalty, s5: Penalty, weights: Weights) -> Self {
        let total = Self::compute_total(s1, s2, s3, s4, s5, weights);
        PenaltyBreakdown { s1, s2, s3, s4, s5, weights, total }
    }
}

impl fmt::Display for PenaltyBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "total {} (s1 {} + s2 {} + s3 {} + s4 {} + s5 {})",
            self.total, self.s1, self.s2, self.s3, self.s4, self.s5
        )
    }
}

/// One structural problem found in an instance. Violations are data, not
/// errors: `validate_instance` returns all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub job: Option<JobId>,
    pub field: String,
    pub message: String,
}

impl Violation {
    fn job(job: JobId, field: &str, message: impl Into<String>) -> Self {
        Violation { job: Some(job), field: field.to_string(), message: message.into() }
    }

    fn instance(field: &str, message: impl Into<String>) -> Self {
        Violation { job: None, field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.job {
            Some(j) => write!(f, "job {}: {}: {}", j, self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

fn has_duplicates(ids: &[usize]) -> bool {
    let mut seen = HashSet::new();
    ids.iter().any(|id| !seen.insert(*id))
}

/// Checks every structural invariant of an instance and reports all failures.
///
/// An empty result means the instance is well-formed: identifiers resolve,
/// windows admit at least one mode, precedence graphs are acyclic, links and
/// precedences stay within their project, and started jobs carry complete
/// initial assignments starting at slot 1.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let inst = instance;

    if inst.horizon < 1 {
        out.push(Violation::instance("horizon", "horizon must be at least 1"));
    }

    // Projects must partition the job set.
    let mut owner: Vec<Option<ProjectId>> = vec![None; inst.jobs.len()];
    for (p, project) in inst.projects.iter().enumerate() {
        for &j in &project.jobs {
            if j >= inst.jobs.len() {
                out.push(Violation::instance(
                    "projects",
                    format!("project {} references unknown job {}", p, j),
                ));
                continue;
            }
            match owner[j] {
                Some(prev) => out.push(Violation::job(
                    j,
                    "project",
                    format!("job listed in both project {} and project {}", prev, p),
                )),
                None => owner[j] = Some(p),
            }
        }
    }
    for (j, job) in inst.jobs.iter().enumerate() {
        match owner[j] {
            None => out.push(Violation::job(j, "project", "job not listed in any project")),
            Some(p) if p != job.project => out.push(Violation::job(
                j,
                "project",
                format!("job claims project {} but is listed under project {}", job.project, p),
            )),
            _ => {}
        }
        if job.project >= inst.projects.len() {
            out.push(Violation::job(j, "project", format!("unknown project {}", job.project)));
        }
    }

    let group_count = inst.equipment_groups.len();
    for (j, job) in inst.jobs.iter().enumerate() {
        if job.modes.is_empty() {
            out.push(Violation::job(j, "modes", "job has no available mode"));
            continue;
        }
        let mode_ids: Vec<usize> = job.modes.iter().map(|m| m.mode).collect();
        if has_duplicates(&mode_ids) {
            out.push(Violation::job(j, "modes", "duplicate mode id"));
        }
        for m in &job.modes {
            if m.mode >= inst.mode_names.len() {
                out.push(Violation::job(j, "modes", format!("unknown mode id {}", m.mode)));
            }
            if m.duration == 0 {
                out.push(Violation::job(j, "modes", format!("mode {} has zero duration", m.mode)));
            }
            if m.employees_required > 0 && (job.qualified.len() as u32) < m.employees_required {
                out.push(Violation::job(
                    j,
                    "qualifiedEmployees",
                    format!(
                        "mode {} needs {} employees but only {} are qualified",
                        m.mode,
                        m.employees_required,
                        job.qualified.len()
                    ),
                ));
            }
        }

        if job.alpha < 1 {
            out.push(Violation::job(j, "alpha", "release date must be at least slot 1"));
        }
        if job.omega > inst.end_of_horizon() {
            out.push(Violation::job(
                j,
                "omega",
                format!("deadline {} lies beyond the horizon boundary {}", job.omega, inst.end_of_horizon()),
            ));
        }
        if job.omega_bar < 1 {
            out.push(Violation::job(j, "omegaBar", "due date must be at least slot 1"));
        }
        let min_dur = job.min_duration();
        if job.alpha + min_dur > job.omega {
            out.push(Violation::job(
                j,
                "omega",
                format!(
                    "window too small: release {} plus shortest duration {} exceeds deadline {}",
                    job.alpha, min_dur, job.omega
                ),
            ));
        }

        for &e in &job.qualified {
            if e >= inst.employees {
                out.push(Violation::job(j, "qualifiedEmployees", format!("unknown employee {}", e)));
            }
        }
        if has_duplicates(&job.qualified) {
            out.push(Violation::job(j, "qualifiedEmployees", "duplicate employee id"));
        }
        let qualified: HashSet<_> = job.qualified.iter().copied().collect();
        for &e in &job.preferred {
            if !qualified.contains(&e) {
                out.push(Violation::job(
                    j,
                    "preferredEmployees",
                    format!("preferred employee {} is not qualified", e),
                ));
            }
        }
        if has_duplicates(&job.preferred) {
            out.push(Violation::job(j, "preferredEmployees", "duplicate employee id"));
        }

        for &b in &job.available_workbenches {
            if b >= inst.workbenches {
                out.push(Violation::job(j, "availableWorkbenches", format!("unknown workbench {}", b)));
            }
        }
        if has_duplicates(&job.available_workbenches) {
            out.push(Violation::job(j, "availableWorkbenches", "duplicate workbench id"));
        }
        if job.workbench_required && job.available_workbenches.is_empty() {
            out.push(Violation::job(
                j,
                "availableWorkbenches",
                "workbench required but none available",
            ));
        }

        if job.equipment_required.len() != group_count {
            out.push(Violation::job(
                j,
                "equipmentRequired",
                format!("expected {} group entries, found {}", group_count, job.equipment_required.len()),
            ));
        }
        if job.available_devices.len() != group_count {
            out.push(Violation::job(
                j,
                "availableDevices",
                format!("expected {} group entries, found {}", group_count, job.available_devices.len()),
            ));
        }
        for (g, devices) in job.available_devices.iter().enumerate().take(group_count) {
            for &d in devices {
                if d >= inst.equipment_groups[g] {
                    out.push(Violation::job(
                        j,
                        "availableDevices",
                        format!("unknown device {} in group {}", d, g),
                    ));
                }
            }
            if has_duplicates(devices) {
                out.push(Violation::job(j, "availableDevices", format!("duplicate device id in group {}", g)));
            }
            let required = job.equipment_required.get(g).copied().unwrap_or(0);
            if (devices.len() as u32) < required {
                out.push(Violation::job(
                    j,
                    "availableDevices",
                    format!(
                        "group {} requires {} devices but only {} are available",
                        g,
                        required,
                        devices.len()
                    ),
                ));
            }
        }

        for (field, refs) in [("predecessors", &job.predecessors), ("linkedJobs", &job.linked)] {
            for &k in refs {
                if k >= inst.jobs.len() {
                    out.push(Violation::job(j, field, format!("unknown job {}", k)));
                } else if inst.jobs[k].project != job.project {
                    out.push(Violation::job(
                        j,
                        field,
                        format!("job {} belongs to a different project", k),
                    ));
                }
                if k == j {
                    out.push(Violation::job(j, field, "job references itself"));
                }
            }
            if has_duplicates(refs) {
                out.push(Violation::job(j, field, "duplicate job id"));
            }
        }

        if job.started {
            match &job.initial {
                None => out.push(Violation::job(j, "initial", "started job without initial assignments")),
                Some(init) => validate_started_initial(inst, j, job, init, &mut out),
            }
        } else if let Some(init) = &job.initial {
            validate_partial_initial(inst, j, job, init, &mut out);
        }
    }

    // Precedence cycles make every schedule infeasible; report them here so
    // downstream topological passes can rely on acyclicity.
    if let Some(cycle_job) = find_precedence_cycle(inst) {
        out.push(Violation::job(cycle_job, "predecessors", "precedence cycle detected"));
    }

    out
}

fn validate_started_initial(
    inst: &Instance,
    j: JobId,
    job: &Job,
    init: &InitialAssignment,
    out: &mut Vec<Violation>,
) {
    match init.start {
        Some(1) => {}
        Some(s) => out.push(Violation::job(
            j,
            "initial.start",
            format!("started job must start at slot 1, found {}", s),
        )),
        None => out.push(Violation::job(j, "initial.start", "started job without initial start")),
    }
    let mode = match init.mode {
        Some(m) => m,
        None => {
            out.push(Violation::job(j, "initial.mode", "started job without initial mode"));
            return;
        }
    };
    let Some(required) = job.employees_required_in(mode) else {
        out.push(Violation::job(j, "initial.mode", format!("initial mode {} is not available", mode)));
        return;
    };

    let employees = init.employees.clone().unwrap_or_default();
    if employees.len() as u32 != required {
        out.push(Violation::job(
            j,
            "initial.employees",
            format!("initial assignment has {} employees, mode requires {}", employees.len(), required),
        ));
    }
    let qualified: HashSet<_> = job.qualified.iter().copied().collect();
    for &e in &employees {
        if e >= inst.employees || !qualified.contains(&e) {
            out.push(Violation::job(j, "initial.employees", format!("employee {} not qualified", e)));
        }
    }

    if job.workbench_required {
        match init.workbench {
            Some(b) if job.available_workbenches.contains(&b) => {}
            Some(b) => out.push(Violation::job(j, "initial.workbench", format!("workbench {} not available", b))),
            None => out.push(Violation::job(j, "initial.workbench", "workbench required but not assigned")),
        }
    } else if init.workbench.is_some() {
        out.push(Violation::job(j, "initial.workbench", "workbench assigned but not required"));
    }

    let devices = init.devices.clone().unwrap_or_default();
    if devices.len() != inst.equipment_groups.len() {
        out.push(Violation::job(
            j,
            "initial.devices",
            format!("expected {} group entries, found {}", inst.equipment_groups.len(), devices.len()),
        ));
        return;
    }
    for (g, assigned) in devices.iter().enumerate() {
        let required = job.equipment_required.get(g).copied().unwrap_or(0);
        if assigned.len() as u32 != required {
            out.push(Violation::job(
                j,
                "initial.devices",
                format!("group {}: assigned {} devices, required {}", g, assigned.len(), required),
            ));
        }
        for &d in assigned {
            if !job.available_devices.get(g).map(|a| a.contains(&d)).unwrap_or(false) {
                out.push(Violation::job(
                    j,
                    "initial.devices",
                    format!("device {} in group {} not available", d, g),
                ));
            }
        }
    }
}

fn validate_partial_initial(
    inst: &Instance,
    j: JobId,
    job: &Job,
    init: &InitialAssignment,
    out: &mut Vec<Violation>,
) {
    if let Some(m) = init.mode {
        if job.duration_in(m).is_none() {
            out.push(Violation::job(j, "initial.mode", format!("initial mode {} is not available", m)));
        }
    }
    if let Some(s) = init.start {
        if s < 1 {
            out.push(Violation::job(j, "initial.start", "initial start before slot 1"));
        }
    }
    if let Some(employees) = &init.employees {
        for &e in employees {
            if e >= inst.employees {
                out.push(Violation::job(j, "initial.employees", format!("unknown employee {}", e)));
            }
        }
    }
    if let Some(b) = init.workbench {
        if b >= inst.workbenches {
            out.push(Violation::job(j, "initial.workbench", format!("unknown workbench {}", b)));
        }
    }
}

fn find_precedence_cycle(inst: &Instance) -> Option<JobId> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let n = inst.jobs.len();
    let mut mark = vec![Mark::White; n];
    // Iterative DFS over the predecessor relation.
    for root in 0..n {
        if mark[root] != Mark::White {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Grey;
        while let Some(&mut (node, ref mut idx)) = stack.last_mut() {
            let preds = &inst.jobs[node].predecessors;
            let mut advanced = false;
            while *idx < preds.len() {
                let next = preds[*idx];
                *idx += 1;
                if next >= n {
                    continue; // reported as unknown-id violation elsewhere
                }
                match mark[next] {
                    Mark::Grey => return Some(next),
                    Mark::White => {
                        mark[next] = Mark::Grey;
                        stack.push((next, 0));
                        advanced = true;
                        break;
                    }
                    Mark::Black => {}
                }
            }
            if !advanced && stack.last().map(|&(nd, _)| nd) == Some(node) {
                mark[node] = Mark::Black;
                stack.pop();
            }
        }
    }
    None
}

/// Error from [`normalize_links`]: a link edge crossing project boundaries has
/// no well-defined closure.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("job {job}: linkedJobs: job {other} belongs to a different project")]
pub struct CrossProjectLink {
    pub job: JobId,
    pub other: JobId,
}

/// Replaces the linked-jobs relation with its symmetric-transitive closure
/// within each project.
///
/// Idempotent: applying it twice yields the same instance. The resulting
/// per-job lists give, for each job, every other member of its link class in
/// ascending order.
pub fn normalize_links(instance: &Instance) -> Result<Instance, CrossProjectLink> {
    let n = instance.jobs.len();
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }

    for (j, job) in instance.jobs.iter().enumerate() {
        for &k in &job.linked {
            if k >= n {
                continue; // left to validate_instance
            }
            if instance.jobs[k].project != job.project {
                return Err(CrossProjectLink { job: j, other: k });
            }
            let (a, b) = (find(&mut parent, j), find(&mut parent, k));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }

    let mut members: Vec<Vec<JobId>> = vec![Vec::new(); n];
    for j in 0..n {
        let root = find(&mut parent, j);
        members[root].push(j);
    }

    let mut result = instance.clone();
    for j in 0..n {
        let root = find(&mut parent, j);
        result.jobs[j].linked = members[root].iter().copied().filter(|&k| k != j).collect();
    }
    Ok(result)
}

/// Link classes of a normalized instance: for each job, the sorted list of all
/// jobs in its class including itself.
pub fn link_classes(instance: &Instance) -> Vec<Vec<JobId>> {
    instance
        .jobs
        .iter()
        .enumerate()
        .map(|(j, job)| {
            let mut class: Vec<JobId> = job.linked.iter().copied().chain(std::iter::once(j)).collect();
            class.sort_unstable();
            class
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn canonical_two_job_instance_is_well_formed() {
        let inst = corpus::tiny_chain();
        assert_eq!(validate_instance(&inst), Vec::new());
    }

    #[test]
    fn window_too_small_is_reported() {
        let mut inst = corpus::tiny_chain();
        inst.jobs[0].alpha = 5;
        inst.jobs[0].omega = 6;
        inst.jobs[0].modes[0].duration = 3;
        let violations = validate_instance(&inst);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("window too small"), "{}", violations[0]);
        assert_eq!(violations[0].job, Some(0));
    }

    #[test]
    fn started_job_must_start_at_slot_one() {
        let mut inst = corpus::tiny_chain();
        inst.jobs[0].started = true;
        inst.jobs[0].initial = Some(InitialAssignment {
            mode: Some(0),
            start: Some(2),
            employees: Some(vec![0]),
            workbench: Some(0),
            devices: Some(vec![]),
        });
        let violations = validate_instance(&inst);
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("must start at slot 1"), "{}", violations[0]);
    }

    #[test]
    fn normalize_links_adds_symmetric_edge() {
        let mut inst = corpus::tiny_chain();
        inst.jobs[0].linked = vec![1];
        inst.jobs[1].linked = vec![];
        let normalized = normalize_links(&inst).unwrap();
        assert_eq!(normalized.jobs[0].linked, vec![1]);
        assert_eq!(normalized.jobs[1].linked, vec![0]);
    }

    #[test]
    fn normalize_links_builds_transitive_closure() {
        let mut inst = corpus::tiny_triple();
        inst.jobs[0].linked = vec![1];
        inst.jobs[1].linked = vec![2];
        inst.jobs[2].linked = vec![];
        let normalized = normalize_links(&inst).unwrap();
        assert_eq!(normalized.jobs[0].linked, vec![1, 2]);
        assert_eq!(normalized.jobs[1].linked, vec![0, 2]);
        assert_eq!(normalized.jobs[2].linked, vec![0, 1]);
    }

    #[test]
    fn normalize_links_is_identity_without_links() {
        let inst = corpus::tiny_chain();
        let normalized = normalize_links(&inst).unwrap();
        assert_eq!(normalized, inst);
    }

    #[test]
    fn normalize_links_is_idempotent() {
        let mut inst = corpus::tiny_triple();
        inst.jobs[0].linked = vec![2];
        let once = normalize_links(&inst).unwrap();
        let twice = normalize_links(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn cross_project_link_is_rejected() {
        let mut inst = corpus::two_projects();
        let other = inst.projects[1].jobs[0];
        inst.jobs[0].linked = vec![other];
        let err = normalize_links(&inst).unwrap_err();
        assert_eq!(err.job, 0);
        assert_eq!(err.other, other);
    }

    #[test]
    fn precedence_cycle_is_reported() {
        let mut inst = corpus::tiny_chain();
        inst.jobs[0].predecessors = vec![1];
        // job 1 already lists job 0 as predecessor
        let violations = validate_instance(&inst);
        assert!(violations.iter().any(|v| v.message.contains("cycle")));
    }
}
