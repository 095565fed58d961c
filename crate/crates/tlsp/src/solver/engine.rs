//! Search state, propagation, bounding, and the DFS driver.

use super::prep::Prep;
use super::{SearchConfig, SolveStatus};
use crate::evaluator;
use crate::model::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

/// Start-time and mode domain of one unassigned job.
///
/// `start_ok` records time-table holes, indexed by `start - alpha`; `est` and
/// `lst` carry the bound information. The effective domain is every `v` with
/// `est <= v <= lst` and `start_ok[v - alpha]`.
#[derive(Clone)]
pub(crate) struct JobDomain {
    pub alpha: Slot,
    pub omega: Slot,
    pub start_ok: Vec<bool>,
    pub est: Slot,
    pub lst: Slot,
    /// Remaining candidate modes, sorted by mode id.
    pub modes: Vec<JobMode>,
    pub min_dur: Slot,
    /// Employee set dictated by a committed linked job, when one exists.
    pub forced_employees: Option<Vec<EmployeeId>>,
}

impl JobDomain {
    fn new(job: &Job) -> Self {
        let mut modes = job.modes.clone();
        modes.sort_by_key(|m| m.mode);
        let min_dur = modes.iter().map(|m| m.duration).min().unwrap_or(1);
        let width = job.omega.saturating_sub(job.alpha) as usize;
        JobDomain {
            alpha: job.alpha,
            omega: job.omega,
            start_ok: vec![true; width.max(1)],
            est: job.alpha,
            lst: job.omega.saturating_sub(min_dur),
            modes,
            min_dur,
            forced_employees: None,
        }
    }

    pub fn allowed(&self, v: Slot) -> bool {
        v >= self.est && v <= self.lst && self.start_ok[(v - self.alpha) as usize]
    }

    fn settle(&mut self) {
        while self.est <= self.lst && !self.start_ok[(self.est - self.alpha) as usize] {
            self.est += 1;
        }
        while self.lst >= self.est && self.lst > self.alpha && !self.start_ok[(self.lst - self.alpha) as usize] {
            self.lst -= 1;
        }
        if self.lst >= self.est && !self.start_ok[(self.lst - self.alpha) as usize] {
            // lst reached alpha and is still forbidden
            self.est = self.lst + 1;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.est > self.lst || self.modes.is_empty()
    }

    /// Tightens the bound interval. Returns whether anything changed.
    fn narrow(&mut self, lb: Slot, ub: Slot) -> bool {
        let mut changed = false;
        if lb > self.est {
            self.est = lb;
            changed = true;
        }
        if ub < self.lst {
            self.lst = ub;
            changed = true;
        }
        if changed {
            self.settle();
        }
        changed
    }

    /// Removes the start values in `[lo, hi]`. Returns whether anything
    /// changed.
    fn forbid_range(&mut self, lo: Slot, hi: Slot) -> bool {
        let lo = lo.max(self.alpha);
        let hi = hi.min(self.alpha + self.start_ok.len() as Slot - 1);
        let mut changed = false;
        for v in lo..=hi {
            let idx = (v - self.alpha) as usize;
            if self.start_ok[idx] {
                self.start_ok[idx] = false;
                changed = true;
            }
        }
        if changed {
            self.settle();
        }
        changed
    }

    /// Drops modes failing `keep`; refreshes `min_dur` and the latest start.
    fn retain_modes(&mut self, keep: impl Fn(&JobMode) -> bool) -> bool {
        let before = self.modes.len();
        self.modes.retain(|m| keep(m));
        if self.modes.len() == before {
            return false;
        }
        if let Some(d) = self.modes.iter().map(|m| m.duration).min() {
            if d > self.min_dur {
                self.min_dur = d;
                let ub = self.omega.saturating_sub(d);
                if ub < self.lst {
                    self.lst = ub;
                    self.settle();
                }
            }
        }
        true
    }

    /// Smallest employee requirement among remaining modes.
    pub fn min_req(&self) -> u32 {
        self.modes.iter().map(|m| m.employees_required).min().unwrap_or(0)
    }

    pub fn max_req(&self) -> u32 {
        self.modes.iter().map(|m| m.employees_required).max().unwrap_or(0)
    }
}

struct Conflict;

pub(crate) struct Search<'a> {
    pub(crate) prep: &'a Prep<'a>,
    cfg: &'a SearchConfig,
    cancel: Option<&'a AtomicBool>,
    deadline: Instant,
    pub(crate) rng: ChaCha8Rng,
    pub(crate) committed: Vec<Option<JobAssignment>>,
    committed_count: usize,
    /// Committed intervals per unit id, sorted by start.
    pub(crate) occ: Vec<Vec<(Slot, Slot, JobId)>>,
    proj_s2: Vec<Penalty>,
    proj_s4: Vec<Penalty>,
    proj_committed: Vec<Vec<JobId>>,
    proj_emp_counts: Vec<HashMap<EmployeeId, u32>>,
    emp_assignments_committed: u64,
    best: Option<(Solution, PenaltyBreakdown)>,
    nodes: u64,
    pub(crate) stopped: bool,
    // propagation scratch space, reused across nodes
    scratch_profile: Vec<u32>,
    scratch_next_over: Vec<Slot>,
}

impl<'a> Search<'a> {
    pub fn new(
        prep: &'a Prep<'a>,
        cfg: &'a SearchConfig,
        cancel: Option<&'a AtomicBool>,
        started: Instant,
    ) -> Self {
        let inst = prep.inst;
        Search {
            prep,
            cfg,
            cancel,
            deadline: started + Duration::from_secs_f64(cfg.time_limit),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            committed: vec![None; inst.jobs.len()],
            committed_count: 0,
            occ: vec![Vec::new(); prep.unit_count],
            proj_s2: vec![0; inst.projects.len()],
            proj_s4: vec![0; inst.projects.len()],
            proj_committed: vec![Vec::new(); inst.projects.len()],
            proj_emp_counts: vec![HashMap::new(); inst.projects.len()],
            emp_assignments_committed: 0,
            best: None,
            nodes: 0,
            stopped: false,
            scratch_profile: Vec::new(),
            scratch_next_over: Vec::new(),
        }
    }

    pub fn run(&mut self) -> (SolveStatus, Option<(Solution, PenaltyBreakdown)>, u64) {
        let inst = self.prep.inst;
        let domains: Vec<JobDomain> = inst.jobs.iter().map(JobDomain::new).collect();

        // Started jobs are forced to their initial assignment; commit them up
        // front so the search only branches on genuinely open decisions.
        let mut roots = Vec::new();
        for (j, job) in inst.jobs.iter().enumerate() {
            if !job.started {
                continue;
            }
            let a = initial_assignment(inst, job);
            if !self.feasible_against_committed(j, &a, &domains) {
                return (SolveStatus::Infeasible, None, self.nodes);
            }
            self.commit(j, a);
            roots.push(j);
        }

        self.dfs(domains, &roots);

        let status = if self.stopped {
            if self.best.is_some() { SolveStatus::Feasible } else { SolveStatus::Unknown }
        } else if self.best.is_some() {
            SolveStatus::Optimal
        } else {
            SolveStatus::Infeasible
        };
        (status, self.best.take(), self.nodes)
    }

    pub(crate) fn config(&self) -> &'a SearchConfig {
        self.cfg
    }

    pub(crate) fn should_stop(&mut self) -> bool {
        if self.stopped {
            return true;
        }
        if Instant::now() >= self.deadline
            || self.cancel.map(|c| c.load(Ordering::Relaxed)).unwrap_or(false)
        {
            self.stopped = true;
        }
        self.stopped
    }

    pub(crate) fn dfs(&mut self, mut domains: Vec<JobDomain>, recent: &[JobId]) {
        if self.should_stop() {
            return;
        }
        if self.propagate(&mut domains, recent).is_err() {
            return;
        }
        if self.committed_count == self.prep.inst.jobs.len() {
            self.register_leaf();
            return;
        }
        let lb = self.bound(&domains);
        if self.pruned(lb) {
            return;
        }
        let j = self.select(&domains);
        self.expand(j, &domains);
    }

    /// Lowest current earliest start; ties broken by lowest job id.
    fn select(&self, domains: &[JobDomain]) -> JobId {
        let mut best: Option<(Slot, JobId)> = None;
        for (j, dom) in domains.iter().enumerate() {
            if self.committed[j].is_some() {
                continue;
            }
            let key = (dom.est, j);
            if best.map(|b| key < b).unwrap_or(true) {
                best = Some(key);
            }
        }
        best.expect("select requires an unassigned job").1
    }

    fn pruned(&self, lower_bound: Penalty) -> bool {
        if let Some((_, best)) = &self.best {
            if lower_bound >= best.total {
                return true;
            }
        }
        if let Some(cutoff) = self.cfg.objective_cutoff {
            if lower_bound > cutoff {
                return true;
            }
        }
        false
    }

    fn register_leaf(&mut self) {
        let solution = Solution::new(
            self.committed.iter().map(|a| a.clone().expect("complete leaf")).collect(),
        );
        debug_assert!(
            evaluator::check_hard(self.prep.inst, &solution)
                .map(|r| r.is_feasible())
                .unwrap_or(false),
            "search leaves must be hard-feasible"
        );
        let breakdown = evaluator::penalty(self.prep.inst, &solution);
        if let Some(cutoff) = self.cfg.objective_cutoff {
            if breakdown.total > cutoff {
                return;
            }
        }
        if self.best.as_ref().map(|(_, b)| breakdown.total < b.total).unwrap_or(true) {
            self.best = Some((solution, breakdown));
            if self.cfg.first_solution_only {
                self.stopped = true;
            }
        }
    }

    // ------------------------------------------------------------------
    // commit bookkeeping

    pub(crate) fn commit(&mut self, j: JobId, a: JobAssignment) {
        let inst = self.prep.inst;
        let job = &inst.jobs[j];
        let end = a.start + job.duration_in(a.mode).expect("available mode");
        for unit in self.prep.units_of(&a) {
            let list = &mut self.occ[unit];
            let pos = list.partition_point(|&(s, _, _)| s < a.start);
            list.insert(pos, (a.start, end, j));
        }
        let p = job.project;
        self.proj_s2[p] += evaluator::non_preferred_count(job, &a);
        self.proj_s4[p] += evaluator::due_date_overrun(job, &a);
        self.proj_committed[p].push(j);
        for &e in &a.employees {
            *self.proj_emp_counts[p].entry(e).or_insert(0) += 1;
        }
        self.emp_assignments_committed += a.employees.len() as u64;
        self.committed[j] = Some(a);
        self.committed_count += 1;
    }

    pub(crate) fn uncommit(&mut self, j: JobId) {
        let a = self.committed[j].take().expect("uncommit of committed job");
        self.committed_count -= 1;
        let inst = self.prep.inst;
        let job = &inst.jobs[j];
        for unit in self.prep.units_of(&a) {
            let list = &mut self.occ[unit];
            let pos = list.iter().position(|&(_, _, owner)| owner == j).expect("interval present");
            list.remove(pos);
        }
        let p = job.project;
        self.proj_s2[p] -= evaluator::non_preferred_count(job, &a);
        self.proj_s4[p] -= evaluator::due_date_overrun(job, &a);
        let pos = self.proj_committed[p].iter().position(|&k| k == j).expect("job in project list");
        self.proj_committed[p].remove(pos);
        for &e in &a.employees {
            let count = self.proj_emp_counts[p].get_mut(&e).expect("employee counted");
            *count -= 1;
            if *count == 0 {
                self.proj_emp_counts[p].remove(&e);
            }
        }
        self.emp_assignments_committed -= a.employees.len() as u64;
    }

    pub(crate) fn record_node(&mut self) {
        self.nodes += 1;
    }

    /// Whether `[start, end)` is free on `unit`.
    pub(crate) fn unit_free(&self, unit: usize, start: Slot, end: Slot) -> bool {
        for &(s, e, _) in &self.occ[unit] {
            if s >= end {
                break;
            }
            if e > start {
                return false;
            }
        }
        true
    }

    /// Necessary feasibility of committing `a` for job `j` given the current
    /// partial assignment: window, precedence, linked employees, unit
    /// occupancy. Full consistency is re-established by propagation after the
    /// commit.
    pub(crate) fn feasible_against_committed(&self, j: JobId, a: &JobAssignment, domains: &[JobDomain]) -> bool {
        let inst = self.prep.inst;
        let job = &inst.jobs[j];
        let Some(duration) = job.duration_in(a.mode) else { return false };
        let end = a.start + duration;
        if a.start < job.alpha || end > job.omega {
            return false;
        }
        for &k in &job.predecessors {
            match &self.committed[k] {
                Some(pred) => {
                    let pend = pred.start + inst.jobs[k].duration_in(pred.mode).expect("available mode");
                    if pend > a.start {
                        return false;
                    }
                }
                None => {
                    let dom = &domains[k];
                    if dom.est + dom.min_dur > a.start {
                        return false;
                    }
                }
            }
        }
        for &k in &self.prep.successors[j] {
            match &self.committed[k] {
                Some(succ) => {
                    if end > succ.start {
                        return false;
                    }
                }
                None => {
                    if end > domains[k].lst {
                        return false;
                    }
                }
            }
        }
        for &k in &self.prep.link_class[j] {
            if k == j {
                continue;
            }
            if let Some(mate) = &self.committed[k] {
                if mate.employees != a.employees {
                    return false;
                }
            }
        }
        for unit in self.prep.units_of(a) {
            if !self.unit_free(unit, a.start, end) {
                return false;
            }
        }
        true
    }

    // ------------------------------------------------------------------
    // propagation

    fn propagate(&mut self, domains: &mut [JobDomain], recent: &[JobId]) -> Result<(), Conflict> {
        self.timetable_for_commits(domains, recent)?;
        self.bounds_fixpoint(domains)?;
        if self.cfg.redundant.per_resource_cumulative || self.cfg.redundant.aggregate_cumulative {
            // Two filter/tighten rounds are enough in practice; propagation
            // stays sound if a later round would still have removed values.
            for _ in 0..2 {
                if !self.cumulative_pass(domains)? {
                    break;
                }
                self.bounds_fixpoint(domains)?;
            }
        }
        Ok(())
    }

    fn bounds_fixpoint(&mut self, domains: &mut [JobDomain]) -> Result<(), Conflict> {
        loop {
            let mut changed = self.bounds_pass(domains)?;
            if self.cfg.redundant.assignment_cardinality {
                changed |= self.cardinality_pass(domains)?;
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Window, precedence, mode-fit, and linked-employee propagation.
    fn bounds_pass(&mut self, domains: &mut [JobDomain]) -> Result<bool, Conflict> {
        let inst = self.prep.inst;
        let mut changed = false;
        for j in 0..inst.jobs.len() {
            if self.committed[j].is_some() {
                continue;
            }
            let job = &inst.jobs[j];

            let mut lb = job.alpha;
            for &k in &job.predecessors {
                let bound = match &self.committed[k] {
                    Some(pred) => pred.start + inst.jobs[k].duration_in(pred.mode).expect("available"),
                    None => domains[k].est + domains[k].min_dur,
                };
                lb = lb.max(bound);
            }
            let mut ub = job.omega.saturating_sub(domains[j].min_dur);
            for &k in &self.prep.successors[j] {
                let latest_succ_start = match &self.committed[k] {
                    Some(succ) => succ.start,
                    None => domains[k].lst,
                };
                ub = ub.min(latest_succ_start.saturating_sub(domains[j].min_dur));
            }
            changed |= domains[j].narrow(lb, ub);
            if domains[j].is_empty() {
                return Err(Conflict);
            }

            // Modes that no longer fit the window.
            let est = domains[j].est;
            let omega = domains[j].omega;
            changed |= domains[j].retain_modes(|m| est + m.duration <= omega);
            if domains[j].is_empty() {
                return Err(Conflict);
            }

            // A committed linked job fixes this job's employees.
            if domains[j].forced_employees.is_none() {
                let mate = self.prep.link_class[j]
                    .iter()
                    .filter(|&&k| k != j)
                    .find_map(|&k| self.committed[k].as_ref());
                if let Some(mate) = mate {
                    let forced = mate.employees.clone();
                    if !forced.iter().all(|e| job.qualified.contains(e)) {
                        return Err(Conflict);
                    }
                    let count = forced.len() as u32;
                    domains[j].retain_modes(|m| m.employees_required == count);
                    if domains[j].is_empty() {
                        return Err(Conflict);
                    }
                    // Every committed interval on the forced units now bars
                    // overlapping starts.
                    let units: Vec<usize> = forced.iter().map(|&e| self.prep.employee_unit(e)).collect();
                    domains[j].forced_employees = Some(forced);
                    self.forbid_unit_overlaps(&mut domains[j], &units)?;
                    changed = true;
                }
            }
        }
        Ok(changed)
    }

    /// Removes starts of `dom` overlapping any committed interval on `units`.
    fn forbid_unit_overlaps(&self, dom: &mut JobDomain, units: &[usize]) -> Result<(), Conflict> {
        for &unit in units {
            for &(s, f, _) in &self.occ[unit] {
                let lo = s.saturating_sub(dom.min_dur - 1);
                dom.forbid_range(lo, f - 1);
            }
        }
        if dom.is_empty() {
            return Err(Conflict);
        }
        Ok(())
    }

    /// Time-table filtering for freshly committed jobs: their intervals bar
    /// overlapping starts of any unassigned job that must share one of the
    /// occupied units.
    fn timetable_for_commits(&mut self, domains: &mut [JobDomain], recent: &[JobId]) -> Result<(), Conflict> {
        let inst = self.prep.inst;
        for &c in recent {
            let a = self.committed[c].as_ref().expect("recent job is committed");
            let start = a.start;
            let end = a.start + inst.jobs[c].duration_in(a.mode).expect("available mode");
            let units = self.prep.units_of(a);
            for j in 0..inst.jobs.len() {
                if self.committed[j].is_some() {
                    continue;
                }
                let must_use = |unit: &usize| {
                    self.prep.mandatory_units[j].contains(unit)
                        || domains[j]
                            .forced_employees
                            .as_ref()
                            .map(|f| *unit < self.prep.wb_base && f.contains(unit))
                            .unwrap_or(false)
                };
                if units.iter().any(must_use) {
                    let lo = start.saturating_sub(domains[j].min_dur - 1);
                    domains[j].forbid_range(lo, end - 1);
                    if domains[j].is_empty() {
                        return Err(Conflict);
                    }
                }
            }
        }
        Ok(())
    }

    /// Cardinality reasoning on the total number of employee assignments.
    ///
    /// The analogous workbench and equipment bounds are constants of the
    /// instance (their requirements do not depend on the mode) and hold with
    /// equality, so only the employee side can prune.
    fn cardinality_pass(&mut self, domains: &mut [JobDomain]) -> Result<bool, Conflict> {
        let inst = self.prep.inst;
        let committed = self.emp_assignments_committed;
        let mut sum_min: u64 = 0;
        let mut sum_max: u64 = 0;
        for j in 0..inst.jobs.len() {
            if self.committed[j].is_none() {
                sum_min += domains[j].min_req() as u64;
                sum_max += domains[j].max_req() as u64;
            }
        }
        if committed + sum_min > self.prep.emp_assign_hi || committed + sum_max < self.prep.emp_assign_lo {
            return Err(Conflict);
        }
        let mut changed = false;
        for j in 0..inst.jobs.len() {
            if self.committed[j].is_some() {
                continue;
            }
            let others_min = sum_min - domains[j].min_req() as u64;
            let others_max = sum_max - domains[j].max_req() as u64;
            let hi = self.prep.emp_assign_hi;
            let lo = self.prep.emp_assign_lo;
            let removed = domains[j].retain_modes(|m| {
                let r = m.employees_required as u64;
                committed + others_min + r <= hi && committed + others_max + r >= lo
            });
            if removed {
                changed = true;
                if domains[j].is_empty() {
                    return Err(Conflict);
                }
            }
        }
        Ok(changed)
    }

    /// Global cumulative reasoning over compulsory parts: the per-kind bounds
    /// and, when enabled, the relaxed aggregate over all kinds combined.
    fn cumulative_pass(&mut self, domains: &mut [JobDomain]) -> Result<bool, Conflict> {
        let inst = self.prep.inst;
        let mut changed = false;

        if self.cfg.redundant.per_resource_cumulative {
            // employees: requirement depends on the (current) modes
            let req = |s: &Self, j: JobId, d: &[JobDomain]| -> u32 {
                match &s.committed[j] {
                    Some(a) => a.employees.len() as u32,
                    None => d[j].min_req(),
                }
            };
            changed |= self.cumulative_kind(domains, inst.employees as u32, &req, false)?;

            let req_wb = |s: &Self, j: JobId, _: &[JobDomain]| -> u32 {
                match &s.committed[j] {
                    Some(a) => u32::from(a.workbench.is_some()),
                    None => u32::from(inst.jobs[j].workbench_required),
                }
            };
            changed |= self.cumulative_kind(domains, inst.workbenches as u32, &req_wb, false)?;

            for g in 0..inst.equipment_groups.len() {
                let req_eq = move |s: &Self, j: JobId, _: &[JobDomain]| -> u32 {
                    match &s.committed[j] {
                        Some(a) => a.devices[g].len() as u32,
                        None => inst.jobs[j].equipment_required[g],
                    }
                };
                changed |= self.cumulative_kind(domains, inst.equipment_groups[g] as u32, &req_eq, false)?;
            }
        }

        if self.cfg.redundant.aggregate_cumulative {
            let req = |s: &Self, j: JobId, _: &[JobDomain]| -> u32 { s.prep.agg_req[j] };
            changed |= self.cumulative_kind(domains, self.prep.agg_cap, &req, true)?;
        }

        Ok(changed)
    }

    /// One time-table check-and-filter round for a single cumulative bound.
    ///
    /// Committed jobs contribute their full interval; unassigned jobs their
    /// compulsory part `[lst, est + min_dur)`. A start is removed only when
    /// even the job's shortest remaining duration and smallest requirement
    /// would overload some slot, so no feasible completion is ever lost.
    fn cumulative_kind(
        &mut self,
        domains: &mut [JobDomain],
        cap: u32,
        req: &dyn Fn(&Self, JobId, &[JobDomain]) -> u32,
        static_duration: bool,
    ) -> Result<bool, Conflict> {
        let inst = self.prep.inst;
        let horizon = inst.end_of_horizon() as usize + 1;
        let mut profile = std::mem::take(&mut self.scratch_profile);
        profile.clear();
        profile.resize(horizon, 0);

        let duration_of = |s: &Self, j: JobId, d: &[JobDomain]| -> Slot {
            if static_duration {
                s.prep.agg_dur[j]
            } else {
                match &s.committed[j] {
                    Some(a) => inst.jobs[j].duration_in(a.mode).expect("available mode"),
                    None => d[j].min_dur,
                }
            }
        };

        // compulsory part of each job
        let mut conflict = false;
        let mut parts: Vec<Option<(Slot, Slot, u32)>> = vec![None; inst.jobs.len()];
        'build: for j in 0..inst.jobs.len() {
            let r = req(self, j, domains);
            if r == 0 {
                continue;
            }
            let (lo, hi) = match &self.committed[j] {
                Some(a) => (a.start, a.start + duration_of(self, j, domains)),
                None => {
                    let dom = &domains[j];
                    let lo = dom.lst;
                    let hi = dom.est + duration_of(self, j, domains);
                    if lo >= hi {
                        continue;
                    }
                    (lo, hi)
                }
            };
            parts[j] = Some((lo, hi, r));
            for t in lo..hi {
                profile[t as usize] += r;
                if profile[t as usize] > cap {
                    conflict = true;
                    break 'build;
                }
            }
        }

        // for each open job: the next slot at or after t where its minimum
        // requirement on top of everyone else's compulsory usage would
        // overload, then drop the starts whose whole window hits one
        let mut changed = false;
        let mut next_over = std::mem::take(&mut self.scratch_next_over);
        if !conflict {
            for j in 0..inst.jobs.len() {
                if self.committed[j].is_some() {
                    continue;
                }
                let r = req(self, j, domains);
                if r == 0 {
                    continue;
                }
                let dur = duration_of(self, j, domains);
                if dur == 0 {
                    continue;
                }
                let own = parts[j];
                let other = |t: Slot| -> u32 {
                    let mut u = profile[t as usize];
                    if let Some((lo, hi, own_r)) = own {
                        if t >= lo && t < hi {
                            u -= own_r;
                        }
                    }
                    u
                };
                next_over.clear();
                next_over.resize(horizon + 1, Slot::MAX);
                for t in (0..horizon).rev() {
                    next_over[t] = if other(t as Slot) + r > cap { t as Slot } else { next_over[t + 1] };
                }
                let (est, lst) = (domains[j].est, domains[j].lst);
                for v in est..=lst {
                    if domains[j].allowed(v) && next_over[v as usize] < v + dur {
                        changed |= domains[j].forbid_range(v, v);
                    }
                }
                if domains[j].is_empty() {
                    conflict = true;
                    break;
                }
            }
        }

        self.scratch_profile = profile;
        self.scratch_next_over = next_over;
        if conflict {
            return Err(Conflict);
        }
        Ok(changed)
    }

    // ------------------------------------------------------------------
    // bounding

    /// Admissible lower bound on any completion of the current node, summed
    /// over per-project contribution bounds: committed terms, the unavoidable
    /// non-preferred and overrun terms of the open jobs, the unavoidable
    /// employee and span contributions of the remainder, all raised to the
    /// project's static floor (and any caller-provided floor).
    fn bound(&self, domains: &[JobDomain]) -> Penalty {
        let inst = self.prep.inst;
        let mut total = 0;

        for (p, project) in inst.projects.iter().enumerate() {
            if project.jobs.is_empty() {
                continue;
            }
            let mut contribution = project.jobs.len() as Penalty + self.proj_s2[p] + self.proj_s4[p];
            for &j in &project.jobs {
                if self.committed[j].is_some() {
                    continue;
                }
                let job = &inst.jobs[j];
                let dom = &domains[j];
                // non-preferred assignments: an employee set dictated by a
                // linked job is exact; otherwise at best every preferred
                // employee serves
                contribution += match &dom.forced_employees {
                    Some(forced) => {
                        forced.iter().filter(|e| !job.preferred.contains(e)).count() as Penalty
                    }
                    None => {
                        let preferred = job.preferred.len() as u32;
                        dom.modes
                            .iter()
                            .map(|m| m.employees_required.saturating_sub(preferred) as Penalty)
                            .min()
                            .unwrap_or(0)
                    }
                };
                // due-date overrun: nothing ends before est + min duration
                contribution += Penalty::from((dom.est + dom.min_dur).saturating_sub(job.omega_bar));
            }
            // distinct employees: those already in use or forced, at least
            // the largest per-job requirement still open, and the summed
            // requirements of jobs that cannot avoid overlapping
            let mut forced_extra = 0u64;
            let mut max_need = 0u64;
            let committed_distinct = self.proj_emp_counts[p].len() as u64;
            let open: Vec<JobId> =
                project.jobs.iter().copied().filter(|&j| self.committed[j].is_none()).collect();
            for &j in &open {
                if let Some(forced) = &domains[j].forced_employees {
                    let unseen = forced
                        .iter()
                        .filter(|e| !self.proj_emp_counts[p].contains_key(e))
                        .count() as u64;
                    forced_extra = forced_extra.max(unseen);
                }
                max_need = max_need.max(domains[j].min_req() as u64);
            }
            // overlapping jobs can never share an employee
            let earliest_end = |j: JobId| domains[j].est + domains[j].min_dur;
            for (i, &a) in open.iter().enumerate() {
                for &b in open.iter().skip(i + 1) {
                    let forced_pair = domains[a].lst < earliest_end(b) && domains[b].lst < earliest_end(a);
                    if forced_pair {
                        max_need =
                            max_need.max(domains[a].min_req() as u64 + domains[b].min_req() as u64);
                    }
                }
                for &c in &self.proj_committed[p] {
                    let assignment = self.committed[c].as_ref().expect("committed");
                    let c_end =
                        assignment.start + inst.jobs[c].duration_in(assignment.mode).expect("available");
                    if domains[a].lst < c_end && assignment.start < earliest_end(a) {
                        max_need = max_need
                            .max(assignment.employees.len() as u64 + domains[a].min_req() as u64);
                    }
                }
            }
            let s3_lb = (committed_distinct + forced_extra).max(max_need);

            // span: combine committed interval hull with guaranteed ends and
            // latest starts of the open jobs, and the critical path among them
            let mut min_start_ub = Slot::MAX;
            let mut max_end_lb: Slot = 0;
            for &j in &project.jobs {
                match &self.committed[j] {
                    Some(a) => {
                        let end = a.start + inst.jobs[j].duration_in(a.mode).expect("available");
                        min_start_ub = min_start_ub.min(a.start);
                        max_end_lb = max_end_lb.max(end);
                    }
                    None => {
                        min_start_ub = min_start_ub.min(domains[j].lst);
                        max_end_lb = max_end_lb.max(domains[j].est + domains[j].min_dur);
                    }
                }
            }
            let hull = Penalty::from(max_end_lb.saturating_sub(min_start_ub));
            let path = self.critical_path_open(p, domains);
            contribution += s3_lb + hull.max(path);

            let mut floor = self.prep.project_floor[p];
            if let Some(floors) = &self.cfg.project_floors {
                floor = floor.max(floors[p]);
            }
            total += contribution.max(floor);
        }
        total
    }

    /// Longest chain of minimum durations through the project's unassigned
    /// jobs.
    fn critical_path_open(&self, p: ProjectId, domains: &[JobDomain]) -> Penalty {
        let inst = self.prep.inst;
        let jobs = &inst.projects[p].jobs;
        let mut longest: HashMap<JobId, Penalty> = HashMap::new();
        fn visit(
            j: JobId,
            inst: &Instance,
            committed: &[Option<JobAssignment>],
            domains: &[JobDomain],
            longest: &mut HashMap<JobId, Penalty>,
        ) -> Penalty {
            if let Some(&v) = longest.get(&j) {
                return v;
            }
            let mut best: Penalty = 0;
            for &k in &inst.jobs[j].predecessors {
                if committed[k].is_none() {
                    best = best.max(visit(k, inst, committed, domains, longest));
                }
            }
            let value = best + Penalty::from(domains[j].min_dur);
            longest.insert(j, value);
            value
        }
        let mut best = 0;
        for &j in jobs {
            if self.committed[j].is_none() {
                best = best.max(visit(j, inst, &self.committed, domains, &mut longest));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Project, NameTable};
    use crate::refcheck;
    use crate::solver::SearchConfig;

    /// Workbench-0-only jobs: A with duration 3, B with duration 3 and window
    /// covering slots 1..=8 (deadline boundary 9).
    fn bench_bound_instance() -> Instance {
        let job = |duration: Slot| Job {
            project: 0,
            alpha: 1,
            omega: 9,
            omega_bar: 9,
            modes: vec![JobMode { mode: 0, duration, employees_required: 0 }],
            qualified: vec![],
            preferred: vec![],
            workbench_required: true,
            available_workbenches: vec![0],
            equipment_required: vec![],
            available_devices: vec![],
            predecessors: vec![],
            linked: vec![],
            started: false,
            initial: None,
        };
        Instance {
            id: "TT".to_string(),
            horizon: 8,
            employees: 0,
            workbenches: 1,
            equipment_groups: vec![],
            mode_names: vec!["external".to_string()],
            projects: vec![Project { name: "P0".to_string(), jobs: vec![0, 1] }],
            jobs: vec![job(3), job(3)],
            names: NameTable::default(),
        }
    }

    #[test]
    fn timetable_filtering_leaves_only_the_gap_start() {
        let inst = bench_bound_instance();
        let cfg = SearchConfig::default();
        let prep = Prep::new(&inst);
        let mut search = Search::new(&prep, &cfg, None, Instant::now());
        let mut domains: Vec<JobDomain> = inst.jobs.iter().map(JobDomain::new).collect();

        // fix job 0 at [3, 6) on the only workbench
        search.commit(0, JobAssignment { mode: 0, start: 3, employees: vec![], workbench: Some(0), devices: vec![] });
        search.propagate(&mut domains, &[0]).ok().expect("no conflict");

        let remaining: Vec<Slot> = (domains[1].est..=domains[1].lst)
            .filter(|&v| domains[1].allowed(v))
            .collect();
        assert_eq!(remaining, vec![6]);

        // the per-slot occupancy scan agrees
        let oracle = refcheck::feasible_starts_against(&inst, 1, 0, &[(3, 6)]);
        assert_eq!(remaining, oracle);
    }

    #[test]
    fn propagation_without_commitments_changes_nothing() {
        let inst = bench_bound_instance();
        let cfg = SearchConfig::default();
        let prep = Prep::new(&inst);
        let mut search = Search::new(&prep, &cfg, None, Instant::now());
        let mut domains: Vec<JobDomain> = inst.jobs.iter().map(JobDomain::new).collect();
        search.propagate(&mut domains, &[]).ok().expect("no conflict");
        for dom in &domains {
            let starts: Vec<Slot> = (dom.est..=dom.lst).filter(|&v| dom.allowed(v)).collect();
            assert_eq!(starts, (1..=6).collect::<Vec<_>>());
            assert_eq!(dom.modes.len(), 1);
        }
    }

    #[test]
    fn aggregate_cumulative_detects_root_overload() {
        // three unit-duration jobs each needing 2 of 4 employees, all pinned
        // to slot 1: 6 > 4 proves infeasibility before any branching
        let job = || Job {
            project: 0,
            alpha: 1,
            omega: 2,
            omega_bar: 2,
            modes: vec![JobMode { mode: 0, duration: 1, employees_required: 2 }],
            qualified: vec![0, 1, 2, 3],
            preferred: vec![],
            workbench_required: false,
            available_workbenches: vec![],
            equipment_required: vec![],
            available_devices: vec![],
            predecessors: vec![],
            linked: vec![],
            started: false,
            initial: None,
        };
        let inst = Instance {
            id: "OVR".to_string(),
            horizon: 4,
            employees: 4,
            workbenches: 0,
            equipment_groups: vec![],
            mode_names: vec!["single".to_string()],
            projects: vec![Project { name: "P0".to_string(), jobs: vec![0, 1, 2] }],
            jobs: vec![job(), job(), job()],
            names: NameTable::default(),
        };
        let mut cfg = SearchConfig { time_limit: 30.0, ..SearchConfig::default() };
        cfg.redundant.aggregate_cumulative = true;
        let prep = Prep::new(&inst);
        let mut search = Search::new(&prep, &cfg, None, Instant::now());
        let mut domains: Vec<JobDomain> = inst.jobs.iter().map(JobDomain::new).collect();
        assert!(search.propagate(&mut domains, &[]).is_err());
    }
}

/// Concrete assignment carried by a started job's initial data.
fn initial_assignment(inst: &Instance, job: &Job) -> JobAssignment {
    let init = job.initial.as_ref().expect("validated started job");
    let mut employees = init.employees.clone().unwrap_or_default();
    employees.sort_unstable();
    let mut devices = init
        .devices
        .clone()
        .unwrap_or_else(|| vec![Vec::new(); inst.equipment_groups.len()]);
    for d in &mut devices {
        d.sort_unstable();
    }
    JobAssignment {
        mode: init.mode.expect("validated started job"),
        start: init.start.expect("validated started job"),
        employees,
        workbench: init.workbench,
        devices,
    }
}
