//! Child enumeration for the selected job, in strategy order.
//!
//! Start values ascend; modes go shortest-duration first; resource units
//! follow the strategy's availability ordering (or a seeded shuffle when
//! randomized). A hot-start assignment, when present and still admissible, is
//! always the first child tried.

use super::engine::{JobDomain, Search};
use crate::model::*;
use rand::seq::SliceRandom;

impl<'a> Search<'a> {
    pub(crate) fn expand(&mut self, j: JobId, domains: &Vec<JobDomain>) {
        let dom = &domains[j];
        let starts: Vec<Slot> = (dom.est..=dom.lst).filter(|&v| dom.allowed(v)).collect();
        let mut modes: Vec<JobMode> = dom.modes.clone();
        modes.sort_by_key(|m| (m.duration, m.mode));
        let forced = dom.forced_employees.clone();

        let hot = self.hot_assignment(j, dom);
        if let Some(hot_child) = &hot {
            self.try_child(j, hot_child.clone(), domains);
            if self.stopped {
                return;
            }
        }

        // Unit preference orders are computed once per expansion from the
        // job's whole window.
        let job = &self.prep.inst.jobs[j];
        let window = (job.alpha, job.omega);
        let employee_order: Vec<EmployeeId> = match &forced {
            Some(f) => f.clone(),
            None => {
                let units: Vec<usize> = job.qualified.iter().map(|&e| self.prep.employee_unit(e)).collect();
                self.order_units(&job.qualified, &units, window, Some(&job.preferred))
            }
        };
        let bench_units: Vec<usize> =
            job.available_workbenches.iter().map(|&b| self.prep.workbench_unit(b)).collect();
        let bench_order = self.order_units(&job.available_workbenches, &bench_units, window, None);
        let device_orders: Vec<Vec<DeviceId>> = (0..self.prep.inst.equipment_groups.len())
            .map(|g| {
                let units: Vec<usize> =
                    job.available_devices[g].iter().map(|&d| self.prep.device_unit(g, d)).collect();
                self.order_units(&job.available_devices[g], &units, window, None)
            })
            .collect();

        let ctx = Expansion {
            j,
            forced,
            employee_order,
            bench_order,
            device_orders,
            hot,
        };

        if self.cfg_strategy_mode_first() {
            for mode in &modes {
                for &start in &starts {
                    if start + mode.duration > dom.omega {
                        continue;
                    }
                    self.enumerate_resources(&ctx, start, mode, domains);
                    if self.stopped {
                        return;
                    }
                }
            }
        } else {
            for &start in &starts {
                for mode in &modes {
                    if start + mode.duration > dom.omega {
                        continue;
                    }
                    self.enumerate_resources(&ctx, start, mode, domains);
                    if self.stopped {
                        return;
                    }
                }
            }
        }
    }

    fn cfg_strategy_mode_first(&self) -> bool {
        self.config().strategy.mode_before_start()
    }

    /// Orders candidate units: seeded shuffle when randomized, otherwise by
    /// free-slot count within the job's window (descending for the
    /// most-available-first strategies, ascending for the first-fail ones).
    /// Slack ties go to preferred employees first, then lowest unit id, so
    /// the first dive favors penalty-free assignments.
    fn order_units(
        &mut self,
        ids: &[usize],
        units: &[usize],
        window: (Slot, Slot),
        preferred: Option<&[usize]>,
    ) -> Vec<usize> {
        let order: Vec<usize> = ids.to_vec();
        if self.config().randomized_resource_order {
            let mut indices: Vec<usize> = (0..order.len()).collect();
            indices.shuffle(&mut self.rng);
            return indices.into_iter().map(|i| order[i]).collect();
        }
        let slack: Vec<Slot> = units.iter().map(|&u| self.free_slack(u, window)).collect();
        let prefer_available = self.config().strategy.prefers_available();
        let mut keyed: Vec<(usize, usize)> = (0..order.len()).map(|i| (i, ids[i])).collect();
        keyed.sort_by_key(|&(i, id)| {
            let s = if prefer_available { Slot::MAX - slack[i] } else { slack[i] };
            let unpreferred = preferred.map(|p| !p.contains(&id)).unwrap_or(false);
            (s, unpreferred, id)
        });
        keyed.into_iter().map(|(_, id)| id).collect()
    }

    /// Drops candidates interchangeable with an earlier one: units in the
    /// same class with no commitments at all are symmetric, so one decision
    /// never needs more of them than it can assign. Committed-upon units stay
    /// (their timetables distinguish them).
    fn truncate_interchangeable(
        &self,
        ordered: Vec<usize>,
        unit_of: impl Fn(&Self, usize) -> usize,
        keep_per_class: usize,
    ) -> Vec<usize> {
        let mut kept_per_class: Vec<(u32, usize)> = Vec::new();
        ordered
            .into_iter()
            .filter(|&id| {
                let unit = unit_of(self, id);
                if !self.occ[unit].is_empty() {
                    return true;
                }
                let class = self.prep.unit_class[unit];
                match kept_per_class.iter_mut().find(|(c, _)| *c == class) {
                    Some((_, count)) => {
                        if *count < keep_per_class {
                            *count += 1;
                            true
                        } else {
                            false
                        }
                    }
                    None => {
                        kept_per_class.push((class, 1));
                        keep_per_class > 0
                    }
                }
            })
            .collect()
    }

    /// Free slots for `unit` within `[window.0, window.1)`.
    fn free_slack(&self, unit: usize, window: (Slot, Slot)) -> Slot {
        let (lo, hi) = window;
        let mut busy: Slot = 0;
        for &(s, e, _) in &self.occ[unit] {
            if s >= hi {
                break;
            }
            let overlap_lo = s.max(lo);
            let overlap_hi = e.min(hi);
            if overlap_hi > overlap_lo {
                busy += overlap_hi - overlap_lo;
            }
        }
        (hi - lo).saturating_sub(busy)
    }

    fn enumerate_resources(
        &mut self,
        ctx: &Expansion,
        start: Slot,
        mode: &JobMode,
        domains: &Vec<JobDomain>,
    ) {
        let end = start + mode.duration;
        let j = ctx.j;
        let job = &self.prep.inst.jobs[j];

        // Employee choices. Busy units can never serve this interval; keep
        // only the free ones, in preference order, and among fully
        // uncommitted interchangeable units only as many as one choice can
        // use.
        let employee_sets: Vec<Vec<EmployeeId>> = if let Some(forced) = &ctx.forced {
            if forced.len() as u32 != mode.employees_required {
                return;
            }
            if forced.iter().any(|&e| !self.unit_free(self.prep.employee_unit(e), start, end)) {
                return;
            }
            vec![forced.clone()]
        } else {
            let free: Vec<EmployeeId> = ctx
                .employee_order
                .iter()
                .copied()
                .filter(|&e| self.unit_free(self.prep.employee_unit(e), start, end))
                .collect();
            let free = self.truncate_interchangeable(
                free,
                |s, e| s.prep.employee_unit(e),
                mode.employees_required as usize,
            );
            if (free.len() as u32) < mode.employees_required {
                return;
            }
            subsets(&free, mode.employees_required as usize)
        };

        let bench_choices: Vec<Option<WorkbenchId>> = if job.workbench_required {
            let free: Vec<WorkbenchId> = ctx
                .bench_order
                .iter()
                .copied()
                .filter(|&b| self.unit_free(self.prep.workbench_unit(b), start, end))
                .collect();
            let free = self.truncate_interchangeable(free, |s, b| s.prep.workbench_unit(b), 1);
            if free.is_empty() {
                return;
            }
            free.into_iter().map(Some).collect()
        } else {
            vec![None]
        };

        let mut device_choices: Vec<Vec<Vec<DeviceId>>> = Vec::new();
        for (g, order) in ctx.device_orders.iter().enumerate() {
            let req = job.equipment_required[g] as usize;
            let free: Vec<DeviceId> = order
                .iter()
                .copied()
                .filter(|&d| self.unit_free(self.prep.device_unit(g, d), start, end))
                .collect();
            let free = self.truncate_interchangeable(free, move |s, d| s.prep.device_unit(g, d), req);
            if free.len() < req {
                return;
            }
            device_choices.push(subsets(&free, req));
        }

        for employees in &employee_sets {
            for bench in &bench_choices {
                self.device_product(ctx, start, mode, employees, *bench, &device_choices, 0, &mut Vec::new(), domains);
                if self.stopped {
                    return;
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn device_product(
        &mut self,
        ctx: &Expansion,
        start: Slot,
        mode: &JobMode,
        employees: &[EmployeeId],
        bench: Option<WorkbenchId>,
        device_choices: &[Vec<Vec<DeviceId>>],
        group: usize,
        chosen: &mut Vec<Vec<DeviceId>>,
        domains: &Vec<JobDomain>,
    ) {
        if group == device_choices.len() {
            let mut sorted_employees = employees.to_vec();
            sorted_employees.sort_unstable();
            let mut devices = chosen.clone();
            for d in &mut devices {
                d.sort_unstable();
            }
            let child = JobAssignment { mode: mode.mode, start, employees: sorted_employees, workbench: bench, devices };
            if ctx.hot.as_ref() == Some(&child) {
                return; // already tried first
            }
            self.try_child(ctx.j, child, domains);
            return;
        }
        for devices in &device_choices[group] {
            chosen.push(devices.clone());
            self.device_product(ctx, start, mode, employees, bench, device_choices, group + 1, chosen, domains);
            chosen.pop();
            if self.stopped {
                return;
            }
        }
    }

    fn try_child(&mut self, j: JobId, child: JobAssignment, domains: &Vec<JobDomain>) {
        if self.should_stop() {
            return;
        }
        if !self.feasible_against_committed(j, &child, domains) {
            return;
        }
        self.commit(j, child);
        self.record_node();
        let child_domains = domains.clone();
        self.dfs(child_domains, &[j]);
        self.uncommit(j);
    }

    /// The hot-start value for `j`, if one is configured and still inside the
    /// current domain.
    fn hot_assignment(&self, j: JobId, dom: &JobDomain) -> Option<JobAssignment> {
        let hot = self.config().hot_start.as_ref()?;
        if hot.jobs.len() != self.prep.inst.jobs.len() {
            return None;
        }
        let mut a = hot.jobs[j].clone();
        a.employees.sort_unstable();
        for d in &mut a.devices {
            d.sort_unstable();
        }
        let mode = dom.modes.iter().find(|m| m.mode == a.mode)?;
        if !dom.allowed(a.start) || a.start + mode.duration > dom.omega {
            return None;
        }
        if let Some(forced) = &dom.forced_employees {
            if *forced != a.employees {
                return None;
            }
        }
        Some(a)
    }
}

struct Expansion {
    j: JobId,
    forced: Option<Vec<EmployeeId>>,
    employee_order: Vec<EmployeeId>,
    bench_order: Vec<WorkbenchId>,
    device_orders: Vec<Vec<DeviceId>>,
    hot: Option<JobAssignment>,
}

/// All `k`-element subsets of `items`, lexicographic over positions in the
/// given (already preference-ordered) list.
fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
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
