//! Instance data precomputed once per solve.

use crate::model::*;

/// Global unit-id space: employees first, then workbenches, then all devices
/// group by group. Unary reasoning treats every unit uniformly through these
/// ids.
pub(crate) struct Prep<'a> {
    pub inst: &'a Instance,
    /// Reverse precedence relation.
    pub successors: Vec<Vec<JobId>>,
    /// Link class per job, including the job itself, sorted.
    pub link_class: Vec<Vec<JobId>>,
    /// Units that appear in every feasible resource choice of a job.
    pub mandatory_units: Vec<Vec<usize>>,
    pub unit_count: usize,
    pub wb_base: usize,
    pub group_base: Vec<usize>,
    /// Static cardinality bounds on total employee assignments: sums of the
    /// per-job minimum and maximum mode requirements.
    pub emp_assign_lo: u64,
    pub emp_assign_hi: u64,
    /// Static per-job data for the aggregate relaxed cumulative: shortest
    /// duration and summed minimum requirement across all resource kinds.
    pub agg_dur: Vec<Slot>,
    pub agg_req: Vec<u32>,
    pub agg_cap: u32,
    /// Per-project floor on the final penalty contribution: job count plus
    /// the largest cheapest-mode employee requirement plus the longest chain
    /// of minimum durations.
    pub project_floor: Vec<Penalty>,
    /// Interchangeability class per unit: units of the same kind with
    /// identical availability and preference membership across every job
    /// (and untouched by initial assignments) are symmetric, and branching
    /// only needs a canonical few of the ones no commitment distinguishes.
    pub unit_class: Vec<u32>,
}

impl<'a> Prep<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let n = inst.jobs.len();
        let wb_base = inst.employees;
        let mut group_base = Vec::with_capacity(inst.equipment_groups.len());
        let mut next = wb_base + inst.workbenches;
        for &size in &inst.equipment_groups {
            group_base.push(next);
            next += size;
        }
        let unit_count = next;

        let mut successors = vec![Vec::new(); n];
        for (j, job) in inst.jobs.iter().enumerate() {
            for &k in &job.predecessors {
                successors[k].push(j);
            }
        }

        let link_class = crate::model::link_classes(inst);

        let mut mandatory_units = vec![Vec::new(); n];
        for (j, job) in inst.jobs.iter().enumerate() {
            let units = &mut mandatory_units[j];
            // Every qualified employee is needed whenever even the cheapest
            // mode uses all of them.
            let min_req = job.min_employees_required();
            if min_req > 0 && min_req as usize == job.qualified.len() {
                units.extend(job.qualified.iter().copied());
            }
            if job.workbench_required && job.available_workbenches.len() == 1 {
                units.push(wb_base + job.available_workbenches[0]);
            }
            for (g, &req) in job.equipment_required.iter().enumerate() {
                if req > 0 && req as usize == job.available_devices[g].len() {
                    units.extend(job.available_devices[g].iter().map(|&d| group_base[g] + d));
                }
            }
        }

        let emp_assign_lo = inst.jobs.iter().map(|j| j.min_employees_required() as u64).sum();
        let emp_assign_hi = inst.jobs.iter().map(|j| j.max_employees_required() as u64).sum();

        let agg_dur = inst.jobs.iter().map(|j| j.min_duration()).collect();
        let agg_req = inst
            .jobs
            .iter()
            .map(|j| {
                j.min_employees_required()
                    + u32::from(j.workbench_required)
                    + j.equipment_required.iter().sum::<u32>()
            })
            .collect();
        let agg_cap = (inst.employees
            + inst.workbenches
            + inst.equipment_groups.iter().sum::<usize>()) as u32;

        // Employee count and span trade off inside one project: c distinct
        // employees fit at most c slots of work per span slot, so the
        // contribution is at least |J| + min over c of c + max(chain,
        // ceil(work / c)).
        let project_floor = inst
            .projects
            .iter()
            .map(|project| {
                let chain = longest_chain(inst, &project.jobs);
                let c_min = project
                    .jobs
                    .iter()
                    .map(|&j| inst.jobs[j].min_employees_required())
                    .max()
                    .unwrap_or(0) as Penalty;
                let work: Penalty = project
                    .jobs
                    .iter()
                    .map(|&j| {
                        inst.jobs[j]
                            .modes
                            .iter()
                            .map(|m| Penalty::from(m.duration) * Penalty::from(m.employees_required))
                            .min()
                            .unwrap_or(0)
                    })
                    .sum();
                let staff_and_span = if work == 0 {
                    c_min + chain
                } else {
                    (c_min.max(1)..=(inst.employees as Penalty).max(c_min.max(1)))
                        .map(|c| c + chain.max(work.div_ceil(c)))
                        .min()
                        .expect("nonempty range")
                };
                project.jobs.len() as Penalty + staff_and_span
            })
            .collect();

        let unit_class = unit_classes(inst, unit_count, wb_base, &group_base);

        Prep {
            inst,
            successors,
            link_class,
            mandatory_units,
            unit_count,
            wb_base,
            group_base,
            emp_assign_lo,
            emp_assign_hi,
            agg_dur,
            agg_req,
            agg_cap,
            project_floor,
            unit_class,
        }
    }

    pub fn employee_unit(&self, e: EmployeeId) -> usize {
        e
    }

    pub fn workbench_unit(&self, b: WorkbenchId) -> usize {
        self.wb_base + b
    }

    pub fn device_unit(&self, g: GroupId, d: DeviceId) -> usize {
        self.group_base[g] + d
    }

    /// All unit ids an assignment occupies.
    pub fn units_of(&self, a: &JobAssignment) -> Vec<usize> {
        let mut units = Vec::with_capacity(a.employees.len() + 1);
        units.extend(a.employees.iter().map(|&e| self.employee_unit(e)));
        if let Some(b) = a.workbench {
            units.push(self.workbench_unit(b));
        }
        for (g, devices) in a.devices.iter().enumerate() {
            units.extend(devices.iter().map(|&d| self.device_unit(g, d)));
        }
        units
    }
}

/// Groups units into interchangeability classes. Two units share a class iff
/// they are of the same kind (same equipment group, for devices), appear in
/// exactly the same availability sets (and preferred sets, for employees),
/// and are referenced by no initial assignment. Swapping two such units in a
/// solution changes nothing, so the classes are sound for symmetry
/// reduction.
fn unit_classes(inst: &Instance, unit_count: usize, wb_base: usize, group_base: &[usize]) -> Vec<u32> {
    use std::collections::HashMap;
    let mut signature: Vec<Vec<u8>> = vec![Vec::new(); unit_count];

    // kind tag first so classes never mix unit kinds
    for e in 0..inst.employees {
        signature[e].push(0);
    }
    for b in 0..inst.workbenches {
        signature[wb_base + b].push(1);
    }
    for (g, &size) in inst.equipment_groups.iter().enumerate() {
        for d in 0..size {
            signature[group_base[g] + d].push(2);
            signature[group_base[g] + d].extend((g as u64).to_le_bytes());
        }
    }

    for job in &inst.jobs {
        for e in 0..inst.employees {
            signature[e].push(u8::from(job.qualified.contains(&e)) | (u8::from(job.preferred.contains(&e)) << 1));
        }
        for b in 0..inst.workbenches {
            signature[wb_base + b].push(u8::from(job.available_workbenches.contains(&b)));
        }
        for (g, devices) in job.available_devices.iter().enumerate() {
            for d in 0..inst.equipment_groups[g] {
                signature[group_base[g] + d].push(u8::from(devices.contains(&d)));
            }
        }
        if let Some(init) = &job.initial {
            // pinned by input data: force singleton classes
            for e in init.employees.iter().flatten() {
                signature[*e].push(255);
                signature[*e].extend((*e as u64).to_le_bytes());
            }
            if let Some(b) = init.workbench {
                signature[wb_base + b].push(255);
                signature[wb_base + b].extend((b as u64).to_le_bytes());
            }
            for (g, devices) in init.devices.iter().flatten().enumerate() {
                for &d in devices {
                    let unit = group_base[g] + d;
                    signature[unit].push(255);
                    signature[unit].extend((d as u64).to_le_bytes());
                }
            }
        }
    }

    let mut ids: HashMap<Vec<u8>, u32> = HashMap::new();
    signature
        .into_iter()
        .map(|sig| {
            let next = ids.len() as u32;
            *ids.entry(sig).or_insert(next)
        })
        .collect()
}

/// Longest precedence chain within `jobs`, weighted by minimum durations.
fn longest_chain(inst: &Instance, jobs: &[JobId]) -> Penalty {
    let mut memo: Vec<Option<Penalty>> = vec![None; inst.jobs.len()];
    fn visit(j: JobId, inst: &Instance, memo: &mut Vec<Option<Penalty>>) -> Penalty {
        if let Some(v) = memo[j] {
            return v;
        }
        let mut best = 0;
        for &k in &inst.jobs[j].predecessors {
            best = best.max(visit(k, inst, memo));
        }
        let value = best + Penalty::from(inst.jobs[j].min_duration());
        memo[j] = Some(value);
        value
    }
    jobs.iter().map(|&j| visit(j, inst, &mut memo)).max().unwrap_or(0)
}
