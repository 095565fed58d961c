//! Reference implementations used to cross-check the production code paths.
//!
//! These are written for obviousness, not speed: the unary check below scans
//! per-slot occupancy counters (the time-indexed view of resource usage)
//! instead of sweeping sorted intervals. Tests compare its verdicts against
//! [`crate::evaluator::check_hard`].

use crate::evaluator::check_shape;
use crate::model::*;
use std::collections::BTreeSet;

/// A unit that is used by more than one job in some slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OverloadedUnit {
    Employee(EmployeeId),
    Workbench(WorkbenchId),
    Device(GroupId, DeviceId),
}

/// Per-slot occupancy scan over every resource unit.
///
/// Returns the set of units that are double-booked in at least one slot.
/// Empty iff the solution satisfies the unary-resource constraints.
pub fn overloaded_units(instance: &Instance, solution: &Solution) -> BTreeSet<OverloadedUnit> {
    check_shape(instance, solution).expect("shape-checked solution required");
    let horizon = instance.end_of_horizon() as usize + 1;
    let mut out = BTreeSet::new();

    let mut usage = vec![0u32; horizon];
    let mut scan = |unit: OverloadedUnit, jobs: &dyn Fn(JobId) -> bool, out: &mut BTreeSet<OverloadedUnit>| {
        usage.iter_mut().for_each(|u| *u = 0);
        for (j, a) in solution.jobs.iter().enumerate() {
            if !jobs(j) {
                continue;
            }
            let d = instance.jobs[j].duration_in(a.mode).expect("shape checked");
            for t in a.start..(a.start + d) {
                let t = (t as usize).min(horizon - 1);
                usage[t] += 1;
                if usage[t] > 1 {
                    out.insert(unit);
                }
            }
        }
    };

    for e in 0..instance.employees {
        scan(OverloadedUnit::Employee(e), &|j| solution.jobs[j].employees.contains(&e), &mut out);
    }
    for b in 0..instance.workbenches {
        scan(OverloadedUnit::Workbench(b), &|j| solution.jobs[j].workbench == Some(b), &mut out);
    }
    for (g, &units) in instance.equipment_groups.iter().enumerate() {
        for d in 0..units {
            scan(
                OverloadedUnit::Device(g, d),
                &|j| solution.jobs[j].devices.get(g).map(|ds| ds.contains(&d)).unwrap_or(false),
                &mut out,
            );
        }
    }
    out
}

/// Whether the solution satisfies the unary-resource constraints, per the
/// slot-scan view.
pub fn unary_feasible(instance: &Instance, solution: &Solution) -> bool {
    overloaded_units(instance, solution).is_empty()
}

/// Start values of `job` (other domain dimensions fixed to `mode`) that keep
/// the solution free of unary overload on the given occupied intervals.
///
/// Used to verify propagation: an exact solver must never remove a start that
/// this brute scan keeps.
pub fn feasible_starts_against(
    instance: &Instance,
    job: JobId,
    mode: ModeId,
    busy: &[(Slot, Slot)],
) -> Vec<Slot> {
    let j = &instance.jobs[job];
    let d = j.duration_in(mode).expect("mode must be available");
    let mut out = Vec::new();
    for start in j.alpha..=j.omega.saturating_sub(d) {
        let end = start + d;
        let clash = busy.iter().any(|&(s, e)| start < e && end > s);
        if !clash {
            out.push(start);
        }
    }
    out
}
