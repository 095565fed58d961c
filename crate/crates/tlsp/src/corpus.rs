//! Canonical tiny instances used throughout the test suites.
//!
//! `tiny_chain` is the fixed two-job reference instance ("T1"): every frozen
//! expected value in the tests traces back to it via the exhaustive oracle.

use crate::model::*;

fn job(
    project: ProjectId,
    alpha: Slot,
    omega: Slot,
    omega_bar: Slot,
    modes: Vec<JobMode>,
    qualified: Vec<EmployeeId>,
    preferred: Vec<EmployeeId>,
    workbenches: Vec<WorkbenchId>,
    predecessors: Vec<JobId>,
) -> Job {
    Job {
        project,
        alpha,
        omega,
        omega_bar,
        modes,
        qualified,
        preferred,
        workbench_required: !workbenches.is_empty(),
        available_workbenches: workbenches,
        equipment_required: vec![],
        available_devices: vec![],
        predecessors,
        linked: vec![],
        started: false,
        initial: None,
    }
}

/// The canonical two-job instance: one project, two chained jobs of duration
/// two, two employees (employee 0 preferred by both jobs), one workbench,
/// horizon 6, due dates 4 and 6.
///
/// Optimal total is 7: s1=2 (jobs), s3=1 (one employee serves both),
/// s5=4 (span of the back-to-back chain), s2=s4=0.
pub fn tiny_chain() -> Instance {
    let single = |d: Slot| vec![JobMode { mode: 0, duration: d, employees_required: 1 }];
    Instance {
        id: "T1".to_string(),
        horizon: 6,
        employees: 2,
        workbenches: 1,
        equipment_groups: vec![],
        mode_names: vec!["single".to_string()],
        projects: vec![Project { name: "P0".to_string(), jobs: vec![0, 1] }],
        jobs: vec![
            job(0, 1, 7, 4, single(2), vec![0, 1], vec![0], vec![0], vec![]),
            job(0, 1, 7, 6, single(2), vec![0, 1], vec![0], vec![0], vec![0]),
        ],
        names: NameTable::default(),
    }
}

/// Three independent jobs in one project; used by link-closure tests.
pub fn tiny_triple() -> Instance {
    let single = |d: Slot| vec![JobMode { mode: 0, duration: d, employees_required: 1 }];
    Instance {
        id: "T3".to_string(),
        horizon: 8,
        employees: 2,
        workbenches: 2,
        equipment_groups: vec![],
        mode_names: vec!["single".to_string()],
        projects: vec![Project { name: "P0".to_string(), jobs: vec![0, 1, 2] }],
        jobs: vec![
            job(0, 1, 9, 9, single(2), vec![0, 1], vec![0], vec![0, 1], vec![]),
            job(0, 1, 9, 9, single(2), vec![0, 1], vec![0], vec![0, 1], vec![]),
            job(0, 1, 9, 9, single(2), vec![0, 1], vec![0], vec![0, 1], vec![]),
        ],
        names: NameTable::default(),
    }
}

/// Two single-job projects sharing one workbench; used by cross-project and
/// neighborhood-selection tests.
pub fn two_projects() -> Instance {
    let single = |d: Slot| vec![JobMode { mode: 0, duration: d, employees_required: 1 }];
    Instance {
        id: "T2P".to_string(),
        horizon: 8,
        employees: 2,
        workbenches: 1,
        equipment_groups: vec![],
        mode_names: vec!["single".to_string()],
        projects: vec![
            Project { name: "P0".to_string(), jobs: vec![0] },
            Project { name: "P1".to_string(), jobs: vec![1] },
        ],
        jobs: vec![
            job(0, 1, 9, 9, single(2), vec![0, 1], vec![0], vec![0], vec![]),
            job(1, 1, 9, 9, single(2), vec![0, 1], vec![1], vec![0], vec![]),
        ],
        names: NameTable::default(),
    }
}

/// Two started jobs that both demand the single workbench at slot 1; no
/// feasible schedule exists.
pub fn forced_conflict() -> Instance {
    let single = vec![JobMode { mode: 0, duration: 2, employees_required: 1 }];
    let started_job = |project: ProjectId, employee: EmployeeId| Job {
        project,
        alpha: 1,
        omega: 9,
        omega_bar: 9,
        modes: single.clone(),
        qualified: vec![0, 1],
        preferred: vec![],
        workbench_required: true,
        available_workbenches: vec![0],
        equipment_required: vec![],
        available_devices: vec![],
        predecessors: vec![],
        linked: vec![],
        started: true,
        initial: Some(InitialAssignment {
            mode: Some(0),
            start: Some(1),
            employees: Some(vec![employee]),
            workbench: Some(0),
            devices: Some(vec![]),
        }),
    };
    Instance {
        id: "TCONFLICT".to_string(),
        horizon: 8,
        employees: 2,
        workbenches: 1,
        equipment_groups: vec![],
        mode_names: vec!["single".to_string()],
        projects: vec![
            Project { name: "P0".to_string(), jobs: vec![0] },
            Project { name: "P1".to_string(), jobs: vec![1] },
        ],
        jobs: vec![started_job(0, 0), started_job(1, 1)],
        names: NameTable::default(),
    }
}

/// A single unconstrained job: single mode, duration `d`, one preferred
/// employee out of two, no workbench or equipment.
pub fn single_job(d: Slot) -> Instance {
    Instance {
        id: "T1J".to_string(),
        horizon: 8,
        employees: 2,
        workbenches: 1,
        equipment_groups: vec![],
        mode_names: vec!["single".to_string()],
        projects: vec![Project { name: "P0".to_string(), jobs: vec![0] }],
        jobs: vec![Job {
            project: 0,
            alpha: 1,
            omega: 9,
            omega_bar: 9,
            modes: vec![JobMode { mode: 0, duration: d, employees_required: 1 }],
            qualified: vec![0, 1],
            preferred: vec![0],
            workbench_required: false,
            available_workbenches: vec![],
            equipment_required: vec![],
            available_devices: vec![],
            predecessors: vec![],
            linked: vec![],
            started: false,
            initial: None,
        }],
        names: NameTable::default(),
    }
}
