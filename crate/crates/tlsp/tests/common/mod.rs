//! Shared corpus builders for the integration and acceptance suites.
//!
//! Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tlsp::io::generate::{generate_instance, Generated, GeneratorParams, Profile, ShapeOverrides};
use tlsp::model::*;

/// Parameters for the oracle-sized corpus: at most 4 jobs, horizon 10-12, at
/// most 3 employees.
pub fn tiny_params(seed: u64) -> GeneratorParams {
    let profile = if seed % 2 == 0 { Profile::General } else { Profile::LabStructure };
    let mut params = GeneratorParams::new(1 + (seed as usize % 2), 10 + (seed % 3) as Slot, seed, profile);
    params.overrides = ShapeOverrides {
        employees: Some(2 + (seed as usize / 2 % 2)),
        workbenches: Some(1 + (seed as usize % 2)),
        equipment_groups: Some(if seed % 3 == 0 { vec![2] } else { vec![] }),
        jobs_per_project: Some((1, 2)),
        duration_range: Some((1, 3)),
        window_slack: Some(1),
        started_fraction: Some(if seed % 5 == 0 { 0.3 } else { 0.0 }),
        qualified_fraction: Some(0.8),
        workbench_pool_target: Some(1.4),
        shift_fraction: Some(0.5),
        external_fraction: Some(0.1),
        equipment_job_fraction: Some(0.3),
        project_spread: None,
    };
    params
}

/// Deterministic corpus of `count` tiny generated instances.
pub fn tiny_corpus(count: usize) -> Vec<Generated> {
    (0..count as u64)
        .map(|seed| {
            generate_instance(&tiny_params(1000 + seed))
                .unwrap_or_else(|e| panic!("tiny corpus seed {} failed: {}", seed, e))
        })
        .collect()
}

/// Medium instances for the heuristic comparison: 10-16 projects at horizon
/// 88-174, kept move-tractable through modest windows and project sizes, and
/// spread across the horizon the way a lab with steady intake would be.
pub fn medium_params(index: u64) -> GeneratorParams {
    let profile = if index % 2 == 0 { Profile::General } else { Profile::LabStructure };
    let projects = 10 + (index as usize % 4) * 2;
    let horizon: Slot = 174;
    let mut params = GeneratorParams::new(projects, horizon, 5000 + index, profile);
    params.overrides = ShapeOverrides {
        jobs_per_project: Some((2, 3)),
        window_slack: Some(8),
        project_spread: Some(0.6),
        ..ShapeOverrides::default()
    };
    params
}

/// A structurally valid (often infeasible) random solution: modes from the
/// available set, starts within the window, resource counts satisfied from
/// the availability sets.
pub fn random_shape_valid_solution(instance: &Instance, rng: &mut ChaCha8Rng) -> Solution {
    let jobs = instance
        .jobs
        .iter()
        .map(|job| {
            let mode = job.modes[rng.random_range(0..job.modes.len())];
            let latest = job.omega - mode.duration;
            let start = if latest <= job.alpha {
                job.alpha
            } else {
                rng.random_range(job.alpha..=latest)
            };
            let employees = pick(&job.qualified, mode.employees_required as usize, rng);
            let workbench = job.workbench_required.then(|| {
                job.available_workbenches[rng.random_range(0..job.available_workbenches.len())]
            });
            let devices = job
                .equipment_required
                .iter()
                .enumerate()
                .map(|(g, &req)| pick(&job.available_devices[g], req as usize, rng))
                .collect();
            JobAssignment { mode: mode.mode, start, employees, workbench, devices }
        })
        .collect();
    Solution::new(jobs)
}

fn pick(pool: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool = pool.to_vec();
    for i in (1..pool.len()).rev() {
        let j = rng.random_range(0..=i);
        pool.swap(i, j);
    }
    let mut out: Vec<usize> = pool.into_iter().take(count).collect();
    out.sort_unstable();
    out
}

/// Random single-job mutation that keeps the solution structurally valid
/// (not necessarily feasible). Returns the changed job.
pub fn mutate_one_job(instance: &Instance, solution: &mut Solution, rng: &mut ChaCha8Rng) -> JobId {
    let j = rng.random_range(0..instance.jobs.len());
    let single = random_shape_valid_solution_job(instance, j, rng);
    solution.jobs[j] = single;
    j
}

fn random_shape_valid_solution_job(instance: &Instance, j: JobId, rng: &mut ChaCha8Rng) -> JobAssignment {
    let job = &instance.jobs[j];
    let mode = job.modes[rng.random_range(0..job.modes.len())];
    let latest = job.omega - mode.duration;
    let start = if latest <= job.alpha { job.alpha } else { rng.random_range(job.alpha..=latest) };
    let employees = pick(&job.qualified, mode.employees_required as usize, rng);
    let workbench = job
        .workbench_required
        .then(|| job.available_workbenches[rng.random_range(0..job.available_workbenches.len())]);
    let devices = job
        .equipment_required
        .iter()
        .enumerate()
        .map(|(g, &req)| pick(&job.available_devices[g], req as usize, rng))
        .collect();
    JobAssignment { mode: mode.mode, start, employees, workbench, devices }
}

/// Seeded rng for tests.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
