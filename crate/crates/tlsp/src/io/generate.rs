//! Seeded random instance generator.
//!
//! Instances are built around a hidden reference schedule: jobs are first
//! placed greedily on concrete resources, then windows, availabilities, and
//! requirements are derived so the placement stays feasible. Every generated
//! instance therefore admits its emitted reference solution by construction;
//! parameter combinations that cannot be placed fail loudly instead of
//! producing a silently infeasible instance.
//!
//! Jobs carry the three-mode structure of the benchmark data: a single mode
//! with one employee, usually a shift mode with two employees at a reduced
//! duration, and occasionally an external-only mode with no employees. Around
//! five percent of the jobs are already started and pinned to slot 1, and
//! about ten percent require lab devices. Availability-set sizes are drawn
//! against fixed per-instance totals, which keeps the per-job means (modes,
//! qualified employees, workbenches) inside the published benchmark ranges
//! for the matching size classes.

use crate::evaluator;
use crate::model::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Full use of the problem features: more equipment groups, denser
    /// dependency graphs.
    General,
    /// Shapes close to the real laboratory: three equipment groups, chain
    /// dependencies.
    LabStructure,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::General => "general",
            Profile::LabStructure => "labstructure",
        }
    }
}

/// Optional knobs; anything left `None` takes its profile default. The tiny
/// test corpus is produced through these.
#[derive(Debug, Clone, Default)]
pub struct ShapeOverrides {
    pub employees: Option<usize>,
    pub workbenches: Option<usize>,
    pub equipment_groups: Option<Vec<usize>>,
    pub jobs_per_project: Option<(usize, usize)>,
    pub duration_range: Option<(Slot, Slot)>,
    /// Maximum extra window slack on each side of the reference interval.
    pub window_slack: Option<Slot>,
    pub started_fraction: Option<f64>,
    /// Target mean of `|qualified| / |employees|`.
    pub qualified_fraction: Option<f64>,
    /// Target mean workbench-availability count per job.
    pub workbench_pool_target: Option<f64>,
    pub shift_fraction: Option<f64>,
    pub external_fraction: Option<f64>,
    pub equipment_job_fraction: Option<f64>,
    /// Fraction of the horizon over which project start offsets scatter;
    /// smaller values crowd the projects together and raise resource
    /// contention.
    pub project_spread: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GeneratorParams {
    pub projects: usize,
    pub horizon: Slot,
    pub seed: u64,
    pub profile: Profile,
    pub overrides: ShapeOverrides,
}

impl GeneratorParams {
    pub fn new(projects: usize, horizon: Slot, seed: u64, profile: Profile) -> Self {
        GeneratorParams { projects, horizon, seed, profile, overrides: ShapeOverrides::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    /// The feasible (not necessarily optimal) schedule the instance was
    /// built around.
    pub reference: Solution,
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parameters do not fit the horizon: {0}")]
    DoesNotFit(String),
}

/// Employee counts from the published benchmark size classes, with a scaled
/// fallback for other sizes.
fn default_employees(projects: usize, horizon: Slot) -> usize {
    const TABLE: [(usize, Slot, usize); 12] = [
        (5, 88, 7),
        (10, 88, 13),
        (15, 174, 12),
        (20, 174, 16),
        (30, 174, 23),
        (40, 174, 31),
        (60, 174, 46),
        (20, 520, 6),
        (40, 520, 12),
        (60, 520, 18),
        (60, 782, 13),
        (90, 782, 19),
    ];
    for &(p, h, e) in &TABLE {
        if p == projects && h == horizon {
            return e;
        }
    }
    ((1.55 * projects as f64 * 88.0 / horizon as f64).round() as usize).max(3)
}

struct Shape {
    employees: usize,
    workbenches: usize,
    jobs_per_project: (usize, usize),
    duration_range: (Slot, Slot),
    window_slack: Slot,
    started_fraction: f64,
    qualified_fraction: f64,
    workbench_pool_target: f64,
    shift_fraction: f64,
    external_fraction: f64,
    equipment_job_fraction: f64,
    project_spread: f64,
    chain_prob: f64,
    link_prob: f64,
}

fn resolve_shape(params: &GeneratorParams) -> Shape {
    let o = &params.overrides;
    let employees = o.employees.unwrap_or_else(|| default_employees(params.projects, params.horizon));
    let workbenches = o.workbenches.unwrap_or(employees);
    let h = params.horizon;
    let dmin = (h / 29).max(2);
    let dmax = (h / 9).max(dmin + 2);
    Shape {
        employees,
        workbenches,
        jobs_per_project: o.jobs_per_project.unwrap_or((2, 5)),
        duration_range: o.duration_range.unwrap_or((dmin, dmax)),
        window_slack: o.window_slack.unwrap_or((h / 6).max(1)),
        started_fraction: o.started_fraction.unwrap_or(0.05),
        qualified_fraction: o.qualified_fraction.unwrap_or(0.42),
        workbench_pool_target: o
            .workbench_pool_target
            .unwrap_or_else(|| (2.75 + 0.1 * workbenches as f64).clamp(3.3, 4.5)),
        shift_fraction: o.shift_fraction.unwrap_or(0.60),
        external_fraction: o.external_fraction.unwrap_or(0.03),
        equipment_job_fraction: o.equipment_job_fraction.unwrap_or(0.10),
        project_spread: o.project_spread.unwrap_or(1.0 / 3.0),
        chain_prob: match params.profile {
            Profile::General => 0.55,
            Profile::LabStructure => 0.75,
        },
        link_prob: 0.15,
    }
}

const MODE_SINGLE: ModeId = 0;
const MODE_SHIFT: ModeId = 1;
const MODE_EXTERNAL: ModeId = 2;

/// Generates a pseudo-random instance together with its reference schedule.
/// Pure in `(params, seed)`: repeated calls yield identical results.
pub fn generate_instance(params: &GeneratorParams) -> Result<Generated, GenerateError> {
    if params.projects == 0 {
        return Err(GenerateError::InvalidParams("at least one project required".into()));
    }
    if params.horizon < 4 {
        return Err(GenerateError::InvalidParams("horizon must be at least 4 slots".into()));
    }
    let shape = resolve_shape(params);
    if shape.employees == 0 {
        return Err(GenerateError::InvalidParams("at least one employee required".into()));
    }
    if shape.jobs_per_project.0 > shape.jobs_per_project.1 || shape.jobs_per_project.0 == 0 {
        return Err(GenerateError::InvalidParams("bad jobs-per-project range".into()));
    }
    if shape.duration_range.0 > shape.duration_range.1 || shape.duration_range.0 == 0 {
        return Err(GenerateError::InvalidParams("bad duration range".into()));
    }
    if Penalty::from(shape.duration_range.0) > params.horizon as u64 {
        return Err(GenerateError::DoesNotFit("shortest duration exceeds the horizon".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let builder = Builder::plan(params, &shape, &mut rng)?;
    builder.build(params, &shape, &mut rng)
}

struct JobPlan {
    project: ProjectId,
    base_duration: Slot,
    has_shift: bool,
    external_only: bool,
    started: bool,
    predecessors: Vec<JobId>,
    linked: Vec<JobId>,
    workbench_required: bool,
    equipment: Option<(GroupId, u32)>,
}

struct Placement {
    start: Slot,
    mode: ModeId,
    employees: Vec<EmployeeId>,
    workbench: Option<WorkbenchId>,
    devices: Vec<DeviceId>,
}

struct Builder {
    groups: Vec<usize>,
    project_jobs: Vec<Vec<JobId>>,
    jobs: Vec<JobPlan>,
    placements: Vec<Placement>,
}

impl Builder {
    fn plan(params: &GeneratorParams, shape: &Shape, rng: &mut ChaCha8Rng) -> Result<Builder, GenerateError> {
        // resources
        let groups: Vec<usize> = match &params.overrides.equipment_groups {
            Some(g) => g.clone(),
            None => {
                let (count, lo, hi) = match params.profile {
                    Profile::General => (rng.random_range(3..=6usize), 4usize, 12usize),
                    Profile::LabStructure => (3, 6, 30),
                };
                (0..count).map(|_| rng.random_range(lo..=hi)).collect()
            }
        };

        // job counts and ids, project-major
        let mut project_jobs: Vec<Vec<JobId>> = Vec::with_capacity(params.projects);
        let mut jobs: Vec<JobPlan> = Vec::new();
        for p in 0..params.projects {
            let count = rng.random_range(shape.jobs_per_project.0..=shape.jobs_per_project.1);
            let ids: Vec<JobId> = (0..count).map(|i| jobs.len() + i).collect();
            for _ in 0..count {
                jobs.push(JobPlan {
                    project: p,
                    base_duration: rng.random_range(shape.duration_range.0..=shape.duration_range.1),
                    has_shift: false,
                    external_only: false,
                    started: false,
                    predecessors: Vec::new(),
                    linked: Vec::new(),
                    workbench_required: false,
                    equipment: None,
                });
            }
            project_jobs.push(ids);
        }
        let n = jobs.len();

        // precedences within each project (edges point at lower ids)
        for ids in &project_jobs {
            for (pos, &j) in ids.iter().enumerate().skip(1) {
                if rng.random::<f64>() < shape.chain_prob {
                    jobs[j].predecessors.push(ids[pos - 1]);
                } else if rng.random::<f64>() < 0.4 {
                    jobs[j].predecessors.push(ids[rng.random_range(0..pos)]);
                }
                if pos >= 2 && rng.random::<f64>() < 0.15 {
                    let extra = ids[rng.random_range(0..pos)];
                    if !jobs[j].predecessors.contains(&extra) {
                        jobs[j].predecessors.push(extra);
                    }
                }
                jobs[j].predecessors.sort_unstable();
            }
        }

        // started jobs: project roots pinned to slot 1, all on distinct
        // employees and benches
        let target_started = (shape.started_fraction * n as f64).round() as usize;
        let started_cap = target_started.min(params.projects).min(shape.employees).min(shape.workbenches.max(1));
        let mut started_projects: Vec<ProjectId> = (0..params.projects).collect();
        for i in (1..started_projects.len()).rev() {
            let pick = rng.random_range(0..=i);
            started_projects.swap(i, pick);
        }
        for &p in started_projects.iter().take(started_cap) {
            let root = project_jobs[p][0];
            jobs[root].started = true;
        }

        // linked pairs among non-started jobs
        for ids in &project_jobs {
            if ids.len() < 2 || rng.random::<f64>() >= shape.link_prob {
                continue;
            }
            let eligible: Vec<JobId> = ids.iter().copied().filter(|&j| !jobs[j].started).collect();
            if eligible.len() < 2 {
                continue;
            }
            let a = eligible[rng.random_range(0..eligible.len())];
            let b = loop {
                let candidate = eligible[rng.random_range(0..eligible.len())];
                if candidate != a {
                    break candidate;
                }
            };
            jobs[a.min(b)].linked = vec![a.max(b)];
            jobs[a.max(b)].linked = vec![a.min(b)];
        }

        // mode structure: externals first, then shift-capable jobs by count
        let ext_eligible: Vec<JobId> =
            (0..n).filter(|&j| !jobs[j].started && jobs[j].linked.is_empty()).collect();
        let ext_target = ((shape.external_fraction * n as f64).round() as usize).min(ext_eligible.len());
        let mut ext_pool = ext_eligible;
        for i in (1..ext_pool.len()).rev() {
            let pick = rng.random_range(0..=i);
            ext_pool.swap(i, pick);
        }
        for &j in ext_pool.iter().take(ext_target) {
            jobs[j].external_only = true;
        }
        let shift_eligible: Vec<JobId> = (0..n).filter(|&j| !jobs[j].external_only).collect();
        let shift_target = ((shape.shift_fraction * shift_eligible.len() as f64).round() as usize)
            .min(if shape.employees >= 2 { shift_eligible.len() } else { 0 });
        let mut shift_pool = shift_eligible;
        for i in (1..shift_pool.len()).rev() {
            let pick = rng.random_range(0..=i);
            shift_pool.swap(i, pick);
        }
        for &j in shift_pool.iter().take(shift_target) {
            jobs[j].has_shift = true;
        }

        // workbenches and equipment
        for j in 0..n {
            jobs[j].workbench_required = if jobs[j].external_only || shape.workbenches == 0 {
                false
            } else if jobs[j].started {
                true
            } else {
                rng.random::<f64>() < 0.9
            };
        }
        if !groups.is_empty() {
            let eq_target = (shape.equipment_job_fraction * n as f64).round() as usize;
            let mut pool: Vec<JobId> = (0..n).filter(|&j| !jobs[j].external_only).collect();
            for i in (1..pool.len()).rev() {
                let pick = rng.random_range(0..=i);
                pool.swap(i, pick);
            }
            for &j in pool.iter().take(eq_target) {
                let g = rng.random_range(0..groups.len());
                let req = rng.random_range(1..=2u32).min(groups[g] as u32);
                if req > 0 {
                    jobs[j].equipment = Some((g, req));
                }
            }
        }

        Ok(Builder { groups, project_jobs, jobs, placements: Vec::new() })
    }

    fn duration_in_mode(&self, j: JobId, mode: ModeId) -> Slot {
        let d = self.jobs[j].base_duration;
        match mode {
            MODE_SHIFT => ((d as f64) * 0.6).ceil() as Slot,
            _ => d,
        }
    }

    fn build(
        mut self,
        params: &GeneratorParams,
        shape: &Shape,
        rng: &mut ChaCha8Rng,
    ) -> Result<Generated, GenerateError> {
        self.place_reference(params, shape, rng)?;
        let instance = self.derive_instance(params, shape, rng)?;
        let reference = Solution::new(
            self.placements
                .iter()
                .enumerate()
                .map(|(j, p)| JobAssignment {
                    mode: p.mode,
                    start: p.start,
                    employees: p.employees.clone(),
                    workbench: p.workbench,
                    devices: instance
                        .equipment_groups
                        .iter()
                        .enumerate()
                        .map(|(g, _)| {
                            if self.jobs[j].equipment.map(|(gg, _)| gg) == Some(g) {
                                p.devices.clone()
                            } else {
                                Vec::new()
                            }
                        })
                        .collect(),
                })
                .collect(),
        );

        let violations = validate_instance(&instance);
        if !violations.is_empty() {
            return Err(GenerateError::InvalidParams(format!(
                "internal: generated instance fails validation: {}",
                violations[0]
            )));
        }
        let report = evaluator::check_hard(&instance, &reference)
            .map_err(|e| GenerateError::InvalidParams(format!("internal: reference shape: {}", e)))?;
        if !report.is_feasible() {
            return Err(GenerateError::InvalidParams(format!(
                "internal: reference schedule infeasible: {}",
                report.violations[0]
            )));
        }
        Ok(Generated { instance, reference })
    }

    /// Greedy placement on concrete units, earliest fitting slot first.
    fn place_reference(
        &mut self,
        params: &GeneratorParams,
        shape: &Shape,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), GenerateError> {
        let n = self.jobs.len();
        let horizon_end = params.horizon + 1;
        let mut employee_busy: Vec<Vec<(Slot, Slot)>> = vec![Vec::new(); shape.employees];
        let mut bench_busy: Vec<Vec<(Slot, Slot)>> = vec![Vec::new(); shape.workbenches];
        let mut device_busy: Vec<Vec<Vec<(Slot, Slot)>>> =
            self.groups.iter().map(|&size| vec![Vec::new(); size]).collect();
        let mut class_employees: Vec<Option<Vec<EmployeeId>>> = vec![None; n];
        let mut placements: Vec<Option<Placement>> = (0..n).map(|_| None).collect();

        let free = |busy: &[(Slot, Slot)], s: Slot, e: Slot| !busy.iter().any(|&(bs, be)| s < be && bs < e);
        let load = |busy: &[(Slot, Slot)]| busy.iter().map(|&(s, e)| (e - s) as u64).sum::<u64>();

        // started jobs first, all at slot 1 on distinct units
        let mut next_employee = 0;
        let mut next_bench = 0;
        for j in 0..n {
            if !self.jobs[j].started {
                continue;
            }
            let d = self.jobs[j].base_duration;
            if 1 + d > horizon_end {
                return Err(GenerateError::DoesNotFit(format!(
                    "started job of duration {} exceeds the horizon",
                    d
                )));
            }
            let employee = next_employee;
            next_employee += 1;
            let bench = next_bench;
            next_bench += 1;
            let devices = match self.jobs[j].equipment {
                Some((g, req)) => {
                    let mut picked = Vec::new();
                    for d_id in 0..self.groups[g] {
                        if picked.len() as u32 == req {
                            break;
                        }
                        if free(&device_busy[g][d_id], 1, 1 + d) {
                            picked.push(d_id);
                        }
                    }
                    if (picked.len() as u32) < req {
                        return Err(GenerateError::DoesNotFit(
                            "not enough devices for the started jobs".into(),
                        ));
                    }
                    picked
                }
                None => Vec::new(),
            };
            employee_busy[employee].push((1, 1 + d));
            bench_busy[bench].push((1, 1 + d));
            for &d_id in &devices {
                let g = self.jobs[j].equipment.unwrap().0;
                device_busy[g][d_id].push((1, 1 + d));
            }
            placements[j] = Some(Placement {
                start: 1,
                mode: MODE_SINGLE,
                employees: vec![employee],
                workbench: Some(bench),
                devices,
            });
        }

        // remaining jobs project by project, offset into the horizon so
        // projects overlap
        let offset_span = ((params.horizon as f64 * shape.project_spread) as Slot).max(1);
        for p in 0..params.projects {
            let offset = rng.random_range(1..=offset_span);
            for idx in 0..self.project_jobs[p].len() {
                let j = self.project_jobs[p][idx];
                if placements[j].is_some() {
                    continue;
                }
                let d = self.jobs[j].base_duration;
                let external = self.jobs[j].external_only;
                let mut earliest = offset + rng.random_range(0..=2);
                for &k in &self.jobs[j].predecessors {
                    let pred = placements[k].as_ref().expect("predecessors placed first");
                    earliest = earliest.max(pred.start + self.duration_in_mode(k, pred.mode));
                }

                let class_pick = self.jobs[j].linked.first().and_then(|&mate| class_employees[mate].clone());
                let mut placed = false;
                let mut start = earliest;
                while start + d <= horizon_end {
                    let end = start + d;
                    // employees
                    let employees: Option<Vec<EmployeeId>> = if external {
                        Some(Vec::new())
                    } else if let Some(cached) = &class_pick {
                        cached.iter().all(|&e| free(&employee_busy[e], start, end)).then(|| cached.clone())
                    } else {
                        let mut ranked: Vec<EmployeeId> = (0..shape.employees)
                            .filter(|&e| free(&employee_busy[e], start, end))
                            .collect();
                        ranked.sort_by_key(|&e| (load(&employee_busy[e]), e));
                        (!ranked.is_empty()).then(|| vec![ranked[0]])
                    };
                    // bench
                    let bench: Option<Option<WorkbenchId>> = if self.jobs[j].workbench_required {
                        let mut ranked: Vec<WorkbenchId> = (0..shape.workbenches)
                            .filter(|&b| free(&bench_busy[b], start, end))
                            .collect();
                        ranked.sort_by_key(|&b| (load(&bench_busy[b]), b));
                        ranked.first().map(|&b| Some(b))
                    } else {
                        Some(None)
                    };
                    // devices
                    let devices: Option<Vec<DeviceId>> = match self.jobs[j].equipment {
                        Some((g, req)) => {
                            let mut ranked: Vec<DeviceId> = (0..self.groups[g])
                                .filter(|&d_id| free(&device_busy[g][d_id], start, end))
                                .collect();
                            ranked.sort_by_key(|&d_id| (load(&device_busy[g][d_id]), d_id));
                            (ranked.len() as u32 >= req).then(|| {
                                let mut picked: Vec<DeviceId> =
                                    ranked.into_iter().take(req as usize).collect();
                                picked.sort_unstable();
                                picked
                            })
                        }
                        None => Some(Vec::new()),
                    };

                    if let (Some(employees), Some(bench), Some(devices)) = (employees, bench, devices) {
                        for &e in &employees {
                            employee_busy[e].push((start, end));
                        }
                        if let Some(b) = bench {
                            bench_busy[b].push((start, end));
                        }
                        if let Some((g, _)) = self.jobs[j].equipment {
                            for &d_id in &devices {
                                device_busy[g][d_id].push((start, end));
                            }
                        }
                        if !self.jobs[j].linked.is_empty() {
                            class_employees[j] = Some(employees.clone());
                            for &mate in &self.jobs[j].linked {
                                class_employees[mate] = Some(employees.clone());
                            }
                        }
                        placements[j] = Some(Placement {
                            start,
                            mode: if external { MODE_EXTERNAL } else { MODE_SINGLE },
                            employees,
                            workbench: bench,
                            devices,
                        });
                        placed = true;
                        break;
                    }
                    start += 1;
                }
                if !placed {
                    return Err(GenerateError::DoesNotFit(format!(
                        "no feasible slot for a duration-{} job of project {} within {} slots",
                        d, p, params.horizon
                    )));
                }
            }
        }

        self.placements = placements.into_iter().map(|p| p.expect("all jobs placed")).collect();
        Ok(())
    }

    /// Derives windows, modes, and availability sets around the placement.
    fn derive_instance(
        &self,
        params: &GeneratorParams,
        shape: &Shape,
        rng: &mut ChaCha8Rng,
    ) -> Result<Instance, GenerateError> {
        let n = self.jobs.len();
        let horizon_end = params.horizon + 1;

        // windows
        let mut alpha = vec![0; n];
        let mut omega = vec![0; n];
        let mut omega_bar = vec![0; n];
        for j in 0..n {
            let plan = &self.jobs[j];
            let pl = &self.placements[j];
            let end = pl.start + self.duration_in_mode(j, pl.mode);
            let slack_before = rng.random_range(0..=shape.window_slack);
            let slack_after = rng.random_range(0..=shape.window_slack);
            alpha[j] = if plan.started { 1 } else { pl.start.saturating_sub(slack_before).max(1) };
            omega[j] = (end + slack_after).min(horizon_end);
            omega_bar[j] = if rng.random::<f64>() < 0.2 && end > alpha[j] + 1 {
                end - 1 // binding due date: the reference itself runs late
            } else {
                (end + rng.random_range(0..=4)).min(omega[j])
            };
        }

        // qualified-employee sets, sized against a fixed total
        let mut qualified: Vec<Vec<EmployeeId>> = vec![Vec::new(); n];
        {
            let mut sizes = vec![0usize; n];
            let mut total = 0usize;
            for j in 0..n {
                if self.jobs[j].external_only {
                    continue;
                }
                let floor = self.placements[j]
                    .employees
                    .len()
                    .max(if self.jobs[j].has_shift { 2 } else { 1 });
                sizes[j] = floor.min(shape.employees);
                total += sizes[j];
            }
            let target = (shape.qualified_fraction * shape.employees as f64 * n as f64).round() as usize;
            let eligible: Vec<JobId> = (0..n).filter(|&j| !self.jobs[j].external_only).collect();
            let mut guard = 0;
            while total < target && guard < 100_000 {
                guard += 1;
                let j = eligible[rng.random_range(0..eligible.len())];
                if sizes[j] < shape.employees {
                    sizes[j] += 1;
                    total += 1;
                } else if eligible.iter().all(|&k| sizes[k] >= shape.employees) {
                    break;
                }
            }
            for j in 0..n {
                if self.jobs[j].external_only {
                    continue;
                }
                let mut set: Vec<EmployeeId> = self.placements[j].employees.clone();
                // linked mates share the reference employees already
                let mut pool: Vec<EmployeeId> =
                    (0..shape.employees).filter(|e| !set.contains(e)).collect();
                for i in (1..pool.len()).rev() {
                    let pick = rng.random_range(0..=i);
                    pool.swap(i, pick);
                }
                while set.len() < sizes[j] {
                    set.push(pool.pop().expect("sizes capped by employee count"));
                }
                set.sort_unstable();
                qualified[j] = set;
            }
        }

        // preferred employees
        let mut preferred: Vec<Vec<EmployeeId>> = vec![Vec::new(); n];
        for j in 0..n {
            if qualified[j].is_empty() {
                continue;
            }
            let mut set: Vec<EmployeeId> = Vec::new();
            if rng.random::<f64>() < 0.75 {
                set.extend(self.placements[j].employees.iter().copied());
            }
            let extras = rng.random_range(0..=1usize);
            for _ in 0..extras {
                let e = qualified[j][rng.random_range(0..qualified[j].len())];
                if !set.contains(&e) {
                    set.push(e);
                }
            }
            set.sort_unstable();
            preferred[j] = set;
        }

        // workbench availability, sized against a fixed total
        let mut benches: Vec<Vec<WorkbenchId>> = vec![Vec::new(); n];
        if shape.workbenches > 0 {
            let mut sizes = vec![0usize; n];
            let mut total = 0usize;
            for j in 0..n {
                sizes[j] = usize::from(self.jobs[j].workbench_required);
                total += sizes[j];
            }
            let target = (shape.workbench_pool_target * n as f64).round() as usize;
            let mut guard = 0;
            while total < target && guard < 100_000 {
                guard += 1;
                let j = rng.random_range(0..n);
                if sizes[j] < shape.workbenches {
                    sizes[j] += 1;
                    total += 1;
                } else if (0..n).all(|k| sizes[k] >= shape.workbenches) {
                    break;
                }
            }
            for j in 0..n {
                let mut set: Vec<WorkbenchId> = self.placements[j].workbench.into_iter().collect();
                let mut pool: Vec<WorkbenchId> =
                    (0..shape.workbenches).filter(|b| !set.contains(b)).collect();
                for i in (1..pool.len()).rev() {
                    let pick = rng.random_range(0..=i);
                    pool.swap(i, pick);
                }
                while set.len() < sizes[j] {
                    set.push(pool.pop().expect("sizes capped by workbench count"));
                }
                set.sort_unstable();
                benches[j] = set;
            }
        }

        // device availability per group
        let group_count = self.groups.len();
        let mut equipment_required: Vec<Vec<u32>> = vec![vec![0; group_count]; n];
        let mut available_devices: Vec<Vec<Vec<DeviceId>>> = vec![vec![Vec::new(); group_count]; n];
        for j in 0..n {
            if let Some((g, req)) = self.jobs[j].equipment {
                equipment_required[j][g] = req;
                let mut set: Vec<DeviceId> = self.placements[j].devices.clone();
                let extra_cap = self.groups[g] - set.len();
                let extras = if extra_cap == 0 { 0 } else { rng.random_range(0..=((extra_cap * 3) / 5)) };
                let mut pool: Vec<DeviceId> = (0..self.groups[g]).filter(|d| !set.contains(d)).collect();
                for i in (1..pool.len()).rev() {
                    let pick = rng.random_range(0..=i);
                    pool.swap(i, pick);
                }
                for _ in 0..extras {
                    set.push(pool.pop().expect("capped by group size"));
                }
                set.sort_unstable();
                available_devices[j][g] = set;
            }
        }

        // assemble
        let jobs: Vec<Job> = (0..n)
            .map(|j| {
                let plan = &self.jobs[j];
                let mut modes = Vec::new();
                if plan.external_only {
                    modes.push(JobMode {
                        mode: MODE_EXTERNAL,
                        duration: plan.base_duration,
                        employees_required: 0,
                    });
                } else {
                    modes.push(JobMode {
                        mode: MODE_SINGLE,
                        duration: plan.base_duration,
                        employees_required: 1,
                    });
                    if plan.has_shift {
                        modes.push(JobMode {
                            mode: MODE_SHIFT,
                            duration: self.duration_in_mode(j, MODE_SHIFT),
                            employees_required: 2,
                        });
                    }
                }
                let initial = plan.started.then(|| {
                    let pl = &self.placements[j];
                    InitialAssignment {
                        mode: Some(pl.mode),
                        start: Some(pl.start),
                        employees: Some(pl.employees.clone()),
                        workbench: pl.workbench,
                        devices: Some(
                            (0..group_count)
                                .map(|g| {
                                    if plan.equipment.map(|(gg, _)| gg) == Some(g) {
                                        pl.devices.clone()
                                    } else {
                                        Vec::new()
                                    }
                                })
                                .collect(),
                        ),
                    }
                });
                Job {
                    project: plan.project,
                    alpha: alpha[j],
                    omega: omega[j],
                    omega_bar: omega_bar[j],
                    modes,
                    qualified: qualified[j].clone(),
                    preferred: preferred[j].clone(),
                    workbench_required: plan.workbench_required,
                    available_workbenches: benches[j].clone(),
                    equipment_required: equipment_required[j].clone(),
                    available_devices: available_devices[j].clone(),
                    predecessors: plan.predecessors.clone(),
                    linked: plan.linked.clone(),
                    started: plan.started,
                    initial,
                }
            })
            .collect();

        let instance = Instance {
            id: format!("{}-p{}-h{}-s{}", params.profile.name(), params.projects, params.horizon, params.seed),
            horizon: params.horizon,
            employees: shape.employees,
            workbenches: shape.workbenches,
            equipment_groups: self.groups.clone(),
            mode_names: vec!["single".to_string(), "shift".to_string(), "external".to_string()],
            projects: (0..params.projects)
                .map(|p| Project { name: format!("P{}", p), jobs: self.project_jobs[p].clone() })
                .collect(),
            jobs,
            names: NameTable::default(),
        };
        Ok(instance)
    }
}
