//! Benchmark harness: a method matrix over an instance directory, written as
//! one CSV with per-run rows and aggregate rows.
//!
//! Row kinds share one fixed column set (blank where not applicable):
//!
//! ```text
//! row_type,instance,method,run,seed,status,total,s1,s2,s3,s4,s5,nodes,moves,
//! wall_secs,proved_optimal,best,feasible_runs,avg,sat,opt,best_count,
//! avg_rel_dist_to_best
//! ```
//!
//! - `run`: one row per (instance, method, run); `proved_optimal` flags runs
//!   that closed the instance.
//! - `instance_summary`: per (instance, method): best total, number of
//!   feasible runs, mean total over feasible runs.
//! - `method_summary`: per method across instances: instances with a feasible
//!   run (`sat`), instances proved optimal (`opt`), instances where the
//!   method matched the cross-method best (`best_count`), and the mean
//!   relative distance of its best to the cross-method best over the
//!   instances it solved.
//!
//! Cells run in parallel up to the worker cap; each cell is single-threaded
//! and seeded as `seed_base + run`, so results are independent of the worker
//! count.

use anyhow::{bail, Context, Result};
use clap::Args;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use tlsp::model::Instance;
use tlsp::solver::{SearchConfig, SolveOutcome, SolveStatus};
use tlsp::{io, sa, solver, vlns};

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of `.json` instance files.
    #[arg(long)]
    instances: PathBuf,
    /// Comma list of `exact`, `vlns`, `sa`.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    /// Seeded repetitions per (instance, method).
    #[arg(long, default_value_t = 5)]
    runs: u64,
    /// Wall-clock limit per run in seconds.
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 1)]
    seed_base: u64,
    #[arg(long)]
    out: PathBuf,
    /// Concurrent cells.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Optional deterministic proposal budget for the annealer.
    #[arg(long)]
    sa_proposals: Option<u64>,
    #[arg(long, default_value_t = 30.0)]
    move_time_limit: f64,
    #[arg(long, default_value_t = 30.0)]
    lb_time_limit: f64,
    #[arg(long, default_value_t = 60.0)]
    initial_time_limit: f64,
}

struct RunRecord {
    instance: String,
    method: String,
    run: u64,
    seed: u64,
    outcome: Option<SolveOutcome>,
}

pub fn bench(args: BenchArgs) -> Result<ExitCode> {
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    for m in &args.methods {
        if !matches!(m.as_str(), "exact" | "vlns" | "sa") {
            bail!("unknown method {:?}", m);
        }
    }

    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.instances)
        .with_context(|| format!("listing {}", args.instances.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .json instances under {}", args.instances.display());
    }

    // Load each instance once; failures become error rows for every cell.
    let instances: Vec<(String, Result<Instance, String>)> = paths
        .iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            match io::read_instance(p) {
                Ok(inst) => (inst.id.clone(), Ok(inst)),
                Err(e) => {
                    eprintln!("warning: skipping {}: {:#}", p.display(), e);
                    (name, Err(e.to_string()))
                }
            }
        })
        .collect();

    // cell grid, row-major: instance x method x run
    let mut cells = Vec::new();
    for (i, _) in instances.iter().enumerate() {
        for method in &args.methods {
            for run in 0..args.runs {
                cells.push((i, method.clone(), run));
            }
        }
    }

    let next = AtomicUsize::new(0);
    let records: Mutex<Vec<Option<RunRecord>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = args.workers.max(1).min(cells.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= cells.len() {
                    break;
                }
                let (i, ref method, run) = cells[idx];
                let (ref id, ref loaded) = instances[i];
                let seed = args.seed_base + run;
                let outcome = match loaded {
                    Ok(instance) => Some(run_cell(instance, method, seed, &args)),
                    Err(_) => None,
                };
                let record =
                    RunRecord { instance: id.clone(), method: method.clone(), run, seed, outcome };
                records.lock().expect("records lock")[idx] = Some(record);
            });
        }
    });
    let records: Vec<RunRecord> =
        records.into_inner().expect("records lock").into_iter().map(|r| r.expect("all cells ran")).collect();

    write_csv(&args.out, &args.methods, &instances, &records)?;
    eprintln!("wrote {} ({} run rows)", args.out.display(), records.len());
    Ok(ExitCode::SUCCESS)
}

fn run_cell(instance: &Instance, method: &str, seed: u64, args: &BenchArgs) -> SolveOutcome {
    match method {
        "exact" => {
            let config = SearchConfig { time_limit: args.time_limit, seed, ..SearchConfig::default() };
            solver::solve(instance, &config)
        }
        "vlns" => {
            let config = vlns::VlnsConfig {
                total_time_limit: args.time_limit,
                move_time_limit: args.move_time_limit,
                lb_time_limit: args.lb_time_limit,
                initial_time_limit: args.initial_time_limit,
                seed,
                ..vlns::VlnsConfig::default()
            };
            vlns::run(instance, &config)
        }
        "sa" => {
            let config = sa::SaConfig {
                time_limit: args.time_limit,
                max_proposals: args.sa_proposals,
                initial_time_limit: args.initial_time_limit,
                seed,
                ..sa::SaConfig::default()
            };
            sa::run(instance, &config)
        }
        other => unreachable!("validated method {:?}", other),
    }
}

const COLUMNS: [&str; 23] = [
    "row_type",
    "instance",
    "method",
    "run",
    "seed",
    "status",
    "total",
    "s1",
    "s2",
    "s3",
    "s4",
    "s5",
    "nodes",
    "moves",
    "wall_secs",
    "proved_optimal",
    "best",
    "feasible_runs",
    "avg",
    "sat",
    "opt",
    "best_count",
    "avg_rel_dist_to_best",
];

fn status_name(outcome: &Option<SolveOutcome>) -> String {
    match outcome {
        None => "error".to_string(),
        Some(o) => serde_json::to_value(o.status)
            .expect("status serializes")
            .as_str()
            .expect("status is a string")
            .to_string(),
    }
}

fn has_solution(outcome: &Option<SolveOutcome>) -> bool {
    outcome.as_ref().map(|o| o.best_solution.is_some()).unwrap_or(false)
}

fn write_csv(
    out: &PathBuf,
    methods: &[String],
    instances: &[(String, Result<Instance, String>)],
    records: &[RunRecord],
) -> Result<()> {
    let mut writer = csv::Writer::from_path(out).with_context(|| format!("creating {}", out.display()))?;
    writer.write_record(COLUMNS)?;

    let pad = |mut row: Vec<String>| -> Vec<String> {
        row.resize(COLUMNS.len(), String::new());
        row
    };

    for r in records {
        let mut row = vec![
            "run".to_string(),
            r.instance.clone(),
            r.method.clone(),
            r.run.to_string(),
            r.seed.to_string(),
            status_name(&r.outcome),
        ];
        match r.outcome.as_ref().and_then(|o| o.best_penalty) {
            Some(t) => row.extend([
                t.total.to_string(),
                t.s1.to_string(),
                t.s2.to_string(),
                t.s3.to_string(),
                t.s4.to_string(),
                t.s5.to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 6)),
        }
        match &r.outcome {
            Some(o) => row.extend([
                o.nodes.to_string(),
                o.moves.to_string(),
                format!("{:.3}", o.wall_secs),
                (o.status == SolveStatus::Optimal).to_string(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        writer.write_record(pad(row))?;
    }

    // per (instance, method) summaries, in grid order
    let mut best_by_instance_method: Vec<Vec<Option<u64>>> =
        vec![vec![None; methods.len()]; instances.len()];
    for (i, (id, _)) in instances.iter().enumerate() {
        for (m, method) in methods.iter().enumerate() {
            let cell_records: Vec<&RunRecord> = records
                .iter()
                .filter(|r| &r.instance == id && &r.method == method)
                .collect();
            let feasible: Vec<u64> = cell_records
                .iter()
                .filter(|r| has_solution(&r.outcome))
                .filter_map(|r| r.outcome.as_ref().and_then(|o| o.best_penalty).map(|t| t.total))
                .collect();
            let best = feasible.iter().min().copied();
            best_by_instance_method[i][m] = best;
            let proved = cell_records
                .iter()
                .any(|r| r.outcome.as_ref().map(|o| o.status == SolveStatus::Optimal).unwrap_or(false));
            let avg = if feasible.is_empty() {
                String::new()
            } else {
                format!("{:.2}", feasible.iter().sum::<u64>() as f64 / feasible.len() as f64)
            };
            let mut row = vec![
                "instance_summary".to_string(),
                id.clone(),
                method.clone(),
                String::new(),
                String::new(),
                String::new(),
            ];
            row.extend(std::iter::repeat_n(String::new(), 9));
            row.push(proved.to_string());
            row.push(best.map(|b| b.to_string()).unwrap_or_default());
            row.push(feasible.len().to_string());
            row.push(avg);
            writer.write_record(pad(row))?;
        }
    }

    // cross-method summaries
    for (m, method) in methods.iter().enumerate() {
        let mut sat = 0u64;
        let mut opt = 0u64;
        let mut best_count = 0u64;
        let mut distances: Vec<f64> = Vec::new();
        for (i, (id, _)) in instances.iter().enumerate() {
            let Some(own_best) = best_by_instance_method[i][m] else { continue };
            sat += 1;
            let overall = best_by_instance_method[i].iter().flatten().min().copied().expect("own best exists");
            if own_best == overall {
                best_count += 1;
            }
            distances.push(if overall == 0 {
                0.0
            } else {
                (own_best - overall) as f64 / overall as f64
            });
            let proved = records.iter().any(|r| {
                &r.instance == id
                    && &r.method == method
                    && r.outcome.as_ref().map(|o| o.status == SolveStatus::Optimal).unwrap_or(false)
            });
            if proved {
                opt += 1;
            }
        }
        let avg_dist = if distances.is_empty() {
            String::new()
        } else {
            format!("{:.4}", distances.iter().sum::<f64>() / distances.len() as f64)
        };
        let mut row = vec!["method_summary".to_string(), String::new(), method.clone()];
        row.extend(std::iter::repeat_n(String::new(), 16));
        row.push(sat.to_string());
        row.push(opt.to_string());
        row.push(best_count.to_string());
        row.push(avg_dist);
        writer.write_record(pad(row))?;
    }

    writer.flush()?;
    Ok(())
}
