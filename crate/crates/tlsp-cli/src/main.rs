//! Command-line frontend: check solutions, run the solvers, generate
//! instances, and drive benchmark matrices.
//!
//! Exit codes: 0 on success (for `check`: feasible), 1 for an infeasible
//! solution under `check`, 2 for usage, I/O, and parse errors.

mod bench;
mod summary;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use tlsp::io::generate::{GeneratorParams, Profile, ShapeOverrides};
use tlsp::model::Slot;
use tlsp::solver::{RedundantToggles, SearchConfig, Strategy};
use tlsp::{evaluator, io, sa, solver, vlns};

#[derive(Parser)]
#[command(name = "tlsp", version, about = "Test laboratory scheduling (TLSP-S) solver suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a solution against an instance and print its penalty.
    Check {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Solve an instance and print a one-line summary.
    Solve(SolveArgs),
    /// Generate a random instance (optionally with its reference schedule).
    Generate(GenerateArgs),
    /// Run a method matrix over a directory of instances into a CSV.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Vlns,
    Sa,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Vlns => "vlns",
            Method::Sa => "sa",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    StartFirstAff,
    StartFirstFf,
    ModeFirstAff,
    ModeFirstFf,
}

impl From<StrategyArg> for Strategy {
    fn from(value: StrategyArg) -> Strategy {
        match value {
            StrategyArg::StartFirstAff => Strategy::StartFirstAff,
            StrategyArg::StartFirstFf => Strategy::StartFirstFf,
            StrategyArg::ModeFirstAff => Strategy::ModeFirstAff,
            StrategyArg::ModeFirstFf => Strategy::ModeFirstFf,
        }
    }
}

/// `none`, `all`, or a comma list of `r19`, `r20-22`, `r23-25`.
fn parse_redundant(text: &str) -> Result<RedundantToggles, String> {
    match text {
        "none" => return Ok(RedundantToggles::none()),
        "all" => return Ok(RedundantToggles::all()),
        _ => {}
    }
    let mut toggles = RedundantToggles::none();
    for part in text.split(',') {
        match part.trim() {
            "r19" => toggles.aggregate_cumulative = true,
            "r20-22" => toggles.per_resource_cumulative = true,
            "r23-25" => toggles.assignment_cardinality = true,
            other => return Err(format!("unknown redundant group {:?}", other)),
        }
    }
    Ok(toggles)
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 7200.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the best solution found.
    #[arg(short, long)]
    output: Option<PathBuf>,

    // exact solver
    #[arg(long, value_enum, default_value = "start-first-aff")]
    strategy: StrategyArg,
    /// Redundant constraint groups: `none`, `all`, or a comma list of
    /// `r19`, `r20-22`, `r23-25`.
    #[arg(long, value_parser = parse_redundant, default_value = "r20-22,r23-25")]
    redundant: RedundantToggles,

    // neighborhood search
    #[arg(long, default_value_t = 0.8)]
    hot_start_prob: f64,
    #[arg(long, default_value_t = 0.35)]
    jump_prob: f64,
    #[arg(long, default_value_t = 30.0)]
    move_time_limit: f64,
    #[arg(long, default_value_t = 30.0)]
    lb_time_limit: f64,
    #[arg(long, default_value_t = 60.0)]
    initial_time_limit: f64,

    // annealing
    #[arg(long, default_value_t = 5.0)]
    initial_temperature: f64,
    #[arg(long, default_value_t = 0.97)]
    cooling_rate: f64,
    #[arg(long, default_value_t = 400)]
    moves_per_temperature: u32,
    /// Deterministic proposal budget for the annealer.
    #[arg(long)]
    sa_proposals: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    projects: usize,
    #[arg(long)]
    horizon: Slot,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "general")]
    profile: ProfileArg,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the feasible reference schedule the instance was built
    /// around.
    #[arg(long)]
    emit_reference: Option<PathBuf>,

    #[arg(long)]
    employees: Option<usize>,
    #[arg(long)]
    workbenches: Option<usize>,
    /// Equipment group sizes, e.g. `8,12,6`.
    #[arg(long, value_delimiter = ',')]
    equipment_groups: Option<Vec<usize>>,
    /// `MIN,MAX`
    #[arg(long, value_delimiter = ',')]
    jobs_per_project: Option<Vec<usize>>,
    /// `MIN,MAX` in slots.
    #[arg(long, value_delimiter = ',')]
    duration_range: Option<Vec<Slot>>,
    #[arg(long)]
    window_slack: Option<Slot>,
    #[arg(long)]
    started_fraction: Option<f64>,
    #[arg(long)]
    qualified_fraction: Option<f64>,
    #[arg(long)]
    workbench_pool_target: Option<f64>,
    #[arg(long)]
    shift_fraction: Option<f64>,
    #[arg(long)]
    external_fraction: Option<f64>,
    #[arg(long)]
    equipment_job_fraction: Option<f64>,
    /// Fraction of the horizon over which project offsets scatter.
    #[arg(long)]
    project_spread: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    General,
    Labstructure,
}

impl From<ProfileArg> for Profile {
    fn from(value: ProfileArg) -> Profile {
        match value {
            ProfileArg::General => Profile::General,
            ProfileArg::Labstructure => Profile::LabStructure,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { instance, solution } => check(&instance, &solution),
        Command::Solve(args) => solve(args),
        Command::Generate(args) => generate(args),
        Command::Bench(args) => bench::bench(args),
    }
}

fn check(instance_path: &PathBuf, solution_path: &PathBuf) -> Result<ExitCode> {
    let instance = io::read_instance(instance_path)
        .with_context(|| format!("reading instance {}", instance_path.display()))?;
    let solution = io::read_solution(solution_path, &instance)
        .with_context(|| format!("reading solution {}", solution_path.display()))?;
    let report = evaluator::check_hard(&instance, &solution)
        .context("solution shape does not match the instance")?;
    let breakdown = evaluator::penalty(&instance, &solution);
    print!("{}", report);
    if report.is_feasible() {
        println!();
    }
    println!("{}", breakdown);
    Ok(if report.is_feasible() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    if args.time_limit <= 0.0 {
        bail!("--time-limit must be positive");
    }
    let instance = io::read_instance(&args.instance)
        .with_context(|| format!("reading instance {}", args.instance.display()))?;

    let outcome = match args.method {
        Method::Exact => {
            let config = SearchConfig {
                strategy: args.strategy.into(),
                redundant: args.redundant,
                time_limit: args.time_limit,
                seed: args.seed,
                ..SearchConfig::default()
            };
            solver::solve(&instance, &config)
        }
        Method::Vlns => {
            let config = vlns::VlnsConfig {
                hot_start_prob: args.hot_start_prob,
                jump_prob: args.jump_prob,
                move_time_limit: args.move_time_limit,
                lb_time_limit: args.lb_time_limit,
                initial_time_limit: args.initial_time_limit,
                total_time_limit: args.time_limit,
                seed: args.seed,
            };
            vlns::run(&instance, &config)
        }
        Method::Sa => {
            let config = sa::SaConfig {
                initial_temperature: args.initial_temperature,
                cooling_rate: args.cooling_rate,
                moves_per_temperature: args.moves_per_temperature,
                time_limit: args.time_limit,
                max_proposals: args.sa_proposals,
                initial_time_limit: args.initial_time_limit,
                seed: args.seed,
                ..sa::SaConfig::default()
            };
            sa::run(&instance, &config)
        }
    };

    if let (Some(path), Some(solution)) = (&args.output, &outcome.best_solution) {
        io::write_solution(solution, &instance, path)
            .with_context(|| format!("writing solution {}", path.display()))?;
    }
    let summary = summary::Summary::new(&instance.id, args.method.name(), args.seed, &outcome);
    println!("{}", serde_json::to_string(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    for (flag, len) in [
        ("--jobs-per-project", args.jobs_per_project.as_ref().map(Vec::len)),
        ("--duration-range", args.duration_range.as_ref().map(Vec::len)),
    ] {
        if let Some(len) = len {
            if len != 2 {
                bail!("{} takes exactly MIN,MAX", flag);
            }
        }
    }
    let pair = |v: &Option<Vec<Slot>>| v.as_ref().map(|v| (v[0], v[1]));
    let params = GeneratorParams {
        projects: args.projects,
        horizon: args.horizon,
        seed: args.seed,
        profile: args.profile.into(),
        overrides: ShapeOverrides {
            employees: args.employees,
            workbenches: args.workbenches,
            equipment_groups: args.equipment_groups.clone(),
            jobs_per_project: args.jobs_per_project.as_ref().map(|v| (v[0], v[1])),
            duration_range: pair(&args.duration_range),
            window_slack: args.window_slack,
            started_fraction: args.started_fraction,
            qualified_fraction: args.qualified_fraction,
            workbench_pool_target: args.workbench_pool_target,
            shift_fraction: args.shift_fraction,
            external_fraction: args.external_fraction,
            equipment_job_fraction: args.equipment_job_fraction,
            project_spread: args.project_spread,
        },
    };
    let generated = tlsp::io::generate::generate_instance(&params).context("generating instance")?;
    io::write_instance(&generated.instance, &args.output)
        .with_context(|| format!("writing instance {}", args.output.display()))?;
    if let Some(path) = &args.emit_reference {
        io::write_solution(&generated.reference, &generated.instance, path)
            .with_context(|| format!("writing reference {}", path.display()))?;
    }
    eprintln!(
        "wrote {} ({} projects, {} jobs, horizon {})",
        args.output.display(),
        generated.instance.projects.len(),
        generated.instance.jobs.len(),
        generated.instance.horizon
    );
    Ok(ExitCode::SUCCESS)
}
