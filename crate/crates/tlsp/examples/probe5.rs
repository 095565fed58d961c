fn main() {
    let index: u64 = std::env::args().nth(1).unwrap().parse().unwrap();
    let seed: u64 = std::env::args().nth(2).map(|s| s.parse().unwrap()).unwrap_or(1);
    let budget: f64 = std::env::args().nth(3).map(|s| s.parse().unwrap()).unwrap_or(300.0);
    let profile = if index % 2 == 0 { tlsp::io::generate::Profile::General } else { tlsp::io::generate::Profile::LabStructure };
    let projects = 10 + (index as usize % 4) * 2;
    let horizon = 174;
    let mut params = tlsp::io::generate::GeneratorParams::new(projects, horizon, 5000 + index, profile);
    params.overrides.jobs_per_project = Some((2, 3));
    params.overrides.window_slack = Some(8);
    params.overrides.project_spread = Some(0.6);
    let generated = tlsp::io::generate::generate_instance(&params).unwrap();
    let inst = &generated.instance;
    print!("{} ({}j): ", inst.id, inst.jobs.len());

    let v = tlsp::vlns::run(inst, &tlsp::vlns::VlnsConfig { total_time_limit: budget, seed, ..Default::default() });
    print!("vlns {} {:?} {:.0}s | ", v.best_penalty.map(|p| p.total).unwrap_or(0), v.status, v.wall_secs);
    let s = tlsp::sa::run(inst, &tlsp::sa::SaConfig { time_limit: budget, seed, ..Default::default() });
    println!("sa {} {:.1}s", s.best_penalty.map(|p| p.total).unwrap_or(0), s.wall_secs);
}
