//! Cross-cutting invariants checked over randomized inputs.

mod common;

use proptest::prelude::*;
use std::collections::BTreeSet;
use tlsp::evaluator::{check_hard, penalty, penalty_delta, penalty_weighted, HardViolation};
use tlsp::model::*;
use tlsp::{corpus, io, oracle, refcheck};

/// The sweep-based unary check and the per-slot occupancy scan must classify
/// the same units as overloaded, for feasible and infeasible solutions alike.
#[test]
fn unary_sweep_agrees_with_slot_scan() {
    let corpus = common::tiny_corpus(10);
    let mut rng = common::rng(99);
    for generated in &corpus {
        let inst = &generated.instance;
        for _ in 0..200 {
            let solution = common::random_shape_valid_solution(inst, &mut rng);
            let report = check_hard(inst, &solution).expect("shape-valid by construction");
            let from_sweep: BTreeSet<refcheck::OverloadedUnit> = report
                .violations
                .iter()
                .filter_map(|v| match *v {
                    HardViolation::UnaryEmployee { employee, .. } => {
                        Some(refcheck::OverloadedUnit::Employee(employee))
                    }
                    HardViolation::UnaryWorkbench { workbench, .. } => {
                        Some(refcheck::OverloadedUnit::Workbench(workbench))
                    }
                    HardViolation::UnaryEquipment { group, device, .. } => {
                        Some(refcheck::OverloadedUnit::Device(group, device))
                    }
                    _ => None,
                })
                .collect();
            let from_scan = refcheck::overloaded_units(inst, &solution);
            assert_eq!(from_sweep, from_scan, "instance {}", inst.id);
        }
    }
}

#[test]
fn penalty_delta_matches_full_recomputation_over_mutation_chains() {
    let corpus = common::tiny_corpus(8);
    let mut rng = common::rng(4242);
    for generated in &corpus {
        let inst = &generated.instance;
        for _ in 0..20 {
            let mut solution = common::random_shape_valid_solution(inst, &mut rng);
            let mut breakdown = penalty(inst, &solution);
            for _ in 0..25 {
                let mut next = solution.clone();
                let changed = common::mutate_one_job(inst, &mut next, &mut rng);
                breakdown = penalty_delta(inst, &solution, &breakdown, &next, &[changed]);
                assert_eq!(breakdown, penalty(inst, &next), "instance {}", inst.id);
                solution = next;
            }
        }
    }
}

#[test]
fn penalty_terms_are_nonnegative_and_total_is_the_weighted_sum() {
    let corpus = common::tiny_corpus(6);
    let mut rng = common::rng(7);
    for generated in &corpus {
        let inst = &generated.instance;
        for _ in 0..100 {
            let solution = common::random_shape_valid_solution(inst, &mut rng);
            let w = Weights {
                w2: rng.random_range(1..4u64),
                w3: rng.random_range(1..4u64),
                w4: rng.random_range(1..4u64),
                w5: rng.random_range(1..4u64),
            };
            let bd = penalty_weighted(inst, &solution, w);
            assert_eq!(bd.s1, inst.jobs.len() as u64);
            assert_eq!(bd.total, bd.s1 + w.w2 * bd.s2 + w.w3 * bd.s3 + w.w4 * bd.s4 + w.w5 * bd.s5);
        }
    }
}

use rand::RngExt;

#[test]
fn generator_reference_is_feasible_and_instances_validate() {
    for generated in common::tiny_corpus(20) {
        assert!(validate_instance(&generated.instance).is_empty());
        let report = check_hard(&generated.instance, &generated.reference).unwrap();
        assert!(report.is_feasible(), "{}: {}", generated.instance.id, report);
    }
}

#[test]
fn oracle_optimum_is_a_lower_bound_for_every_feasible_solution() {
    for generated in common::tiny_corpus(10) {
        let inst = &generated.instance;
        let optimum = oracle::enumerate_optimal(inst, 500_000_000)
            .expect("within limit")
            .expect("generated instances are feasible")
            .1
            .total;
        assert!(optimum <= penalty(inst, &generated.reference).total);
        let sa_out = tlsp::sa::run(
            inst,
            &tlsp::sa::SaConfig {
                max_proposals: Some(2_000),
                time_limit: 30.0,
                initial_time_limit: 10.0,
                ..Default::default()
            },
        );
        assert!(optimum <= sa_out.best_penalty.unwrap().total);
    }
}

#[test]
fn fixture_file_is_the_canonical_tiny_instance() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/t1.json");
    let inst = io::read_instance(path).unwrap();
    assert_eq!(inst, corpus::tiny_chain());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Link normalization is idempotent and produces symmetric classes for
    /// arbitrary link graphs over one project.
    #[test]
    fn link_closure_is_idempotent_and_symmetric(edges in proptest::collection::vec((0usize..6, 0usize..6), 0..10)) {
        let mut inst = six_job_instance();
        for (a, b) in edges {
            if a != b && !inst.jobs[a].linked.contains(&b) {
                inst.jobs[a].linked.push(b);
            }
        }
        let once = normalize_links(&inst).unwrap();
        let twice = normalize_links(&once).unwrap();
        prop_assert_eq!(&once, &twice);
        for (j, job) in once.jobs.iter().enumerate() {
            for &k in &job.linked {
                prop_assert!(once.jobs[k].linked.contains(&j), "symmetry {} <-> {}", j, k);
            }
        }
    }

    /// Round-trip identity over perturbed instances.
    #[test]
    fn instance_round_trip(seed in 0u64..500) {
        let generated = tlsp::io::generate::generate_instance(&common::tiny_params(seed + 3000)).unwrap();
        let text = io::instance_to_string(&generated.instance);
        let parsed = io::read_instance_str(&text).unwrap();
        prop_assert_eq!(&parsed, &generated.instance);
        prop_assert_eq!(io::instance_to_string(&parsed), text);
    }
}

fn six_job_instance() -> Instance {
    let mut inst = corpus::tiny_triple();
    for _ in 0..3 {
        let mut job = inst.jobs[0].clone();
        job.predecessors.clear();
        job.linked.clear();
        let id = inst.jobs.len();
        inst.projects[0].jobs.push(id);
        inst.jobs.push(job);
    }
    inst
}
