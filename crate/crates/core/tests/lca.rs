mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use setcover_lca::global::{run_sqrt, AlgoParams};
use setcover_lca::lca::{
    oracle_recsplit_element, oracle_recsplit_set, oracle_sqrt_element, oracle_sqrt_set, profile, OracleContext,
    OracleFamily, OracleKind,
};
use setcover_lca::setsystem::{InstanceKind, MeteredSystem, SetSystem};
use setcover_lca::tape::RandomTape;
use setcover_lca::Error;

use common::{small_system, system};

const KINDS: [OracleKind; 4] = [
    OracleKind::SqrtSet,
    OracleKind::SqrtElement,
    OracleKind::RecSplitSet,
    OracleKind::RecSplitElement,
];

fn all_ids(sys: &SetSystem, kind: OracleKind) -> Vec<u32> {
    let n = if kind.is_element() { sys.num_elements() } else { sys.num_sets() };
    (0..n as u32).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn answers_ignore_call_order(sys in small_system(40), seed: u64, shuffle: u64) {
        let params = AlgoParams::default();
        for kind in KINDS {
            let ids = all_ids(&sys, kind);
            let mut ctx = OracleContext::new(&sys, RandomTape::new(seed), &params).unwrap();
            let forward: Vec<_> = ids.iter().map(|&id| (kind.ask(&mut ctx, id).unwrap(), ctx.last_queries())).collect();
            let mut order = ids.clone();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
            let mut fresh = OracleContext::new(&sys, RandomTape::new(seed), &params).unwrap();
            for &id in &order {
                let got = (kind.ask(&mut fresh, id).unwrap(), fresh.last_queries());
                prop_assert_eq!(got, forward[id as usize], "{} id {}", kind.name(), id);
            }
        }
    }
}

#[test]
fn single_set_instance_answers_true_cheaply() {
    let sys = SetSystem::new(3, vec![vec![0, 1, 2]], 3, 1).unwrap();
    let mut ctx = OracleContext::new(&sys, RandomTape::new(9), &AlgoParams::default()).unwrap();
    assert!(oracle_sqrt_set(&mut ctx, 0).unwrap());
    assert!(ctx.last_queries() <= 4);
    assert!(oracle_recsplit_set(&mut ctx, 0).unwrap());
    assert!(ctx.last_queries() <= 4);
    assert!(matches!(oracle_sqrt_set(&mut ctx, 1), Err(Error::Domain(_))));
    assert!(matches!(oracle_recsplit_element(&mut ctx, 3), Err(Error::Domain(_))));
}

#[test]
fn degree_one_element_is_credited_to_its_set() {
    let sys = SetSystem::new(4, vec![vec![0, 1], vec![1, 2, 3], vec![2, 3]], 3, 2).unwrap();
    for seed in 0..10 {
        let mut ctx = OracleContext::new(&sys, RandomTape::new(seed), &AlgoParams::default()).unwrap();
        assert_eq!(oracle_sqrt_element(&mut ctx, 0).unwrap(), (true, Some(0)));
        assert_eq!(oracle_recsplit_element(&mut ctx, 0).unwrap(), (true, Some(0)));
    }
}

#[test]
fn query_counts_are_reproducible() {
    let sys = system(300, 150, 8, 8, InstanceKind::UniformRandom, 4);
    let params = AlgoParams::default();
    let ids: Vec<u32> = (0..150).step_by(7).collect();
    for kind in [OracleKind::SqrtSet, OracleKind::RecSplitSet] {
        let run = || {
            let mut ctx = OracleContext::new(&sys, RandomTape::new(1), &params).unwrap();
            let p = profile(&mut ctx, kind, &ids).unwrap();
            (p, ctx.level_breakdown().clone())
        };
        let (a, levels) = run();
        let (b, _) = run();
        assert_eq!(a, b);
        assert_eq!(levels.values().sum::<u64>(), a.q_total);
        assert_eq!(a.calls, ids.len() as u64);
        assert!(a.q_max as f64 >= a.q_mean);
    }
}

#[test]
fn meter_cap_surfaces_as_an_error() {
    let sys = system(300, 150, 8, 8, InstanceKind::UniformRandom, 4);
    let mut ctx = OracleContext::new(&sys, RandomTape::new(1), &AlgoParams::default()).unwrap().with_cap(2);
    let capped = (0..150).map(|s| oracle_recsplit_set(&mut ctx, s)).find(|r| r.is_err());
    assert!(matches!(capped, Some(Err(Error::BudgetExceeded { cap: 2 }))));
    assert!(profile(&mut ctx, OracleKind::SqrtSet, &[]).is_err());
}

#[test]
fn oracle_beats_simulating_the_whole_run() {
    let sys = system(2000, 1000, 8, 8, InstanceKind::UniformRandom, 0);
    let params = AlgoParams::default();
    let metered = MeteredSystem::new(&sys);
    run_sqrt(&metered, &RandomTape::new(0), &params).unwrap();
    let global = metered.queries();
    let mut ctx = OracleContext::new(&sys, RandomTape::new(0), &params).unwrap();
    let ids: Vec<u32> = (0..1000).step_by(10).collect();
    let p = profile(&mut ctx, OracleKind::SqrtSet, &ids).unwrap();
    assert!(p.q_max < global, "oracle {} vs global {global}", p.q_max);
}

#[test]
fn mismatch_search_is_clean_on_a_small_instance() {
    let sys = system(80, 40, 8, 8, InstanceKind::PlantedCover, 2);
    let params = AlgoParams::default();
    for family in OracleFamily::ALL {
        let mut ctx = OracleContext::new(&sys, RandomTape::new(5), &params).unwrap();
        assert_eq!(setcover_lca::lca::first_mismatch(&mut ctx, family, &params).unwrap(), None);
    }
}
