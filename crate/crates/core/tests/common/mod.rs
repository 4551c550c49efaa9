#![allow(dead_code)]

use proptest::prelude::*;
use setcover_lca::setsystem::{generate, InstanceKind, InstanceSpec, SetSystem};

pub const KINDS: [InstanceKind; 3] = [InstanceKind::UniformRandom, InstanceKind::PlantedCover, InstanceKind::WorstCaseChain];

/// Feasible generator specs with small n.
pub fn small_spec(max_n: usize) -> impl Strategy<Value = InstanceSpec> {
    (1..=max_n, 1usize..=12, 1usize..=10, 0usize..3, 0.0f64..1.0, any::<u64>()).prop_map(|(n, s, t, kind, frac, seed)| {
        let blocks = n.div_ceil(s);
        // A planted or chunked partition uses one incidence of every element.
        let cap = if kind == 0 { n * t } else { blocks + n * (t - 1) };
        let hi = cap.min(3 * blocks + 5);
        let m = blocks + (frac * (hi - blocks) as f64) as usize;
        InstanceSpec { n, m, s, t, kind: KINDS[kind], seed }
    })
}

pub fn small_system(max_n: usize) -> impl Strategy<Value = SetSystem> {
    small_spec(max_n).prop_map(|spec| generate(&spec).unwrap_or_else(|e| panic!("{spec:?}: {e}")).system)
}

pub fn system(n: usize, m: usize, s: usize, t: usize, kind: InstanceKind, seed: u64) -> SetSystem {
    generate(&InstanceSpec { n, m, s, t, kind, seed }).unwrap().system
}
