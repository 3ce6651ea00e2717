//! Independent oracles and fixtures shared by the integration tests. Nothing
//! here calls the library's max-flow or verifier.

#![allow(dead_code)]

use cprsnp::generate::{generate, Capacities, GenParams};
use cprsnp::graph::Arc;
use cprsnp::{augment, ArcMask, AugmentedInstance, Design, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// r=1, a=2, t=3; arcs r→a (cost 1), r→t (cost 2), a→t (cost 1), all u=1.
pub fn diamond(k: usize, kp: usize) -> Instance {
    let arcs = vec![
        Arc { tail: 0, head: 1, cost: 1, capacity: 1 },
        Arc { tail: 0, head: 2, cost: 2, capacity: 1 },
        Arc { tail: 1, head: 2, cost: 1, capacity: 1 },
    ];
    Instance::with_numbered_vertices(3, arcs, 0, vec![2], k, kp).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small generated instance; sizes drawn from `seed`.
pub fn small_instance(seed: u64, max_nodes: usize, max_arcs: usize, max_terminals: usize, k: usize, kp: usize) -> Instance {
    let mut r = rng(seed ^ 0x5eed);
    let nodes = r.gen_range(4..=max_nodes);
    let terminals = r.gen_range(1..=max_terminals.min(nodes - 1));
    let lo = (nodes - 1).max(k + kp);
    let hi = max_arcs.min((nodes - 1) * (nodes - 1)).max(lo);
    let arcs = r.gen_range(lo..=hi);
    let capacities = if r.gen_bool(0.5) { Capacities::Random } else { Capacities::Uniform(None) };
    let params = GenParams { nodes, terminals, arcs, capacities, seed, k, k_protect: kp };
    generate(&params).unwrap()
}

/// Random canonical design: each initial arc selected with probability
/// `density`, then up to `k'` selected arcs protected.
pub fn random_design(aug: &AugmentedInstance, r: &mut ChaCha8Rng, density: f64) -> Design {
    let selected: Vec<usize> = aug.initial_arcs().filter(|_| r.gen_bool(density)).collect();
    let mut protected = Vec::new();
    for &a in &selected {
        if protected.len() < aug.k_protect() && r.gen_bool(0.5) {
            protected.push(a);
        }
    }
    Design::from_arcs(aug, selected, protected).unwrap()
}

/// Minimum `r`–`s` cut capacity by enumerating every vertex bipartition.
pub fn brute_min_cut(aug: &AugmentedInstance, caps: &[u64]) -> u64 {
    let n = aug.num_vertices();
    let free: Vec<usize> = (0..n).filter(|&v| v != aug.root() && v != aug.sink()).collect();
    let mut best = u64::MAX;
    for mask in 0u64..(1 << free.len()) {
        let mut sink_side = vec![false; n];
        sink_side[aug.sink()] = true;
        for (i, &v) in free.iter().enumerate() {
            sink_side[v] = mask >> i & 1 == 1;
        }
        let cap = aug
            .arcs()
            .iter()
            .enumerate()
            .filter(|(_, a)| !sink_side[a.tail] && sink_side[a.head])
            .map(|(i, _)| caps[i])
            .sum();
        best = best.min(cap);
    }
    best
}

/// Capacities of `design` after `failed` break down, computed from scratch.
pub fn caps_after(aug: &AugmentedInstance, design: &Design, failed: &[usize]) -> Vec<u64> {
    (0..aug.num_arcs())
        .map(|a| {
            let alive = design.is_selected(a) && (design.is_protected(a) || !failed.contains(&a));
            if alive { aug.arc(a).capacity } else { 0 }
        })
        .collect()
}

/// Smallest post-attack max-flow: every subset of at most `k` initial arcs
/// is tried, flows by bipartition enumeration.
pub fn brute_worst_flow(aug: &AugmentedInstance, design: &Design) -> u64 {
    let m = aug.num_initial();
    let mut best = u64::MAX;
    for mask in 0u64..(1 << m) {
        if mask.count_ones() as usize > aug.k() {
            continue;
        }
        let failed: Vec<usize> = (0..m).filter(|&a| mask >> a & 1 == 1).collect();
        best = best.min(brute_min_cut(aug, &caps_after(aug, design, &failed)));
    }
    best
}

/// Cheapest design surviving every attack, by enumerating all `y` and all
/// `p ⊆ y` with `|p| ≤ k'`. Only for very small instances.
pub fn brute_optimum(aug: &AugmentedInstance) -> Option<u64> {
    let m = aug.num_initial();
    let mut best: Option<u64> = None;
    for y in 0u32..(1 << m) {
        let cost: u64 = (0..m).filter(|&a| y >> a & 1 == 1).map(|a| aug.arc(a).cost).sum();
        if best.is_some_and(|b| cost >= b) {
            continue;
        }
        for p in 0u32..(1 << m) {
            if p & !y != 0 || p.count_ones() as usize > aug.k_protect() {
                continue;
            }
            let design = Design::from_arcs(
                aug,
                (0..m).filter(|&a| y >> a & 1 == 1),
                (0..m).filter(|&a| p >> a & 1 == 1),
            )
            .unwrap();
            if brute_worst_flow(aug, &design) >= aug.demand() {
                best = Some(cost);
                break;
            }
        }
    }
    best
}

pub fn mask_of(aug: &AugmentedInstance, caps: &[u64]) -> ArcMask {
    let mut m = ArcMask::zero(aug);
    for (a, &c) in caps.iter().enumerate() {
        m.set(a, c);
    }
    m
}

pub fn augmented(inst: &Instance) -> AugmentedInstance {
    augment(inst).unwrap()
}
