//! Seeded random instances that always route `|T|` units without failures.
//!
//! A random tree rooted at vertex 1 spans every vertex and carries enough
//! capacity for the terminals below each of its arcs; the remaining arcs are
//! drawn uniformly among the pairs not entering the root.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Arc, Instance};

pub const COST_RANGE: (u64, u64) = (1, 20);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacities {
    /// Every arc gets the same capacity; `None` picks `ceil(|T|/2)`.
    Uniform(Option<u64>),
    /// Tree arcs draw from `[need, |T|]`, other arcs from `[1, |T|]`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub nodes: usize,
    pub terminals: usize,
    pub arcs: usize,
    pub capacities: Capacities,
    pub seed: u64,
    pub k: usize,
    pub k_protect: usize,
}

impl GenParams {
    pub fn new(nodes: usize, terminals: usize, arcs: usize, capacities: Capacities, seed: u64) -> Self {
        Self { nodes, terminals, arcs, capacities, seed, k: 0, k_protect: 0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least 2 vertices")]
    TooFewNodes,
    #[error("{terminals} terminals do not fit among {nodes} vertices besides the root")]
    TooManyTerminals { terminals: usize, nodes: usize },
    #[error("{arcs} arcs cannot connect {nodes} vertices (minimum {min})")]
    TooFewArcs { arcs: usize, nodes: usize, min: usize },
    #[error("{arcs} arcs exceed the {max} possible arcs not entering the root")]
    TooManyArcs { arcs: usize, max: usize },
    #[error("uniform capacity {value} is below ceil(|T|/2) = {min}")]
    UniformTooSmall { value: u64, min: u64 },
    #[error("failure budget {k} plus protection budget {kp} exceeds arc count {arcs}")]
    BudgetTooLarge { k: usize, kp: usize, arcs: usize },
}

pub fn generate(params: &GenParams) -> Result<Instance, GenError> {
    let GenParams { nodes: n, terminals: nt, arcs: m, capacities, seed, k, k_protect } = *params;
    if n < 2 {
        return Err(GenError::TooFewNodes);
    }
    if nt >= n {
        return Err(GenError::TooManyTerminals { terminals: nt, nodes: n });
    }
    if m < n - 1 {
        return Err(GenError::TooFewArcs { arcs: m, nodes: n, min: n - 1 });
    }
    let max = (n - 1) * (n - 1);
    if m > max {
        return Err(GenError::TooManyArcs { arcs: m, max });
    }
    if k + k_protect > m {
        return Err(GenError::BudgetTooLarge { k, kp: k_protect, arcs: m });
    }
    let half = (nt as u64).div_ceil(2).max(1);
    let uniform = match capacities {
        Capacities::Uniform(Some(u)) if u < half => return Err(GenError::UniformTooSmall { value: u, min: half }),
        Capacities::Uniform(u) => Some(u.unwrap_or(half)),
        Capacities::Random => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = 0;
    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(&mut rng);
    let is_terminal: HashSet<usize> = index::sample(&mut rng, n - 1, nt).into_iter().map(|i| i + 1).collect();

    // Random tree in `order`; with uniform capacity u, no subtree hanging
    // off the root may hold more than u terminals.
    let limit = uniform.map_or(usize::MAX, |u| u as usize);
    let mut parent = vec![usize::MAX; n];
    let mut branch = vec![usize::MAX; n];
    let mut branch_load = vec![0usize; n];
    let mut placed = vec![root];
    for &v in &order {
        let t = is_terminal.contains(&v) as usize;
        let allowed: Vec<usize> =
            placed.iter().copied().filter(|&w| w == root || branch_load[branch[w]] + t <= limit).collect();
        let p = *allowed.choose(&mut rng).expect("the root is always allowed");
        parent[v] = p;
        branch[v] = if p == root { v } else { branch[p] };
        branch_load[branch[v]] += t;
        placed.push(v);
    }
    // terminals below each tree arc, children before parents
    let mut need = vec![0u64; n];
    for &v in order.iter().rev() {
        need[v] += is_terminal.contains(&v) as u64;
        if parent[v] != root {
            need[parent[v]] += need[v];
        }
    }

    let nt64 = nt as u64;
    let cost = |rng: &mut ChaCha8Rng| rng.gen_range(COST_RANGE.0..=COST_RANGE.1);
    let mut arcs = Vec::with_capacity(m);
    let mut used = HashSet::new();
    for &v in &order {
        let capacity = match uniform {
            Some(u) => u,
            None => rng.gen_range(need[v].max(1)..=nt64.max(1)),
        };
        used.insert((parent[v], v));
        arcs.push(Arc { tail: parent[v], head: v, cost: cost(&mut rng), capacity });
    }
    let others: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && !used.contains(&(i, j)))
        .collect();
    let mut picks = index::sample(&mut rng, others.len(), m - (n - 1)).into_vec();
    picks.sort_unstable();
    for i in picks {
        let (tail, head) = others[i];
        let capacity = match uniform {
            Some(u) => u,
            None => rng.gen_range(1..=nt64.max(1)),
        };
        arcs.push(Arc { tail, head, cost: cost(&mut rng), capacity });
    }
    arcs.sort_by_key(|a| (a.tail, a.head));

    let mut terminals: Vec<usize> = is_terminal.into_iter().collect();
    terminals.sort_unstable();
    Ok(Instance::with_numbered_vertices(n, arcs, root, terminals, k, k_protect).expect("generated instance is valid"))
}
