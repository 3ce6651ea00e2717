//! Directed graph model, super-sink augmentation and exact max-flow/min-cut.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

/// Label reserved for the super-sink added by [`augment`].
pub const SINK_LABEL: u64 = 0;

pub type VertexId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: u64,
    pub capacity: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc #{arc} references vertex {vertex} outside 0..{n}")]
    UnknownVertex { arc: usize, vertex: usize, n: usize },
    #[error("parallel arc ({tail}, {head})")]
    ParallelArc { tail: u64, head: u64 },
    #[error("root {0} is listed as a terminal")]
    RootIsTerminal(u64),
    #[error("terminal {0} listed twice")]
    DuplicateTerminal(u64),
    #[error("vertex id {0} out of range")]
    BadVertex(usize),
    #[error("failure budget {k} plus protection budget {kp} exceeds arc count {arcs}")]
    BudgetTooLarge { k: usize, kp: usize, arcs: usize },
    #[error("vertex label {0} collides with the super-sink label")]
    SinkCollision(u64),
    #[error("duplicate vertex label {0}")]
    DuplicateLabel(u64),
}

/// A rooted network design instance: digraph, root, terminals and budgets.
///
/// Vertices are dense ids `0..labels.len()`; `labels` keeps the external
/// names used in files and reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    labels: Vec<u64>,
    arcs: Vec<Arc>,
    root: VertexId,
    terminals: Vec<VertexId>,
    k: usize,
    k_protect: usize,
}

impl Instance {
    pub fn new(
        labels: Vec<u64>,
        arcs: Vec<Arc>,
        root: VertexId,
        terminals: Vec<VertexId>,
        k: usize,
        k_protect: usize,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut seen_labels = HashSet::new();
        for &l in &labels {
            if !seen_labels.insert(l) {
                return Err(GraphError::DuplicateLabel(l));
            }
        }
        if root >= n {
            return Err(GraphError::BadVertex(root));
        }
        let mut seen = HashSet::new();
        for (i, a) in arcs.iter().enumerate() {
            for v in [a.tail, a.head] {
                if v >= n {
                    return Err(GraphError::UnknownVertex { arc: i, vertex: v, n });
                }
            }
            if !seen.insert((a.tail, a.head)) {
                return Err(GraphError::ParallelArc { tail: labels[a.tail], head: labels[a.head] });
            }
        }
        let mut seen_t = HashSet::new();
        for &t in &terminals {
            if t >= n {
                return Err(GraphError::BadVertex(t));
            }
            if t == root {
                return Err(GraphError::RootIsTerminal(labels[t]));
            }
            if !seen_t.insert(t) {
                return Err(GraphError::DuplicateTerminal(labels[t]));
            }
        }
        if k + k_protect > arcs.len() {
            return Err(GraphError::BudgetTooLarge { k, kp: k_protect, arcs: arcs.len() });
        }
        Ok(Self { labels, arcs, root, terminals, k, k_protect })
    }

    /// Instance over vertices labelled `1..=n`.
    pub fn with_numbered_vertices(
        n: usize,
        arcs: Vec<Arc>,
        root: VertexId,
        terminals: Vec<VertexId>,
        k: usize,
        k_protect: usize,
    ) -> Result<Self, GraphError> {
        Self::new((1..=n as u64).collect(), arcs, root, terminals, k, k_protect)
    }

    /// Same graph with different failure/protection budgets.
    pub fn with_budgets(&self, k: usize, k_protect: usize) -> Result<Self, GraphError> {
        Self::new(self.labels.clone(), self.arcs.clone(), self.root, self.terminals.clone(), k, k_protect)
    }

    /// Every arc flipped. Used for collection networks where flow runs
    /// from the terminals towards the root.
    pub fn reversed(&self) -> Self {
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc { tail: a.head, head: a.tail, ..*a })
            .collect();
        Self { arcs, ..self.clone() }
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v]
    }

    pub fn vertex_by_label(&self, label: u64) -> Option<VertexId> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn k_protect(&self) -> usize {
        self.k_protect
    }

    pub fn find_arc(&self, tail: VertexId, head: VertexId) -> Option<ArcId> {
        self.arcs.iter().position(|a| a.tail == tail && a.head == head)
    }

    /// `|V|-|T|-|A|` as used in benchmark tables.
    pub fn size_label(&self) -> String {
        format!("{}-{}-{}", self.num_vertices(), self.terminals.len(), self.arcs.len())
    }
}

/// An instance with a super-sink `s` and one unit-capacity, zero-cost
/// fictive arc `(t, s)` per terminal. Arcs `0..num_initial()` are the
/// original ones, in their original order; fictive arcs follow in terminal
/// order.
#[derive(Debug, Clone)]
pub struct AugmentedInstance {
    instance: Instance,
    arcs: Vec<Arc>,
    sink: VertexId,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
}

pub fn augment(instance: &Instance) -> Result<AugmentedInstance, GraphError> {
    if instance.labels.contains(&SINK_LABEL) {
        return Err(GraphError::SinkCollision(SINK_LABEL));
    }
    let sink = instance.num_vertices();
    let mut arcs = instance.arcs.clone();
    arcs.extend(instance.terminals.iter().map(|&t| Arc { tail: t, head: sink, cost: 0, capacity: 1 }));
    let n = sink + 1;
    let mut out_arcs = vec![Vec::new(); n];
    let mut in_arcs = vec![Vec::new(); n];
    for (i, a) in arcs.iter().enumerate() {
        out_arcs[a.tail].push(i);
        in_arcs[a.head].push(i);
    }
    Ok(AugmentedInstance { instance: instance.clone(), arcs, sink, out_arcs, in_arcs })
}

impl AugmentedInstance {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// Vertex count including the super-sink.
    pub fn num_vertices(&self) -> usize {
        self.sink + 1
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_initial(&self) -> usize {
        self.instance.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[a]
    }

    pub fn initial_arcs(&self) -> std::ops::Range<ArcId> {
        0..self.num_initial()
    }

    pub fn fictive_arcs(&self) -> std::ops::Range<ArcId> {
        self.num_initial()..self.arcs.len()
    }

    pub fn is_fictive(&self, a: ArcId) -> bool {
        a >= self.num_initial()
    }

    pub fn root(&self) -> VertexId {
        self.instance.root
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.instance.terminals
    }

    /// Flow value that must reach the super-sink: `|T|`.
    pub fn demand(&self) -> u64 {
        self.instance.terminals.len() as u64
    }

    pub fn k(&self) -> usize {
        self.instance.k
    }

    pub fn k_protect(&self) -> usize {
        self.instance.k_protect
    }

    pub fn out_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.in_arcs[v]
    }

    /// Vertex label for reports; the super-sink prints as `s`.
    pub fn vertex_name(&self, v: VertexId) -> String {
        if v == self.sink {
            "s".to_string()
        } else {
            self.instance.label(v).to_string()
        }
    }

    pub fn arc_name(&self, a: ArcId) -> String {
        let arc = &self.arcs[a];
        format!("({},{})", self.vertex_name(arc.tail), self.vertex_name(arc.head))
    }
}

/// Effective capacity per arc of an [`AugmentedInstance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcMask {
    caps: Vec<u64>,
}

impl ArcMask {
    /// Every arc at its nominal capacity.
    pub fn full(aug: &AugmentedInstance) -> Self {
        Self { caps: aug.arcs.iter().map(|a| a.capacity).collect() }
    }

    pub fn zero(aug: &AugmentedInstance) -> Self {
        Self { caps: vec![0; aug.num_arcs()] }
    }

    /// Nominal capacity on arcs where `alive` holds, zero elsewhere.
    pub fn from_fn(aug: &AugmentedInstance, alive: impl Fn(ArcId) -> bool) -> Self {
        Self {
            caps: aug
                .arcs
                .iter()
                .enumerate()
                .map(|(i, a)| if alive(i) { a.capacity } else { 0 })
                .collect(),
        }
    }

    pub fn caps(&self) -> &[u64] {
        &self.caps
    }

    pub fn cap(&self, a: ArcId) -> u64 {
        self.caps[a]
    }

    pub fn set(&mut self, a: ArcId, cap: u64) {
        self.caps[a] = cap;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    pub value: u64,
    /// Flow per arc of the augmented instance.
    pub arc_flow: Vec<u64>,
}

/// An `r`–`s` cut given by its sink side `V_S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub sink_side: Vec<bool>,
    /// `δ⁻(V_S)`: arcs entering the sink side.
    pub arcs: Vec<ArcId>,
    pub capacity: u64,
}

/// Arcs entering the vertex set marked by `sink_side`.
pub fn entering_arcs(aug: &AugmentedInstance, sink_side: &[bool]) -> Vec<ArcId> {
    aug.arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| !sink_side[a.tail] && sink_side[a.head])
        .map(|(i, _)| i)
        .collect()
}

struct Dinic<'a> {
    aug: &'a AugmentedInstance,
    residual_fwd: Vec<u64>,
    residual_bwd: Vec<u64>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl<'a> Dinic<'a> {
    fn new(aug: &'a AugmentedInstance, mask: &ArcMask) -> Self {
        Self {
            aug,
            residual_fwd: mask.caps.clone(),
            residual_bwd: vec![0; aug.num_arcs()],
            level: vec![-1; aug.num_vertices()],
            next: vec![0; aug.num_vertices()],
        }
    }

    fn residual(&self, a: ArcId, forward: bool) -> u64 {
        if forward { self.residual_fwd[a] } else { self.residual_bwd[a] }
    }

    fn bfs(&mut self, source: VertexId, sink: VertexId) -> bool {
        self.level.fill(-1);
        self.level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let aug = self.aug;
            let fwd = aug.out_arcs[v].iter().map(|&a| (a, true, aug.arcs[a].head));
            let bwd = aug.in_arcs[v].iter().map(|&a| (a, false, aug.arcs[a].tail));
            for (a, forward, w) in fwd.chain(bwd) {
                if self.level[w] < 0 && self.residual(a, forward) > 0 {
                    self.level[w] = self.level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        self.level[sink] >= 0
    }

    fn dfs(&mut self, v: VertexId, sink: VertexId, pushed: u64) -> u64 {
        if v == sink {
            return pushed;
        }
        let degree = self.aug.out_arcs[v].len() + self.aug.in_arcs[v].len();
        while self.next[v] < degree {
            let i = self.next[v];
            let (a, fwd, w) = if i < self.aug.out_arcs[v].len() {
                let a = self.aug.out_arcs[v][i];
                (a, true, self.aug.arcs[a].head)
            } else {
                let a = self.aug.in_arcs[v][i - self.aug.out_arcs[v].len()];
                (a, false, self.aug.arcs[a].tail)
            };
            let r = self.residual(a, fwd);
            if r > 0 && self.level[w] == self.level[v] + 1 {
                let got = self.dfs(w, sink, pushed.min(r));
                if got > 0 {
                    if fwd {
                        self.residual_fwd[a] -= got;
                        self.residual_bwd[a] += got;
                    } else {
                        self.residual_bwd[a] -= got;
                        self.residual_fwd[a] += got;
                    }
                    return got;
                }
            }
            self.next[v] += 1;
        }
        0
    }

    fn run(&mut self, source: VertexId, sink: VertexId) -> u64 {
        if source == sink {
            return 0;
        }
        let mut total = 0;
        while self.bfs(source, sink) {
            self.next.fill(0);
            loop {
                let f = self.dfs(source, sink, u64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }
}

/// Maximum `source`–`sink` flow under the capacities of `mask` (Dinic).
pub fn max_flow(aug: &AugmentedInstance, mask: &ArcMask, source: VertexId, sink: VertexId) -> Flow {
    let mut d = Dinic::new(aug, mask);
    let value = d.run(source, sink);
    Flow { value, arc_flow: d.residual_bwd }
}

/// Maximum `r`–`s` flow value.
pub fn flow_value(aug: &AugmentedInstance, mask: &ArcMask) -> u64 {
    max_flow(aug, mask, aug.root(), aug.sink()).value
}

/// Minimum `r`–`s` cut. The source side is the residual reachability set
/// of a maximum flow, so the returned cut is the one closest to the root.
pub fn min_cut(aug: &AugmentedInstance, mask: &ArcMask) -> Cut {
    let (source, sink) = (aug.root(), aug.sink());
    let mut d = Dinic::new(aug, mask);
    d.run(source, sink);
    d.bfs(source, sink);
    let sink_side: Vec<bool> = d.level.iter().map(|&l| l < 0).collect();
    let arcs = entering_arcs(aug, &sink_side);
    let capacity = arcs.iter().map(|&a| mask.cap(a)).sum();
    Cut { sink_side, arcs, capacity }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// r=1, a=2, t=3; arcs r→a (cost 1), r→t (cost 2), a→t (cost 1), all u=1.
    pub(crate) fn diamond(k: usize, kp: usize) -> Instance {
        let arcs = vec![
            Arc { tail: 0, head: 1, cost: 1, capacity: 1 },
            Arc { tail: 0, head: 2, cost: 2, capacity: 1 },
            Arc { tail: 1, head: 2, cost: 1, capacity: 1 },
        ];
        Instance::with_numbered_vertices(3, arcs, 0, vec![2], k, kp).unwrap()
    }

    #[test]
    fn augment_adds_sink_and_fictive_arcs() {
        let inst = diamond(1, 0);
        let aug = augment(&inst).unwrap();
        assert_eq!(aug.num_arcs(), 4);
        assert_eq!(aug.num_vertices(), 4);
        assert_eq!(aug.demand(), 1);
        let f = aug.arc(3);
        assert_eq!((f.tail, f.head, f.cost, f.capacity), (2, 3, 0, 1));
        assert!(aug.is_fictive(3) && !aug.is_fictive(2));
        assert_eq!(&aug.arcs()[..3], inst.arcs());
    }

    #[test]
    fn augment_without_terminals() {
        let inst = Instance::with_numbered_vertices(2, vec![Arc { tail: 0, head: 1, cost: 1, capacity: 1 }], 0, vec![], 0, 0)
            .unwrap();
        let aug = augment(&inst).unwrap();
        assert_eq!(aug.demand(), 0);
        assert!(aug.in_arcs(aug.sink()).is_empty());
        assert_eq!(flow_value(&aug, &ArcMask::full(&aug)), 0);
    }

    #[test]
    fn augment_rejects_sink_label() {
        let inst = Instance::new(vec![0, 5], vec![], 1, vec![0], 0, 0).unwrap();
        assert_eq!(augment(&inst).unwrap_err(), GraphError::SinkCollision(0));
    }

    #[test]
    fn instance_invariants() {
        let a = |t, h| Arc { tail: t, head: h, cost: 1, capacity: 1 };
        assert!(matches!(
            Instance::with_numbered_vertices(2, vec![a(0, 1), a(0, 1)], 0, vec![1], 0, 0),
            Err(GraphError::ParallelArc { .. })
        ));
        assert!(matches!(
            Instance::with_numbered_vertices(2, vec![a(0, 1)], 0, vec![0], 0, 0),
            Err(GraphError::RootIsTerminal(1))
        ));
        assert!(matches!(
            Instance::with_numbered_vertices(2, vec![a(0, 1)], 0, vec![1], 1, 1),
            Err(GraphError::BudgetTooLarge { .. })
        ));
        assert!(matches!(
            Instance::with_numbered_vertices(2, vec![a(0, 4)], 0, vec![1], 0, 0),
            Err(GraphError::UnknownVertex { .. })
        ));
    }

    #[test]
    fn diamond_flows() {
        let aug = augment(&diamond(1, 0)).unwrap();
        assert_eq!(flow_value(&aug, &ArcMask::full(&aug)), 1);
        // only r→t selected, and it fails
        let mask = ArcMask::from_fn(&aug, |a| aug.is_fictive(a));
        assert_eq!(flow_value(&aug, &mask), 0);
    }

    #[test]
    fn diamond_min_cut_is_sink_only() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let cut = min_cut(&aug, &ArcMask::full(&aug));
        assert_eq!(cut.capacity, 1);
        let side: Vec<usize> = (0..4).filter(|&v| cut.sink_side[v]).collect();
        assert_eq!(side, vec![aug.sink()]);
        assert_eq!(cut.arcs, vec![3]);
    }

    #[test]
    fn zero_mask_cut_has_zero_capacity() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let cut = min_cut(&aug, &ArcMask::zero(&aug));
        assert_eq!(cut.capacity, 0);
        assert!(!cut.sink_side[aug.root()] && cut.sink_side[aug.sink()]);
    }

    #[test]
    fn reversal_flips_every_arc() {
        let inst = diamond(1, 0);
        let rev = inst.reversed();
        for (a, b) in inst.arcs().iter().zip(rev.arcs()) {
            assert_eq!((a.tail, a.head), (b.head, b.tail));
        }
        assert_eq!(rev.reversed(), inst);
    }
}
