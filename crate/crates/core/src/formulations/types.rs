use thiserror::Error;

use crate::graph::{entering_arcs, ArcId, ArcMask, AugmentedInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("design vectors have length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("{protected} protected arcs exceed the protection budget {budget}")]
    OverBudget { protected: usize, budget: usize },
    #[error("arc #{0} does not exist")]
    UnknownArc(ArcId),
}

/// Selected arcs `y` and protected arcs `p`, indexed by augmented arc id.
///
/// Always canonical: fictive arcs selected and unprotected, `p ⊆ y`, and at
/// most `k'` protected arcs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Design {
    selected: Vec<bool>,
    protected: Vec<bool>,
}

impl Design {
    pub fn new(aug: &AugmentedInstance, mut selected: Vec<bool>, mut protected: Vec<bool>) -> Result<Self, DesignError> {
        let m = aug.num_arcs();
        for len in [selected.len(), protected.len()] {
            if len != m {
                return Err(DesignError::Length { got: len, expected: m });
            }
        }
        for a in aug.fictive_arcs() {
            selected[a] = true;
            protected[a] = false;
        }
        for a in 0..m {
            protected[a] &= selected[a];
        }
        let count = protected.iter().filter(|&&p| p).count();
        if count > aug.k_protect() {
            return Err(DesignError::OverBudget { protected: count, budget: aug.k_protect() });
        }
        Ok(Self { selected, protected })
    }

    pub fn from_arcs(
        aug: &AugmentedInstance,
        selected: impl IntoIterator<Item = ArcId>,
        protected: impl IntoIterator<Item = ArcId>,
    ) -> Result<Self, DesignError> {
        let m = aug.num_arcs();
        let mut y = vec![false; m];
        let mut p = vec![false; m];
        for (set, arcs) in [(&mut y, selected.into_iter().collect::<Vec<_>>()), (&mut p, protected.into_iter().collect())] {
            for a in arcs {
                if a >= m {
                    return Err(DesignError::UnknownArc(a));
                }
                set[a] = true;
            }
        }
        Self::new(aug, y, p)
    }

    /// Design read off 0/1 variable values (rounded at 0.5).
    pub fn from_values(aug: &AugmentedInstance, y: &[f64], p: &[f64]) -> Result<Self, DesignError> {
        Self::new(aug, y.iter().map(|&v| v > 0.5).collect(), p.iter().map(|&v| v > 0.5).collect())
    }

    /// Every arc selected, nothing protected.
    pub fn everything(aug: &AugmentedInstance) -> Self {
        Self { selected: vec![true; aug.num_arcs()], protected: vec![false; aug.num_arcs()] }
    }

    pub fn is_selected(&self, a: ArcId) -> bool {
        self.selected[a]
    }

    pub fn is_protected(&self, a: ArcId) -> bool {
        self.protected[a]
    }

    pub fn selected(&self) -> &[bool] {
        &self.selected
    }

    pub fn protected(&self) -> &[bool] {
        &self.protected
    }

    pub fn selected_initial(&self, aug: &AugmentedInstance) -> Vec<ArcId> {
        aug.initial_arcs().filter(|&a| self.selected[a]).collect()
    }

    pub fn protected_arcs(&self) -> Vec<ArcId> {
        (0..self.protected.len()).filter(|&a| self.protected[a]).collect()
    }

    /// Selected, non-protected initial arcs: the ones an attacker may delete.
    pub fn deletable(&self, aug: &AugmentedInstance) -> Vec<ArcId> {
        aug.initial_arcs().filter(|&a| self.selected[a] && !self.protected[a]).collect()
    }

    pub fn cost(&self, aug: &AugmentedInstance) -> u64 {
        aug.initial_arcs().filter(|&a| self.selected[a]).map(|a| aug.arc(a).cost).sum()
    }

    pub fn y_values(&self) -> Vec<f64> {
        self.selected.iter().map(|&b| b as u8 as f64).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.protected.iter().map(|&b| b as u8 as f64).collect()
    }

    /// Capacities left after `failed` breaks down; protected arcs survive.
    pub fn mask(&self, aug: &AugmentedInstance, failed: &[ArcId]) -> ArcMask {
        let mut mask = ArcMask::from_fn(aug, |a| self.selected[a]);
        for &a in failed {
            if !self.protected[a] && !aug.is_fictive(a) {
                mask.set(a, 0);
            }
        }
        mask
    }

    /// Componentwise `self ≥ other` on both `y` and `p`.
    pub fn dominates(&self, other: &Design) -> bool {
        let ge = |a: &[bool], b: &[bool]| a.iter().zip(b).all(|(&x, &y)| x || !y);
        ge(&self.selected, &other.selected) && ge(&self.protected, &other.protected)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutSetError {
    #[error("sink side must contain s and exclude r")]
    WrongSides,
    #[error("sink side {{s}} alone is not a generated cut")]
    SinkOnly,
    #[error("sink side has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
}

/// An `r`–`s` cut-set `δ⁻(V_S)` with `s ∈ V_S`, `r ∉ V_S`, `V_S ≠ {s}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutSet {
    sink_side: Vec<bool>,
    arcs: Vec<ArcId>,
}

impl CutSet {
    pub fn new(aug: &AugmentedInstance, sink_side: Vec<bool>) -> Result<Self, CutSetError> {
        if sink_side.len() != aug.num_vertices() {
            return Err(CutSetError::Length { got: sink_side.len(), expected: aug.num_vertices() });
        }
        if sink_side[aug.root()] || !sink_side[aug.sink()] {
            return Err(CutSetError::WrongSides);
        }
        if sink_side.iter().filter(|&&b| b).count() == 1 {
            return Err(CutSetError::SinkOnly);
        }
        let arcs = entering_arcs(aug, &sink_side);
        Ok(Self { sink_side, arcs })
    }

    /// `δ⁻(V \ {r})`: everything but the root on the sink side.
    pub fn all_but_root(aug: &AugmentedInstance) -> Result<Self, CutSetError> {
        let mut side = vec![true; aug.num_vertices()];
        side[aug.root()] = false;
        Self::new(aug, side)
    }

    pub fn sink_side(&self) -> &[bool] {
        &self.sink_side
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    /// Cut arcs an attacker could delete (initial arcs only).
    pub fn initial_arcs(&self, aug: &AugmentedInstance) -> Vec<ArcId> {
        self.arcs.iter().copied().filter(|&a| !aug.is_fictive(a)).collect()
    }

    /// Capacity of the selected arcs of the cut.
    pub fn selected_capacity(&self, aug: &AugmentedInstance, design: &Design) -> u64 {
        self.arcs.iter().filter(|&&a| design.is_selected(a)).map(|&a| aug.arc(a).capacity).sum()
    }
}

/// Largest capacity a `k`-deletion can remove from `cut` under `design`:
/// the `k` biggest capacities among selected, non-protected initial cut
/// arcs (all of them when fewer than `k` exist).
pub fn eval_ms(aug: &AugmentedInstance, cut: &CutSet, design: &Design) -> u64 {
    max_loss_subset(aug, cut, design).iter().map(|&a| aug.arc(a).capacity).sum()
}

/// The deletion set achieving [`eval_ms`]; ties resolved towards lower arc ids.
pub fn max_loss_subset(aug: &AugmentedInstance, cut: &CutSet, design: &Design) -> Vec<ArcId> {
    let mut cands: Vec<ArcId> = cut
        .initial_arcs(aug)
        .into_iter()
        .filter(|&a| design.is_selected(a) && !design.is_protected(a))
        .collect();
    cands.sort_by_key(|&a| (std::cmp::Reverse(aug.arc(a).capacity), a));
    cands.truncate(aug.k());
    cands.sort_unstable();
    cands
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("scenario has {got} arcs, expected k = {k}")]
    WrongSize { got: usize, k: usize },
    #[error("scenario contains fictive arc #{0}")]
    Fictive(ArcId),
    #[error("scenario repeats arc #{0}")]
    Repeated(ArcId),
}

/// `k` initial arcs failing together.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FailureScenario {
    arcs: Vec<ArcId>,
}

impl FailureScenario {
    pub fn new(aug: &AugmentedInstance, mut arcs: Vec<ArcId>) -> Result<Self, ScenarioError> {
        arcs.sort_unstable();
        if let Some(w) = arcs.windows(2).find(|w| w[0] == w[1]) {
            return Err(ScenarioError::Repeated(w[0]));
        }
        if let Some(&a) = arcs.iter().find(|&&a| aug.is_fictive(a) || a >= aug.num_arcs()) {
            return Err(ScenarioError::Fictive(a));
        }
        if arcs.len() != aug.k() {
            return Err(ScenarioError::WrongSize { got: arcs.len(), k: aug.k() });
        }
        Ok(Self { arcs })
    }

    /// Extends `core` with the lowest-indexed other initial arcs up to size `k`.
    pub fn padded(aug: &AugmentedInstance, core: &[ArcId]) -> Result<Self, ScenarioError> {
        let mut arcs = core.to_vec();
        for a in aug.initial_arcs() {
            if arcs.len() >= aug.k() {
                break;
            }
            if !arcs.contains(&a) {
                arcs.push(a);
            }
        }
        Self::new(aug, arcs)
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn contains(&self, a: ArcId) -> bool {
        self.arcs.binary_search(&a).is_ok()
    }
}

/// One vertex `(b, λ, γ, μ, l)` of the attacker's polyhedron.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremePoint {
    pub b: Vec<f64>,
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    pub mu: Vec<f64>,
    pub l: Vec<f64>,
}

impl ExtremePoint {
    /// Checks the polyhedron's defining constraints.
    pub fn check(&self, aug: &AugmentedInstance) -> Result<(), String> {
        const TOL: f64 = 1e-6;
        let m = aug.num_arcs();
        if [self.b.len(), self.lambda.len(), self.gamma.len(), self.l.len()].iter().any(|&n| n != m)
            || self.mu.len() != aug.num_vertices()
        {
            return Err("dimension mismatch".into());
        }
        let deleted: f64 = self.b.iter().sum();
        if deleted > aug.k() as f64 + TOL {
            return Err(format!("{deleted} deletions exceed k = {}", aug.k()));
        }
        for a in aug.fictive_arcs() {
            if self.b[a].abs() > TOL {
                return Err(format!("fictive arc {} deleted", aug.arc_name(a)));
            }
        }
        if (self.mu[aug.root()] - 1.0).abs() > TOL || self.mu[aug.sink()].abs() > TOL {
            return Err("mu must be 1 at r and 0 at s".into());
        }
        for (a, arc) in aug.arcs().iter().enumerate() {
            if self.lambda[a] + self.gamma[a] - self.mu[arc.tail] + self.mu[arc.head] < -TOL {
                return Err(format!("dual row violated on {}", aug.arc_name(a)));
            }
            let (b, g, l) = (self.b[a], self.gamma[a], self.l[a]);
            if l > b + TOL || l > g + TOL || l < g - (1.0 - b) - TOL {
                return Err(format!("l not in L(b, gamma) on {}", aug.arc_name(a)));
            }
        }
        Ok(())
    }

    /// Value of `g` for this point at `(y, p)`.
    pub fn g(&self, aug: &AugmentedInstance, y: &[f64], p: &[f64]) -> f64 {
        g_value(aug, y, p, &self.lambda, &self.gamma, &self.l)
    }
}

/// `g(y,p,λ,γ,l) = Σ u·y·λ + u·γ − u·l + u·p·γ`: the post-attack cut value
/// that the bilevel master's rows bound below by `|T|`.
pub fn g_value(aug: &AugmentedInstance, y: &[f64], p: &[f64], lambda: &[f64], gamma: &[f64], l: &[f64]) -> f64 {
    aug.arcs()
        .iter()
        .enumerate()
        .map(|(a, arc)| {
            let u = arc.capacity as f64;
            u * y[a] * lambda[a] + u * gamma[a] - u * l[a] + u * p[a] * gamma[a]
        })
        .sum()
}
