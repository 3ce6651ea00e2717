//! The three master models and the auxiliary attacker models.
//!
//! All builders index arcs by their augmented id: `y[a]`, `p[a]` exist for
//! every arc, with fictive arcs fixed to selected and unprotected.

mod bilevel;
mod cutset;
mod flow;
mod types;

use milp::{Cmp, Model, Sense, VarId};
use thiserror::Error;

use crate::graph::AugmentedInstance;

pub use bilevel::{
    build_2lp, build_bilevel_master, build_cutset_separation, build_strengthening, AttackModel, BilevelMaster,
    CutModel,
};
pub use cutset::{build_cutset_master, CutRows, CutsetMaster, CutsetOptions, SubsetRows};
pub use flow::{build_flow_master, FlowMaster};
pub use types::{
    eval_ms, g_value, max_loss_subset, CutSet, CutSetError, Design, DesignError, ExtremePoint, FailureScenario,
    ScenarioError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulationError {
    #[error("cut #{cut} would need {rows} deletion rows, above the cap of {cap}")]
    RowCap { cut: usize, rows: u128, cap: u64 },
    #[error("scenario #{0} is listed twice")]
    DuplicateScenario(usize),
    #[error("extreme point #{index} is invalid: {reason}")]
    InvalidPoint { index: usize, reason: String },
}

/// Design variables shared by every master model.
#[derive(Debug, Clone)]
pub struct DesignVars {
    pub y: Vec<VarId>,
    pub p: Vec<VarId>,
}

impl DesignVars {
    /// Adds `y`, `p`, the cost objective, the protection budget row and,
    /// optionally, `p ≤ y` on initial arcs.
    fn add(model: &mut Model, aug: &AugmentedInstance, p_within_y: bool) -> Self {
        let mut y = Vec::with_capacity(aug.num_arcs());
        let mut p = Vec::with_capacity(aug.num_arcs());
        for a in 0..aug.num_arcs() {
            y.push(model.add_binary(format!("y{a}")));
            p.push(model.add_binary(format!("p{a}")));
        }
        for a in aug.fictive_arcs() {
            model.fix(y[a], 1.0);
            model.fix(p[a], 0.0);
        }
        model.add_row("protect_budget", aug.initial_arcs().map(|a| (p[a], 1.0)), Cmp::Le, aug.k_protect() as f64);
        if p_within_y {
            for a in aug.initial_arcs() {
                model.add_row(format!("p_le_y{a}"), [(p[a], 1.0), (y[a], -1.0)], Cmp::Le, 0.0);
            }
        }
        model.set_objective(Sense::Minimize, aug.arcs().iter().enumerate().map(|(a, arc)| (y[a], arc.cost as f64)));
        Self { y, p }
    }

    pub fn design(&self, aug: &AugmentedInstance, values: &[f64]) -> Result<Design, DesignError> {
        let y: Vec<f64> = self.y.iter().map(|v| values[v.0]).collect();
        let p: Vec<f64> = self.p.iter().map(|v| values[v.0]).collect();
        Design::from_values(aug, &y, &p)
    }

    /// Writes `design` into a full assignment vector.
    pub fn write(&self, design: &Design, values: &mut [f64]) {
        for (a, (&y, &p)) in self.y.iter().zip(&self.p).enumerate() {
            values[y.0] = design.is_selected(a) as u8 as f64;
            values[p.0] = design.is_protected(a) as u8 as f64;
        }
    }
}

/// Adds the dual cut polyhedron `D`: `λ, γ ∈ [0,1]`, `μ ∈ [0,1]` (binary if
/// asked), `μ_r = 1`, `μ_s = 0` and `λ_ij + γ_ij − μ_i + μ_j ≥ 0`.
fn add_cut_polyhedron(model: &mut Model, aug: &AugmentedInstance, binary_mu: bool) -> (Vec<VarId>, Vec<VarId>, Vec<VarId>) {
    let lambda: Vec<VarId> = (0..aug.num_arcs()).map(|a| model.add_continuous(format!("lambda{a}"), 0.0, 1.0)).collect();
    let gamma: Vec<VarId> = (0..aug.num_arcs()).map(|a| model.add_continuous(format!("gamma{a}"), 0.0, 1.0)).collect();
    let mu: Vec<VarId> = (0..aug.num_vertices())
        .map(|v| model.add_var(format!("mu{v}"), 0.0, 1.0, binary_mu))
        .collect();
    model.fix(mu[aug.root()], 1.0);
    model.fix(mu[aug.sink()], 0.0);
    for (a, arc) in aug.arcs().iter().enumerate() {
        model.add_row(
            format!("dual{a}"),
            [(lambda[a], 1.0), (gamma[a], 1.0), (mu[arc.tail], -1.0), (mu[arc.head], 1.0)],
            Cmp::Ge,
            0.0,
        );
    }
    (lambda, gamma, mu)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
