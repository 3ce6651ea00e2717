use milp::{Cmp, Model, Sense, VarId};

use super::{add_cut_polyhedron, Design, DesignVars, ExtremePoint, FormulationError};
use crate::graph::AugmentedInstance;

#[derive(Debug, Clone)]
pub struct BilevelMaster {
    pub model: Model,
    pub vars: DesignVars,
}

/// Single-level bilevel master: `(y, p)` with `p ≤ y`, `Σp ≤ k'` and one row
/// `g(y, p, λʰ, γʰ, lʰ) ≥ |T|` per generated extreme point. The point's
/// values are constants, so each row is linear in `(y, p)`.
pub fn build_bilevel_master(aug: &AugmentedInstance, points: &[ExtremePoint]) -> Result<BilevelMaster, FormulationError> {
    let mut model = Model::new(Sense::Minimize);
    let vars = DesignVars::add(&mut model, aug, true);
    let demand = aug.demand() as f64;
    for (h, pt) in points.iter().enumerate() {
        pt.check(aug).map_err(|reason| FormulationError::InvalidPoint { index: h, reason })?;
        let mut constant = 0.0;
        let mut terms = Vec::new();
        for (a, arc) in aug.arcs().iter().enumerate() {
            let u = arc.capacity as f64;
            constant += u * pt.gamma[a] - u * pt.l[a];
            terms.push((vars.y[a], u * pt.lambda[a]));
            terms.push((vars.p[a], u * pt.gamma[a]));
        }
        model.add_row(format!("point{h}"), terms, Cmp::Ge, demand - constant);
    }
    Ok(BilevelMaster { model, vars })
}

/// Attacker model at a fixed design: binary deletions `b` plus the dual of
/// the defender's max-flow.
#[derive(Debug, Clone)]
pub struct AttackModel {
    pub model: Model,
    pub b: Vec<VarId>,
    pub lambda: Vec<VarId>,
    pub gamma: Vec<VarId>,
    pub mu: Vec<VarId>,
    pub l: Vec<VarId>,
}

impl AttackModel {
    pub fn point(&self, values: &[f64]) -> ExtremePoint {
        let pick = |vs: &[VarId]| vs.iter().map(|v| values[v.0]).collect();
        ExtremePoint {
            b: pick(&self.b),
            lambda: pick(&self.lambda),
            gamma: pick(&self.gamma),
            mu: pick(&self.mu),
            l: pick(&self.l),
        }
    }
}

/// The attacker's single-level problem at `design`:
/// `min Σ u·ŷ·λ + u·γ − u·l + u·p̂·γ` over `b ∈ B`, `(λ, μ, γ) ∈ D` and
/// `l ∈ L(b, γ)`, where `l` stands in for the product `b·γ`.
pub fn build_2lp(aug: &AugmentedInstance, design: &Design) -> AttackModel {
    let mut model = Model::new(Sense::Minimize);
    let m = aug.num_arcs();
    let b: Vec<VarId> = (0..m).map(|a| model.add_binary(format!("b{a}"))).collect();
    for a in aug.fictive_arcs() {
        model.fix(b[a], 0.0);
    }
    model.add_row("attack_budget", b.iter().map(|&v| (v, 1.0)), Cmp::Le, aug.k() as f64);
    let (lambda, gamma, mu) = add_cut_polyhedron(&mut model, aug, false);
    let l: Vec<VarId> = (0..m).map(|a| model.add_continuous(format!("l{a}"), 0.0, 1.0)).collect();
    for a in 0..m {
        model.add_row(format!("l_le_b{a}"), [(l[a], 1.0), (b[a], -1.0)], Cmp::Le, 0.0);
        model.add_row(format!("l_le_gamma{a}"), [(l[a], 1.0), (gamma[a], -1.0)], Cmp::Le, 0.0);
        model.add_row(format!("l_ge{a}"), [(l[a], 1.0), (gamma[a], -1.0), (b[a], -1.0)], Cmp::Ge, -1.0);
    }
    let mut obj = Vec::with_capacity(4 * m);
    for (a, arc) in aug.arcs().iter().enumerate() {
        let u = arc.capacity as f64;
        let y = design.is_selected(a) as u8 as f64;
        let p = design.is_protected(a) as u8 as f64;
        obj.push((lambda[a], u * y));
        obj.push((gamma[a], u * (1.0 + p)));
        obj.push((l[a], -u));
    }
    model.set_objective(Sense::Minimize, obj);
    AttackModel { model, b, lambda, gamma, mu, l }
}

/// Cut models over `D` with binary `μ`.
#[derive(Debug, Clone)]
pub struct CutModel {
    pub model: Model,
    pub lambda: Vec<VarId>,
    pub gamma: Vec<VarId>,
    pub mu: Vec<VarId>,
}

/// `D` with binary `μ`, at most `k` γ-marked arcs and none of them fictive.
fn deletion_cut_model(aug: &AugmentedInstance) -> CutModel {
    let mut model = Model::new(Sense::Minimize);
    let (lambda, gamma, mu) = add_cut_polyhedron(&mut model, aug, true);
    model.add_row("deletions", gamma.iter().map(|&g| (g, 1.0)), Cmp::Le, aug.k() as f64);
    for a in aug.fictive_arcs() {
        model.fix(gamma[a], 0.0);
    }
    CutModel { model, lambda, gamma, mu }
}

/// Finds a cut with the fewest arcs that is not valid for `design`: its
/// capacity left after deleting at most `k` marked arcs (protected marked
/// arcs still count) stays below `|T|`.
///
/// With `weighted_protection` the protected term is `u·p̂·γ`; without it the
/// literal `p̂·γ` is used.
pub fn build_strengthening(aug: &AugmentedInstance, design: &Design, weighted_protection: bool) -> CutModel {
    let mut cm = deletion_cut_model(aug);
    let mut residual = Vec::new();
    for (a, arc) in aug.arcs().iter().enumerate() {
        let u = arc.capacity as f64;
        if design.is_selected(a) {
            residual.push((cm.lambda[a], u));
        }
        if design.is_protected(a) {
            residual.push((cm.gamma[a], if weighted_protection { u } else { 1.0 }));
        }
    }
    cm.model.add_row("not_valid", residual, Cmp::Le, aug.demand() as f64 - 1.0);
    cm.model.set_objective(Sense::Minimize, cm.lambda.iter().map(|&v| (v, 1.0)));
    cm
}

/// Minimum residual capacity cut: `min Σ u·ŷ·λ + u·ŷ·p̂·γ`, i.e. the cut
/// capacity left once its `k` most capacitated non-protected arcs fail.
pub fn build_cutset_separation(aug: &AugmentedInstance, design: &Design) -> CutModel {
    let mut cm = deletion_cut_model(aug);
    let mut obj = Vec::new();
    for (a, arc) in aug.arcs().iter().enumerate() {
        let u = arc.capacity as f64;
        if design.is_selected(a) {
            obj.push((cm.lambda[a], u));
            if design.is_protected(a) {
                obj.push((cm.gamma[a], u));
            }
        }
    }
    cm.model.set_objective(Sense::Minimize, obj);
    cm
}
