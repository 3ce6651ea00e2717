use itertools::Itertools;
use milp::{Cmp, Model, Sense, VarId};

use super::{binomial, CutSet, DesignVars, FormulationError};
use crate::graph::{ArcId, AugmentedInstance};

/// Which deletion subsets `C` of a cut get an `M_S ≥ Σ_C u(y − p)` row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetRows {
    /// Every subset of `min(k, |S ∩ A_I|)` initial cut arcs.
    All,
    /// Only the listed subsets.
    Listed(Vec<Vec<ArcId>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutRows {
    pub cut: CutSet,
    pub subsets: SubsetRows,
}

impl CutRows {
    pub fn all(cut: CutSet) -> Self {
        Self { cut, subsets: SubsetRows::All }
    }
}

#[derive(Debug, Clone)]
pub struct CutsetOptions {
    /// Refuse [`SubsetRows::All`] for cuts needing more rows than this.
    pub row_cap: u64,
}

impl Default for CutsetOptions {
    fn default() -> Self {
        Self { row_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct CutsetMaster {
    pub model: Model,
    pub vars: DesignVars,
    /// One `M_S` per cut, in input order.
    pub max_loss: Vec<VarId>,
}

/// Cut-set master over the given cuts.
///
/// Per cut: `Σ_{δ⁻(V_S)} u·y − M_S ≥ |T|` and one `M_S ≥ Σ_C u·(y − p)` row per
/// deletion subset `C` of initial cut arcs. `p ≤ y` is imposed so that
/// protecting an unselected arc can never shrink `M_S`.
pub fn build_cutset_master(
    aug: &AugmentedInstance,
    cuts: &[CutRows],
    opts: &CutsetOptions,
) -> Result<CutsetMaster, FormulationError> {
    let mut model = Model::new(Sense::Minimize);
    let vars = DesignVars::add(&mut model, aug, true);
    let demand = aug.demand() as f64;
    let mut max_loss = Vec::with_capacity(cuts.len());
    for (i, entry) in cuts.iter().enumerate() {
        let cut = &entry.cut;
        let initial = cut.initial_arcs(aug);
        let size = aug.k().min(initial.len());
        if entry.subsets == SubsetRows::All {
            let rows = binomial(initial.len(), size);
            if rows > opts.row_cap as u128 {
                return Err(FormulationError::RowCap { cut: i, rows, cap: opts.row_cap });
            }
        }
        let ms = model.add_continuous(format!("M{i}"), 0.0, f64::INFINITY);
        max_loss.push(ms);
        let cap_terms = cut.arcs().iter().map(|&a| (vars.y[a], aug.arc(a).capacity as f64));
        model.add_row(format!("cut{i}"), cap_terms.chain([(ms, -1.0)]), Cmp::Ge, demand);

        let mut add_subset = |j: usize, subset: &[ArcId]| {
            if subset.is_empty() {
                return;
            }
            let terms = subset.iter().flat_map(|&a| {
                let u = aug.arc(a).capacity as f64;
                [(vars.y[a], -u), (vars.p[a], u)]
            });
            model.add_row(format!("loss{i}_{j}"), [(ms, 1.0)].into_iter().chain(terms), Cmp::Ge, 0.0);
        };
        match &entry.subsets {
            SubsetRows::All => {
                for (j, subset) in initial.iter().copied().combinations(size).enumerate() {
                    add_subset(j, &subset);
                }
            }
            SubsetRows::Listed(list) => {
                for (j, subset) in list.iter().enumerate() {
                    add_subset(j, subset);
                }
            }
        }
    }
    Ok(CutsetMaster { model, vars, max_loss })
}
