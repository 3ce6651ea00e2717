//! Brute-force ground truth: survivability by scenario enumeration and the
//! exact optimum of tiny instances by design enumeration.

use itertools::Itertools;
use thiserror::Error;

use crate::formulations::{binomial, Design};
use crate::graph::{flow_value, ArcId, AugmentedInstance};

/// Most scenarios [`is_survivable`] will enumerate.
pub const SCENARIO_LIMIT: u128 = 10_000_000;
/// Most initial arcs [`exhaustive_optimum`] accepts.
pub const EXHAUSTIVE_ARC_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("{scenarios} failure scenarios exceed the enumeration limit {limit}")]
    TooManyScenarios { scenarios: u128, limit: u128 },
    #[error("{arcs} initial arcs exceed the exhaustive search limit {limit}")]
    TooManyArcs { arcs: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survivability {
    pub survivable: bool,
    /// Smallest flow reaching the sink over all scenarios.
    pub worst_flow: u64,
    /// A scenario reaching `worst_flow`; when not survivable it drops the
    /// flow below `|T|`.
    pub witness: Vec<ArcId>,
}

/// Deleting `min(k, |deletable|)` arcs at a time, the scenario with the
/// smallest remaining flow (first in lexicographic order on ties).
pub fn worst_scenario(aug: &AugmentedInstance, design: &Design, limit: u128) -> Result<(u64, Vec<ArcId>), VerifyError> {
    let candidates = design.deletable(aug);
    let size = aug.k().min(candidates.len());
    let scenarios = binomial(candidates.len(), size);
    if scenarios > limit {
        return Err(VerifyError::TooManyScenarios { scenarios, limit });
    }
    let mut best: Option<(u64, Vec<ArcId>)> = None;
    for failed in candidates.into_iter().combinations(size) {
        let value = flow_value(aug, &design.mask(aug, &failed));
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, failed));
            if value == 0 {
                break;
            }
        }
    }
    Ok(best.expect("at least the empty combination exists"))
}

/// Whether `|T|` units still reach the sink after any admissible failure.
pub fn is_survivable(aug: &AugmentedInstance, design: &Design) -> Result<Survivability, VerifyError> {
    let (worst_flow, witness) = worst_scenario(aug, design, SCENARIO_LIMIT)?;
    Ok(Survivability { survivable: worst_flow >= aug.demand(), worst_flow, witness })
}

/// Cheapest survivable design, by enumeration of every arc subset in order
/// of cost. `None` when even selecting everything cannot survive.
///
/// For each arc set, only protection sets of size `min(k', |y|)` are tried:
/// protecting one more arc never hurts.
pub fn exhaustive_optimum(aug: &AugmentedInstance) -> Result<Option<(u64, Design)>, VerifyError> {
    let m = aug.num_initial();
    if m > EXHAUSTIVE_ARC_LIMIT {
        return Err(VerifyError::TooManyArcs { arcs: m, limit: EXHAUSTIVE_ARC_LIMIT });
    }
    let design_of = |mask: u32, protected: &[ArcId]| {
        let selected = (0..m).filter(|&a| mask >> a & 1 == 1);
        Design::from_arcs(aug, selected, protected.iter().copied()).expect("protection within budget")
    };
    let survives = |mask: u32| -> Option<Design> {
        let chosen: Vec<ArcId> = (0..m).filter(|&a| mask >> a & 1 == 1).collect();
        let size = aug.k_protect().min(chosen.len());
        for protected in chosen.iter().copied().combinations(size) {
            let design = design_of(mask, &protected);
            if worst_scenario(aug, &design, u128::MAX).ok()?.0 >= aug.demand() {
                return Some(design);
            }
        }
        None
    };
    let full = (1u32 << m) - 1;
    if m < 32 && survives(full).is_none() {
        return Ok(None);
    }
    let mut masks: Vec<(u64, u32)> = (0..=full)
        .map(|mask| {
            let cost = (0..m).filter(|&a| mask >> a & 1 == 1).map(|a| aug.arc(a).cost).sum();
            (cost, mask)
        })
        .collect();
    masks.sort_unstable();
    for (cost, mask) in masks {
        // a design that cannot route |T| units without failures is hopeless
        if flow_value(aug, &design_of(mask, &[]).mask(aug, &[])) < aug.demand() {
            continue;
        }
        if let Some(design) = survives(mask) {
            return Ok(Some((cost, design)));
        }
    }
    unreachable!("the full arc set survives")
}
