//! Separation oracles for the three formulations.
//!
//! Each oracle takes the master's current design and reports the value of
//! the worst attack together with a violated object when that value falls
//! below `|T|`. All three values equal the smallest max-flow over the
//! admissible failure scenarios.

use std::time::Duration;

use milp::{solve_mip, SolveResult, SolverOptions, Status};
use thiserror::Error;

use crate::formulations::{
    binomial, build_2lp, build_cutset_separation, build_strengthening, eval_ms, CutSet, Design, ExtremePoint,
    FailureScenario,
};
use crate::graph::{flow_value, min_cut, AugmentedInstance};
use crate::verify::worst_scenario;

/// Largest scenario count [`ScenarioEngine::Auto`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000;

const ROUND_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeparationError {
    #[error("separation hit its time limit")]
    Timeout,
    #[error("attacker model returned a non-vertex solution: {0}")]
    NonVertexSolution(String),
    #[error("separation model ended with status {0:?}")]
    Solver(Status),
}

/// How worst-case failure scenarios are found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScenarioEngine {
    /// Enumerate every scenario and run a max-flow on each.
    BruteForce,
    /// Solve the attacker's MILP.
    Mip,
    /// Brute force up to [`BRUTE_FORCE_LIMIT`] scenarios, MILP beyond.
    #[default]
    Auto,
}

impl ScenarioEngine {
    fn brute_force(self, aug: &AugmentedInstance, design: &Design) -> bool {
        match self {
            Self::BruteForce => true,
            Self::Mip => false,
            Self::Auto => {
                let n = design.deletable(aug).len();
                binomial(n, aug.k().min(n)) <= BRUTE_FORCE_LIMIT
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparationOptions {
    pub engine: ScenarioEngine,
    pub time_limit: Option<Duration>,
    /// Weight protected arcs by capacity in the strengthening row.
    pub weighted_protection: bool,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        Self { engine: ScenarioEngine::Auto, time_limit: None, weighted_protection: true }
    }
}

/// Oracle outcome: the worst post-attack flow and, when it is below `|T|`,
/// the object that cuts the design off.
#[derive(Debug, Clone, PartialEq)]
pub struct Separated<T> {
    pub value: u64,
    pub violated: Option<T>,
}

fn run(model: &milp::Model, opts: &SeparationOptions) -> Result<SolveResult, SeparationError> {
    let mut solver = SolverOptions::default();
    solver.time_limit = opts.time_limit;
    let r = solve_mip(model, &solver);
    match r.status {
        Status::Optimal => Ok(r),
        Status::Feasible | Status::TimeLimit => Err(SeparationError::Timeout),
        s => Err(SeparationError::Solver(s)),
    }
}

fn round01(x: f64, what: &str) -> Result<f64, SeparationError> {
    if x.abs() <= ROUND_TOL {
        Ok(0.0)
    } else if (x - 1.0).abs() <= ROUND_TOL {
        Ok(1.0)
    } else {
        Err(SeparationError::NonVertexSolution(format!("{what} = {x}")))
    }
}

/// Cut of minimum residual capacity: selected capacity minus the `k` largest
/// deletable capacities. Violated when below `|T|`.
pub fn separate_cutset(
    aug: &AugmentedInstance,
    design: &Design,
    opts: &SeparationOptions,
) -> Result<Separated<CutSet>, SeparationError> {
    let cut = if opts.engine.brute_force(aug, design) {
        // the min cut under the worst scenario has the smallest residual
        let (_, failed) = worst_scenario(aug, design, u128::MAX).expect("no limit");
        let mc = min_cut(aug, &design.mask(aug, &failed));
        CutSet::new(aug, mc.sink_side)
    } else {
        let cm = build_cutset_separation(aug, design);
        let r = run(&cm.model, opts)?;
        let mut sink_side = Vec::with_capacity(cm.mu.len());
        for (v, &mu) in cm.mu.iter().enumerate() {
            sink_side.push(round01(r.value(mu), &format!("mu{v}"))? == 0.0);
        }
        CutSet::new(aug, sink_side)
    };
    let Ok(cut) = cut else {
        // only {s} is left, i.e. the fictive arcs alone bind: nothing violated
        return Ok(Separated { value: aug.demand(), violated: None });
    };
    let value = cut.selected_capacity(aug, design) - eval_ms(aug, &cut, design);
    let violated = (value < aug.demand()).then_some(cut);
    Ok(Separated { value, violated })
}

/// The `k` most vital deletable arcs: the scenario leaving the smallest
/// max-flow. Violated when that flow is below `|T|`.
pub fn separate_scenario(
    aug: &AugmentedInstance,
    design: &Design,
    opts: &SeparationOptions,
) -> Result<Separated<FailureScenario>, SeparationError> {
    let (value, failed) = if opts.engine.brute_force(aug, design) {
        worst_scenario(aug, design, u128::MAX).expect("no limit")
    } else {
        let am = build_2lp(aug, design);
        let r = run(&am.model, opts)?;
        let deletable = design.deletable(aug);
        let failed: Vec<_> = am.b.iter().enumerate().filter(|(a, b)| r.value(**b) > 0.5 && deletable.contains(a)).map(|(a, _)| a).collect();
        (flow_value(aug, &design.mask(aug, &failed)), failed)
    };
    let violated = if value < aug.demand() {
        Some(FailureScenario::padded(aug, &failed).expect("k + k' fits in the initial arcs"))
    } else {
        None
    };
    Ok(Separated { value, violated })
}

/// Solves the attacker's 2LP at `design` and returns its optimal vertex.
fn attack(aug: &AugmentedInstance, design: &Design, opts: &SeparationOptions) -> Result<(u64, ExtremePoint), SeparationError> {
    let am = build_2lp(aug, design);
    let r = run(&am.model, opts)?;
    let mut point = am.point(&r.values);
    for (name, xs) in [
        ("b", &mut point.b),
        ("lambda", &mut point.lambda),
        ("gamma", &mut point.gamma),
        ("mu", &mut point.mu),
        ("l", &mut point.l),
    ] {
        for (i, x) in xs.iter_mut().enumerate() {
            *x = round01(*x, &format!("{name}{i}"))?;
        }
    }
    let value = point.g(aug, &design.y_values(), &design.p_values());
    let objective = r.objective.expect("optimal");
    if (value - objective).abs() > 1e-6 {
        return Err(SeparationError::NonVertexSolution(format!("rounded value {value} differs from {objective}")));
    }
    Ok((value.round() as u64, point))
}

/// The attacker's optimal vertex; violated when its `g` is below `|T|`.
pub fn separate_bilevel(
    aug: &AugmentedInstance,
    design: &Design,
    opts: &SeparationOptions,
) -> Result<Separated<ExtremePoint>, SeparationError> {
    let (value, point) = attack(aug, design, opts)?;
    let violated = (value < aug.demand()).then_some(point);
    Ok(Separated { value, violated })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strengthening {
    /// A point computed at a larger design replaced the input.
    Improved,
    /// Every non-valid cut uses all selected arcs, or the new point did not
    /// cut the design off.
    Unchanged,
    TimedOut,
}

/// Tries to replace `point` by one that also cuts off larger designs.
///
/// Finds a non-valid cut with the fewest arcs, selects every arc outside it
/// and re-solves the 2LP there. The returned point always cuts off `design`.
pub fn strengthen(
    aug: &AugmentedInstance,
    design: &Design,
    point: ExtremePoint,
    opts: &SeparationOptions,
) -> Result<(ExtremePoint, Strengthening), SeparationError> {
    let cm = build_strengthening(aug, design, opts.weighted_protection);
    let r = match run(&cm.model, opts) {
        Ok(r) => r,
        Err(SeparationError::Solver(Status::Infeasible)) => return Ok((point, Strengthening::Unchanged)),
        Err(SeparationError::Timeout) => return Ok((point, Strengthening::TimedOut)),
        Err(e) => return Err(e),
    };
    let mut selected = design.selected().to_vec();
    for a in aug.initial_arcs() {
        if r.value(cm.lambda[a]) < 0.5 && r.value(cm.gamma[a]) < 0.5 {
            selected[a] = true;
        }
    }
    let wider = Design::new(aug, selected, design.protected().to_vec()).expect("same protection");
    if wider == *design {
        return Ok((point, Strengthening::Unchanged));
    }
    let (_, candidate) = match attack(aug, &wider, opts) {
        Ok(x) => x,
        Err(SeparationError::Timeout) => return Ok((point, Strengthening::TimedOut)),
        Err(e) => return Err(e),
    };
    if candidate.g(aug, &design.y_values(), &design.p_values()) < aug.demand() as f64 - 0.5 {
        Ok((candidate, Strengthening::Improved))
    } else {
        Ok((point, Strengthening::Unchanged))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::augment;
    use crate::graph::tests::diamond;

    fn opts(engine: ScenarioEngine) -> SeparationOptions {
        SeparationOptions { engine, ..Default::default() }
    }

    #[test]
    fn diamond_single_route() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let d = Design::from_arcs(&aug, [1], []).unwrap();
        for engine in [ScenarioEngine::BruteForce, ScenarioEngine::Mip] {
            let c = separate_cutset(&aug, &d, &opts(engine)).unwrap();
            assert_eq!(c.value, 0);
            let cut = c.violated.unwrap();
            assert!(cut.arcs().contains(&1));
            let s = separate_scenario(&aug, &d, &opts(engine)).unwrap();
            assert_eq!(s.value, 0);
            assert_eq!(s.violated.unwrap().arcs(), &[1]);
        }
        let b = separate_bilevel(&aug, &d, &opts(ScenarioEngine::Mip)).unwrap();
        assert_eq!(b.value, 0);
        let p = b.violated.unwrap();
        assert_eq!((p.b[1], p.gamma[1]), (1.0, 1.0));
    }

    #[test]
    fn survivable_design_passes_every_oracle() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let d = Design::everything(&aug);
        for engine in [ScenarioEngine::BruteForce, ScenarioEngine::Mip] {
            assert_eq!(separate_cutset(&aug, &d, &opts(engine)).unwrap(), Separated { value: 1, violated: None });
            assert_eq!(separate_scenario(&aug, &d, &opts(engine)).unwrap(), Separated { value: 1, violated: None });
        }
        assert_eq!(separate_bilevel(&aug, &d, &opts(ScenarioEngine::Mip)).unwrap().violated, None);
    }

    #[test]
    fn protected_design_cannot_be_attacked() {
        let aug = augment(&diamond(0, 3)).unwrap();
        let d = Design::from_arcs(&aug, 0..3, 0..3).unwrap();
        assert_eq!(separate_bilevel(&aug, &d, &SeparationOptions::default()).unwrap().violated, None);
        assert_eq!(separate_scenario(&aug, &d, &SeparationOptions::default()).unwrap().violated, None);
    }

    #[test]
    fn strengthened_point_cuts_off_sub_designs() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let d = Design::from_arcs(&aug, [1], []).unwrap();
        let point = separate_bilevel(&aug, &d, &SeparationOptions::default()).unwrap().violated.unwrap();
        let (strong, _) = strengthen(&aug, &d, point, &SeparationOptions::default()).unwrap();
        for sub in [Design::from_arcs(&aug, [1], []).unwrap(), Design::from_arcs(&aug, [], []).unwrap()] {
            assert!(strong.g(&aug, &sub.y_values(), &sub.p_values()) < 1.0);
        }
    }

    #[test]
    fn strengthening_is_a_no_op_when_infeasible() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let all = Design::everything(&aug);
        let point = separate_bilevel(&aug, &Design::from_arcs(&aug, [1], []).unwrap(), &SeparationOptions::default())
            .unwrap()
            .violated
            .unwrap();
        let (same, how) = strengthen(&aug, &all, point.clone(), &SeparationOptions::default()).unwrap();
        assert_eq!(how, Strengthening::Unchanged);
        assert_eq!(same, point);
    }
}
