use std::collections::HashSet;

use milp::{Cmp, Model, Sense, VarId};

use super::{DesignVars, FailureScenario, FormulationError};
use crate::graph::AugmentedInstance;

#[derive(Debug, Clone)]
pub struct FlowMaster {
    pub model: Model,
    pub vars: DesignVars,
    /// `x[s][a]`: flow on arc `a` under scenario `s`.
    pub flow: Vec<Vec<VarId>>,
}

/// Flow master: one `|T|`-unit `r`–`s` flow per scenario, capacity `u·y`
/// everywhere and `u·p` on the scenario's failed arcs.
pub fn build_flow_master(aug: &AugmentedInstance, scenarios: &[FailureScenario]) -> Result<FlowMaster, FormulationError> {
    let mut seen = HashSet::new();
    for (i, s) in scenarios.iter().enumerate() {
        if !seen.insert(s) {
            return Err(FormulationError::DuplicateScenario(i));
        }
    }
    let mut model = Model::new(Sense::Minimize);
    let vars = DesignVars::add(&mut model, aug, true);
    let (r, sink) = (aug.root(), aug.sink());
    let mut flow = Vec::with_capacity(scenarios.len());
    for (i, scenario) in scenarios.iter().enumerate() {
        let x: Vec<VarId> = (0..aug.num_arcs())
            .map(|a| model.add_continuous(format!("x{i}_{a}"), 0.0, f64::INFINITY))
            .collect();
        for v in 0..aug.num_vertices() {
            if v == r || v == sink {
                continue;
            }
            let inflow = aug.in_arcs(v).iter().map(|&a| (x[a], 1.0));
            let outflow = aug.out_arcs(v).iter().map(|&a| (x[a], -1.0));
            model.add_row(format!("balance{i}_{v}"), inflow.chain(outflow), Cmp::Eq, 0.0);
        }
        model.add_row(
            format!("demand{i}"),
            aug.in_arcs(sink).iter().map(|&a| (x[a], 1.0)),
            Cmp::Eq,
            aug.demand() as f64,
        );
        for (a, arc) in aug.arcs().iter().enumerate() {
            let u = arc.capacity as f64;
            model.add_row(format!("cap{i}_{a}"), [(x[a], 1.0), (vars.y[a], -u)], Cmp::Le, 0.0);
        }
        for &a in scenario.arcs() {
            let u = aug.arc(a).capacity as f64;
            model.add_row(format!("failed{i}_{a}"), [(x[a], 1.0), (vars.p[a], -u)], Cmp::Le, 0.0);
        }
        flow.push(x);
    }
    Ok(FlowMaster { model, vars, flow })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::augment;
    use crate::graph::tests::diamond;
    use milp::{solve_mip, SolverOptions};

    #[test]
    fn diamond_with_both_single_failures() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let scen = vec![
            FailureScenario::new(&aug, vec![1]).unwrap(),
            FailureScenario::new(&aug, vec![2]).unwrap(),
        ];
        let m = build_flow_master(&aug, &scen).unwrap();
        let r = solve_mip(&m.model, &SolverOptions::default());
        assert_eq!(r.objective, Some(4.0));
    }

    #[test]
    fn diamond_no_failure_scenario() {
        // k = 0: the only scenario is the empty one
        let aug = augment(&diamond(0, 0)).unwrap();
        let m = build_flow_master(&aug, &[FailureScenario::new(&aug, vec![]).unwrap()]).unwrap();
        let r = solve_mip(&m.model, &SolverOptions::default());
        assert_eq!(r.objective, Some(2.0));
    }

    #[test]
    fn duplicate_scenarios_rejected() {
        let aug = augment(&diamond(1, 0)).unwrap();
        let s = FailureScenario::new(&aug, vec![0]).unwrap();
        assert_eq!(build_flow_master(&aug, &[s.clone(), s]).unwrap_err(), FormulationError::DuplicateScenario(1));
    }

    #[test]
    fn fictive_arcs_cannot_fail() {
        let aug = augment(&diamond(1, 0)).unwrap();
        assert!(FailureScenario::new(&aug, vec![3]).is_err());
    }
}
