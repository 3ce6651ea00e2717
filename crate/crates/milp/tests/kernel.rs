use std::time::Duration;

use milp::{solve_lp, solve_mip, Cmp, Model, Sense, SolverOptions, Status, VarId};
use proptest::prelude::*;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn lp_single_lower_bound() {
    let mut m = Model::new(Sense::Minimize);
    let x = m.add_continuous("x", 0.0, 10.0);
    m.add_row("lb", [(x, 1.0)], Cmp::Ge, 3.0);
    m.set_objective(Sense::Minimize, [(x, 1.0)]);
    let r = solve_lp(&m, &opts());
    assert_eq!(r.status, Status::Optimal);
    assert!((r.objective.unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn lp_empty_objective_returns_feasible_point() {
    let mut m = Model::default();
    let x = m.add_continuous("x", -1.0, 2.0);
    let y = m.add_continuous("y", 0.0, 5.0);
    m.add_row("c", [(x, 1.0), (y, 1.0)], Cmp::Le, 4.0);
    let r = solve_lp(&m, &opts());
    assert_eq!(r.status, Status::Optimal);
    assert_eq!(r.objective, Some(0.0));
    assert!(m.max_violation(&r.values) < 1e-7);
}

#[test]
fn lp_infeasible_and_unbounded() {
    let mut m = Model::default();
    let x = m.add_continuous("x", 0.0, 1.0);
    m.add_row("c", [(x, 1.0)], Cmp::Ge, 2.0);
    assert_eq!(solve_lp(&m, &opts()).status, Status::Infeasible);

    let mut m = Model::default();
    let x = m.add_continuous("x", 0.0, f64::INFINITY);
    m.set_objective(Sense::Maximize, [(x, 1.0)]);
    assert_eq!(solve_lp(&m, &opts()).status, Status::Unbounded);
}

#[test]
fn mip_small_knapsack() {
    let mut m = Model::default();
    let x = m.add_binary("x");
    let y = m.add_binary("y");
    m.add_row("cap", [(x, 1.0), (y, 1.0)], Cmp::Le, 1.0);
    m.set_objective(Sense::Maximize, [(x, 3.0), (y, 2.0)]);
    let r = solve_mip(&m, &opts());
    assert_eq!(r.status, Status::Optimal);
    assert_eq!(r.objective, Some(3.0));
    assert_eq!(r.value(x), 1.0);
    assert_eq!(r.value(y), 0.0);
    assert_eq!(r.gap, Some(0.0));
}

#[test]
fn mip_without_integers_matches_lp() {
    let mut m = Model::default();
    let x = m.add_continuous("x", 0.0, 4.0);
    let y = m.add_continuous("y", 0.0, 4.0);
    m.add_row("a", [(x, 2.0), (y, 1.0)], Cmp::Ge, 3.0);
    m.add_row("b", [(x, 1.0), (y, 3.0)], Cmp::Ge, 4.0);
    m.set_objective(Sense::Minimize, [(x, 1.0), (y, 1.0)]);
    let lp = solve_lp(&m, &opts());
    let mip = solve_mip(&m, &opts());
    assert_eq!(lp.status, mip.status);
    assert_eq!(lp.objective, mip.objective);
    assert_eq!(lp.values, mip.values);
}

#[test]
fn mip_infeasible_integer_hull() {
    // 2x = 1 has a fractional solution only.
    let mut m = Model::default();
    let x = m.add_var("x", 0.0, 3.0, true);
    m.add_row("half", [(x, 2.0)], Cmp::Eq, 1.0);
    assert_eq!(solve_mip(&m, &opts()).status, Status::Infeasible);
}

#[test]
fn mip_general_integer_branching() {
    // max x + y, 2x + 2y <= 7, x,y in [0,5] integer -> 3
    let mut m = Model::default();
    let x = m.add_var("x", 0.0, 5.0, true);
    let y = m.add_var("y", 0.0, 5.0, true);
    m.add_row("c", [(x, 2.0), (y, 2.0)], Cmp::Le, 7.0);
    m.set_objective(Sense::Maximize, [(x, 1.0), (y, 1.0)]);
    let r = solve_mip(&m, &opts());
    assert_eq!(r.status, Status::Optimal);
    assert_eq!(r.objective, Some(3.0));
}

#[test]
fn infeasible_initial_point_is_ignored_and_feasible_one_kept() {
    let mut m = Model::default();
    let x = m.add_binary("x");
    let y = m.add_binary("y");
    m.add_row("cover", [(x, 1.0), (y, 1.0)], Cmp::Ge, 1.0);
    m.set_objective(Sense::Minimize, [(x, 2.0), (y, 3.0)]);
    let bad = SolverOptions { initial: Some(vec![0.0, 0.0]), ..opts() };
    assert_eq!(solve_mip(&m, &bad).objective, Some(2.0));
    let good = SolverOptions { initial: Some(vec![1.0, 0.0]), ..opts() };
    let r = solve_mip(&m, &good);
    assert_eq!(r.objective, Some(2.0));
    assert_eq!(r.value(x), 1.0);
}

/// Random set-cover-like model over `n` binaries.
fn random_model(n: usize, rows: &[(Vec<u8>, u8)], costs: &[u8], maximize: bool) -> Model {
    let mut m = Model::default();
    let vars: Vec<VarId> = (0..n).map(|i| m.add_binary(format!("x{i}"))).collect();
    for (r, (coefs, rhs)) in rows.iter().enumerate() {
        let terms = vars.iter().zip(coefs).map(|(&v, &c)| (v, c as f64 - 2.0));
        m.add_row(format!("r{r}"), terms, Cmp::Le, *rhs as f64);
    }
    let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
    m.set_objective(sense, vars.iter().zip(costs).map(|(&v, &c)| (v, c as f64 - 3.0)));
    m
}

fn enumerate(m: &Model) -> Option<f64> {
    let n = m.num_vars();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        let x: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
        if m.max_violation(&x) > 1e-9 {
            continue;
        }
        let v = m.objective_value(&x);
        best = Some(match (best, m.sense()) {
            (None, _) => v,
            (Some(b), Sense::Minimize) => b.min(v),
            (Some(b), Sense::Maximize) => b.max(v),
        });
    }
    best
}

fn model_strategy() -> impl Strategy<Value = Model> {
    (2usize..=14).prop_flat_map(|n| {
        (
            prop::collection::vec((prop::collection::vec(0u8..5, n), 0u8..4), 1..5),
            prop::collection::vec(0u8..7, n),
            any::<bool>(),
        )
            .prop_map(move |(rows, costs, max)| random_model(n, &rows, &costs, max))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn optimum_matches_enumeration(m in model_strategy()) {
        let r = solve_mip(&m, &opts());
        match enumerate(&m) {
            None => prop_assert_eq!(r.status, Status::Infeasible),
            Some(best) => {
                prop_assert_eq!(r.status, Status::Optimal);
                prop_assert!((r.objective.unwrap() - best).abs() < 1e-6);
                prop_assert!(m.max_violation(&r.values) < 1e-6);
            }
        }
    }

    #[test]
    fn node_limited_bound_is_valid(m in model_strategy(), limit in 1u64..6) {
        let o = SolverOptions { node_limit: Some(limit), ..opts() };
        let r = solve_mip(&m, &o);
        if let (Some(best), Some(bound)) = (enumerate(&m), r.bound) {
            match m.sense() {
                Sense::Minimize => prop_assert!(bound <= best + 1e-6),
                Sense::Maximize => prop_assert!(bound >= best - 1e-6),
            }
            if let Some(obj) = r.objective {
                match m.sense() {
                    Sense::Minimize => prop_assert!(bound <= obj + 1e-9),
                    Sense::Maximize => prop_assert!(bound >= obj - 1e-9),
                }
            }
        }
    }

    #[test]
    fn repeated_solves_are_identical(m in model_strategy()) {
        let a = solve_mip(&m, &opts());
        let b = solve_mip(&m, &opts());
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.objective, b.objective);
        prop_assert_eq!(a.values, b.values);
        prop_assert_eq!(a.nodes, b.nodes);
    }
}

#[test]
fn time_limit_reports_gap() {
    // 40-item equality knapsack: hard for plain branch-and-bound.
    let mut m = Model::default();
    let weights: Vec<f64> = (0..40).map(|i| (2 * (i * 7919 % 97) + 2) as f64).collect();
    let vars: Vec<VarId> = (0..40).map(|i| m.add_binary(format!("x{i}"))).collect();
    m.add_row("odd", vars.iter().zip(&weights).map(|(&v, &w)| (v, w)), Cmp::Eq, 1001.0);
    m.set_objective(Sense::Minimize, vars.iter().map(|&v| (v, 1.0)));
    let o = opts().with_time_limit(Duration::from_millis(200));
    let r = solve_mip(&m, &o);
    // even weights can never sum to an odd value
    assert!(matches!(r.status, Status::TimeLimit | Status::Infeasible));
    assert!(r.seconds < 5.0);
}
