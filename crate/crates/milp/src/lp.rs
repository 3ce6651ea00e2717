//! Continuous relaxations, solved with a sparse revised simplex.

use std::time::{Duration, Instant};

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOptions, SolveOutcome};

use crate::model::{Cmp, Model, Sense};
use crate::{SolveResult, SolverOptions, Status};

/// Outcome of one relaxation solve, in the internal minimization sense.
pub(crate) enum Relaxation {
    Solved(Box<microlp::Solution>),
    Infeasible,
    Unbounded,
    Interrupted,
}

/// Sign that turns the model objective into a minimization.
pub(crate) fn internal_sign(model: &Model) -> f64 {
    match model.sense() {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    }
}

pub(crate) struct Relaxed {
    pub vars: Vec<microlp::Variable>,
    pub outcome: Relaxation,
}

/// Solves the relaxation of `model` with every variable continuous.
pub(crate) fn relax(model: &Model, time_limit: Option<Duration>, feas_tol: f64) -> Relaxed {
    let sign = internal_sign(model);
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut obj = vec![0.0; model.num_vars()];
    for &(v, c) in model.objective() {
        obj[v.0] += sign * c;
    }
    let vars: Vec<_> = model
        .vars()
        .iter()
        .zip(&obj)
        .map(|(v, &c)| problem.add_var(c, (v.lower, v.upper)))
        .collect();
    for row in model.rows() {
        if row.coeffs.is_empty() {
            if row.violation(&[]) > feas_tol {
                return Relaxed { vars, outcome: Relaxation::Infeasible };
            }
            continue;
        }
        let op = match row.cmp {
            Cmp::Le => ComparisonOp::Le,
            Cmp::Eq => ComparisonOp::Eq,
            Cmp::Ge => ComparisonOp::Ge,
        };
        let terms: Vec<_> = row.coeffs.iter().map(|&(v, a)| (vars[v.0], a)).collect();
        problem.add_constraint(terms.as_slice(), op, row.rhs);
    }
    let mut options = SolveOptions::default();
    options.time_limit = time_limit;
    let outcome = match problem.solve_with(options) {
        Ok(SolveOutcome::Solution(s)) => Relaxation::Solved(Box::new(s)),
        Ok(SolveOutcome::Interrupted(_)) => Relaxation::Interrupted,
        Err(microlp::Error::Unbounded) => Relaxation::Unbounded,
        Err(microlp::Error::Infeasible) => Relaxation::Infeasible,
        Err(e) => {
            log::warn!("relaxation failed: {e}");
            Relaxation::Infeasible
        }
    };
    Relaxed { vars, outcome }
}

pub(crate) fn values_of(sol: &microlp::Solution, vars: &[microlp::Variable]) -> Vec<f64> {
    vars.iter().map(|&v| sol.var_value_raw(v)).collect()
}

/// Solves the continuous relaxation of `model`; integrality flags are ignored.
pub fn solve_lp(model: &Model, options: &SolverOptions) -> SolveResult {
    let start = Instant::now();
    if let Err(e) = model.validate() {
        log::warn!("invalid model: {e}");
        return SolveResult::empty(Status::Infeasible, start);
    }
    let relaxed = relax(model, options.time_limit, options.feasibility_tol);
    match relaxed.outcome {
        Relaxation::Solved(sol) => {
            let values = values_of(&sol, &relaxed.vars);
            let objective = model.objective_value(&values);
            SolveResult {
                status: Status::Optimal,
                objective: Some(objective),
                bound: Some(objective),
                gap: Some(0.0),
                values,
                seconds: start.elapsed().as_secs_f64(),
                nodes: 0,
            }
        }
        Relaxation::Infeasible => SolveResult::empty(Status::Infeasible, start),
        Relaxation::Unbounded => SolveResult::empty(Status::Unbounded, start),
        Relaxation::Interrupted => SolveResult::empty(Status::TimeLimit, start),
    }
}
