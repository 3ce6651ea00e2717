//! A small, deterministic mixed-integer linear programming kernel.
//!
//! Models are built with [`Model`]; [`solve_lp`] solves the continuous
//! relaxation and [`solve_mip`] runs a best-bound branch-and-bound on top of
//! warm-started relaxations. Branching picks the most fractional variable
//! (lowest index on ties) and open nodes are explored lowest bound first,
//! deepest first on ties, so two runs on the same model and limits explore
//! the same tree.

mod bnb;
mod lp;
mod model;

use std::time::{Duration, Instant};

pub use bnb::solve_mip;
pub use lp::solve_lp;
pub use model::{Cmp, Constraint, Model, ModelError, RowId, Sense, VarId, Variable};

/// Denominator floor in [`relative_gap`].
pub const GAP_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    /// Limit reached with an incumbent; `gap` tells how far from proven.
    Feasible,
    Infeasible,
    Unbounded,
    /// Limit reached before any integer point was found.
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub integrality_tol: f64,
    pub feasibility_tol: f64,
    /// Candidate incumbent; used only if it satisfies the model.
    pub initial: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            integrality_tol: 1e-6,
            feasibility_tol: 1e-7,
            initial: None,
        }
    }
}

impl SolverOptions {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: Status,
    pub objective: Option<f64>,
    /// Best proven bound on the optimum (lower for minimization).
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub values: Vec<f64>,
    pub seconds: f64,
    pub nodes: u64,
}

impl SolveResult {
    fn empty(status: Status, start: Instant) -> Self {
        Self {
            status,
            objective: None,
            bound: None,
            gap: None,
            values: Vec::new(),
            seconds: start.elapsed().as_secs_f64(),
            nodes: 0,
        }
    }

    pub fn has_solution(&self) -> bool {
        matches!(self.status, Status::Optimal | Status::Feasible)
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }
}

/// `(objective - bound) / max(|objective|, 1e-9)` in minimization terms.
pub fn relative_gap(objective: f64, bound: f64) -> f64 {
    ((objective - bound) / objective.abs().max(GAP_EPSILON)).max(0.0)
}
