//! Best-bound branch-and-bound over warm-started relaxations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use microlp::{ComparisonOp, SolveOutcome};

use crate::lp::{internal_sign, relax, values_of, Relaxation};
use crate::model::Model;
use crate::{relative_gap, SolveResult, SolverOptions, Status};

#[derive(Debug, Clone, Copy)]
enum Branch {
    Fix(usize, f64),
    AtMost(usize, f64),
    AtLeast(usize, f64),
}

struct Node {
    id: u64,
    depth: u32,
    /// Relaxation value of the parent, a valid bound for this subtree.
    bound: f64,
    parent: Rc<microlp::Solution>,
    branch: Branch,
}

// Heap order: lowest bound first, then deepest, then oldest.
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

/// True when every feasible point has an integral objective value.
fn objective_is_integral(model: &Model) -> bool {
    model
        .objective()
        .iter()
        .all(|&(v, c)| model.var(v).integer && c == c.round())
}

struct Search<'a> {
    model: &'a Model,
    opts: &'a SolverOptions,
    sign: f64,
    integral_obj: bool,
    /// Internal (minimization) value and assignment of the incumbent.
    incumbent: Option<(f64, Vec<f64>)>,
    next_id: u64,
}

impl Search<'_> {
    /// Bound below which a node may still hold a strictly better point.
    fn prunes(&self, bound: f64) -> bool {
        match &self.incumbent {
            None => false,
            Some((inc, _)) if self.integral_obj => bound > inc - 1.0 + self.opts.integrality_tol,
            Some((inc, _)) => bound >= inc - 1e-9 * inc.abs().max(1.0),
        }
    }

    fn tighten(&self, bound: f64) -> f64 {
        if self.integral_obj {
            (bound - self.opts.integrality_tol).ceil()
        } else {
            bound
        }
    }

    /// Most fractional integer variable, ties broken by lowest index.
    fn pick_branch(&self, values: &[f64]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.model.vars().iter().enumerate() {
            if !v.integer {
                continue;
            }
            let frac = values[i] - values[i].floor();
            let score = frac.min(1.0 - frac);
            if score <= self.opts.integrality_tol {
                continue;
            }
            if best.is_none_or(|(_, s)| score > s + 1e-12) {
                best = Some((i, score));
            }
        }
        best.map(|(i, _)| i)
    }

    fn offer(&mut self, mut values: Vec<f64>) {
        for (x, v) in values.iter_mut().zip(self.model.vars()) {
            if v.integer {
                *x = x.round();
            }
        }
        let obj = self.sign * self.model.objective_value(&values);
        if self.incumbent.as_ref().is_none_or(|(inc, _)| obj < *inc - 1e-9) {
            log::trace!("new incumbent {obj}");
            self.incumbent = Some((obj, values));
        }
    }

    fn children(&mut self, parent: Rc<microlp::Solution>, bound: f64, depth: u32, var: usize, x: f64) -> [Node; 2] {
        let v = self.model.var(crate::VarId(var));
        let (down, up) = (x.floor(), x.ceil());
        let binary = v.lower >= 0.0 && v.upper <= 1.0;
        let (db, ub) = if binary {
            (Branch::Fix(var, down), Branch::Fix(var, up))
        } else {
            (Branch::AtMost(var, down), Branch::AtLeast(var, up))
        };
        let mut mk = |branch| {
            self.next_id += 1;
            Node { id: self.next_id, depth: depth + 1, bound, parent: Rc::clone(&parent), branch }
        };
        [mk(db), mk(ub)]
    }
}

enum NodeLp {
    Solved(microlp::Solution),
    Infeasible,
    Interrupted,
}

fn resolve(node: &Node, vars: &[microlp::Variable]) -> NodeLp {
    let lp = (*node.parent).clone();
    let outcome = match node.branch {
        Branch::Fix(v, val) => lp.fix_var(vars[v], val),
        Branch::AtMost(v, val) => lp.add_constraint([(vars[v], 1.0)].as_slice(), ComparisonOp::Le, val),
        Branch::AtLeast(v, val) => lp.add_constraint([(vars[v], 1.0)].as_slice(), ComparisonOp::Ge, val),
    };
    match outcome {
        Ok(SolveOutcome::Solution(s)) => NodeLp::Solved(s),
        Ok(SolveOutcome::Interrupted(_)) => NodeLp::Interrupted,
        Err(microlp::Error::Infeasible) => NodeLp::Infeasible,
        Err(e) => {
            log::warn!("node relaxation failed, pruning: {e}");
            NodeLp::Infeasible
        }
    }
}

/// Solves `model` to optimality or until the time/node limit, whichever comes first.
pub fn solve_mip(model: &Model, opts: &SolverOptions) -> SolveResult {
    let start = Instant::now();
    if let Err(e) = model.validate() {
        log::warn!("invalid model: {e}");
        return SolveResult::empty(Status::Infeasible, start);
    }
    let sign = internal_sign(model);
    let mut search = Search {
        model,
        opts,
        sign,
        integral_obj: model.num_integer() > 0 && objective_is_integral(model),
        incumbent: None,
        next_id: 0,
    };
    if let Some(init) = &opts.initial {
        if init.len() == model.num_vars() && model.max_violation(init) <= opts.feasibility_tol * 10.0 {
            search.offer(init.clone());
        } else {
            log::debug!("initial point rejected");
        }
    }

    let relaxed = relax(model, opts.time_limit, opts.feasibility_tol);
    let vars = relaxed.vars;
    let root = match relaxed.outcome {
        Relaxation::Solved(s) => *s,
        Relaxation::Infeasible => return finish(&search, start, 0, None, false),
        Relaxation::Unbounded => return SolveResult::empty(Status::Unbounded, start),
        Relaxation::Interrupted => return finish(&search, start, 0, Some(f64::NEG_INFINITY), true),
    };

    let deadline = opts.time_limit.map(|d| start + d);
    let mut heap = BinaryHeap::new();
    let mut nodes: u64 = 1;
    let mut timed_out = false;

    let mut frontier = Some((root, 0.0_f64, 0_u32));
    loop {
        if let Some((lp, _, depth)) = frontier.take() {
            let bound = lp.objective();
            if !search.prunes(bound) {
                let values = values_of(&lp, &vars);
                match search.pick_branch(&values) {
                    None => search.offer(values),
                    Some(var) => {
                        let parent = Rc::new(lp);
                        for child in search.children(parent, bound, depth, var, values[var]) {
                            heap.push(child);
                        }
                    }
                }
            }
        }

        let Some(node) = heap.pop() else { break };
        if search.prunes(node.bound) {
            continue;
        }
        if deadline.is_some_and(|d| Instant::now() >= d)
            || opts.node_limit.is_some_and(|n| nodes >= n)
        {
            heap.push(node);
            timed_out = true;
            break;
        }
        nodes += 1;
        if nodes % 1000 == 0 {
            log::debug!(
                "nodes={nodes} open={} incumbent={:?}",
                heap.len(),
                search.incumbent.as_ref().map(|i| sign * i.0)
            );
        }
        match resolve(&node, &vars) {
            NodeLp::Solved(lp) => frontier = Some((lp, node.bound, node.depth)),
            NodeLp::Infeasible => {}
            NodeLp::Interrupted => {
                heap.push(node);
                timed_out = true;
                break;
            }
        }
    }

    let open_bound = heap
        .iter()
        .filter(|n| !search.prunes(n.bound))
        .map(|n| n.bound)
        .min_by(|a, b| a.total_cmp(b));
    finish(&search, start, nodes, open_bound, timed_out)
}

fn finish(search: &Search<'_>, start: Instant, nodes: u64, open_bound: Option<f64>, timed_out: bool) -> SolveResult {
    let sign = search.sign;
    let seconds = start.elapsed().as_secs_f64();
    match (&search.incumbent, timed_out) {
        (None, false) => SolveResult { nodes, ..SolveResult::empty(Status::Infeasible, start) },
        (None, true) => SolveResult {
            nodes,
            bound: open_bound.filter(|b| b.is_finite()).map(|b| sign * search.tighten(b)),
            ..SolveResult::empty(Status::TimeLimit, start)
        },
        (Some((inc, values)), _) => {
            let bound = match open_bound {
                Some(b) if timed_out => search.tighten(b).min(*inc),
                _ => *inc,
            };
            let (bound, gap) = if bound.is_finite() {
                (Some(sign * bound), Some(relative_gap(*inc, bound)))
            } else {
                (None, None)
            };
            let status = match gap {
                Some(g) if g <= search.opts.integrality_tol => Status::Optimal,
                _ => Status::Feasible,
            };
            SolveResult {
                status,
                objective: Some(sign * inc),
                bound,
                gap,
                values: values.clone(),
                seconds,
                nodes,
            }
        }
    }
}
